#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "irsense/association.hpp"
#include "irsense/ranging.hpp"
#include "irsense/scene.hpp"
#include "irsense/waveform.hpp"

namespace irsense {

/// Range-error standard deviations (meters) of the Type III and Type IV residuals.
struct ResidualWeights {
  double sigma_bt{0.375 / 1.7320508075688772};
  double sigma_it{0.375 / 1.7320508075688772};

  void validate() const;
  /// Half-cell uniform quantization error: c0 / (2B) / sqrt(3).
  static ResidualWeights from_ofdm(const OfdmConfig& cfg);
};

struct GnConfig {
  std::size_t max_iters{100};
  /// Converged once an accepted step is shorter than this (meters).
  double step_tol{1e-10};
  /// Per-target residual above which a tuple is pruned.
  double xi{16.0};
  /// Initial Levenberg parameter; grows tenfold on every rejected step.
  double damping{1e-9};

  void validate() const;
};

struct LocEstimate {
  Point2D position;
  /// Sum of the four weighted squared residuals at `position`.
  double residual{0.0};
  AssociationTuple tuple;
  bool converged{false};
  std::size_t iterations{0};
};

/// Range measurements to known anchors with their error standard deviations.
struct RangeProblem {
  std::vector<Point2D> anchor;
  std::vector<double> range;
  std::vector<double> sigma;

  std::size_t size() const { return anchor.size(); }
};

/// The four measurements of one tuple, in the order BS 1, BS 2, IRS via
/// BS 1, IRS via BS 2.
RangeProblem make_observation(const RangeSets& sets, const AssociationTuple& t,
                              const Anchors& anchors, const ResidualWeights& w);

/// Signed weighted residuals (range - |pos - anchor|) / sigma.
Eigen::VectorXd residual_vector(const RangeProblem& obs, Point2D pos);

/// The four weighted squared residuals.
std::array<double, 4> residual_terms(Point2D pos, const RangeSets& sets, const AssociationTuple& t,
                                     const Anchors& anchors, const ResidualWeights& w);

/// d residual_vector / d (x, y). Rows for an anchor coinciding with `pos` are zero.
Eigen::MatrixX2d residual_jacobian(const RangeProblem& obs, Point2D pos);

double objective(const RangeProblem& obs, Point2D pos);

/// Damped Gauss-Newton (Levenberg) from `init`. Accepted steps never raise
/// the objective; converged = false after max_iters. The tuple field is left
/// default.
LocEstimate solve_range_problem(const RangeProblem& obs, const GnConfig& cfg, Point2D init);

/// solve_range_problem on the four measurements of tuple `t`.
LocEstimate gauss_newton_solve(const RangeSets& sets, const AssociationTuple& t,
                               const Anchors& anchors, const ResidualWeights& w,
                               const GnConfig& cfg, Point2D init);

/// Circle-intersection point of the tuple's BS ranges whose nearest IRS is
/// gamma (the lower-objective one if both qualify); otherwise the midpoint of
/// the two points; otherwise the IRS position.
Point2D initial_guess(const RangeSets& sets, const AssociationTuple& t, const Anchors& anchors,
                      const ResidualWeights& w, double circle_slack);

struct LocateOptions {
  double tau{1.5};
  ResidualWeights weights;
  GnConfig gn;
  /// Circle-miss tolerance (meters) for initialization and IRS candidates.
  double circle_slack{0.75};
  bool use_cache{true};
  bool prune{true};
  /// Upper bound on the enumerated feasible set.
  std::size_t max_solutions{5'000'000};

  void validate() const;
};

/// Per-tuple memo of problem solves, including residual-pruning outcomes.
/// Not thread-safe; one cache per trial.
class TupleCache {
 public:
  TupleCache(const RangeSets& sets, const Anchors& anchors, const LocateOptions& opt);

  const LocEstimate& get(const AssociationTuple& t);
  std::size_t solver_calls() const { return calls_; }

 private:
  const RangeSets& sets_;
  const Anchors& anchors_;
  const LocateOptions& opt_;
  std::map<AssociationTuple, LocEstimate> memo_;
  LocEstimate scratch_;
  std::size_t calls_{0};
};

struct LocalizationResult {
  /// False when the feasible set is empty.
  bool ok{false};
  AssociationSolution association;
  /// One estimate per target, indexed by lambda1.
  std::vector<LocEstimate> estimates;
  double total_residual{0.0};
  /// Size of the enumerated set (Y, or Y-hat for the multi-IRS variant).
  std::size_t feasible_size{0};
  /// Solutions whose every tuple passes the residual threshold.
  std::size_t survivor_size{0};
  std::size_t solver_calls{0};
  /// Set when no solution survived pruning and the unpruned minimum was used.
  bool fallback{false};
  /// Set when enumeration stopped at max_solutions.
  bool truncated{false};
};

/// Single-IRS data association and localization over Y.
LocalizationResult solve_single_irs(const RangeSets& sets, const Anchors& anchors,
                                    const LocateOptions& opt);

/// Multi-IRS variant over Y-hat. R = 1 returns solve_single_irs.
LocalizationResult solve_multi_irs(const RangeSets& sets, const Anchors& anchors,
                                   const LocateOptions& opt);

/// Localization under a given association (upper-bound mode).
LocalizationResult solve_with_association(const RangeSets& sets, const Anchors& anchors,
                                          const AssociationSolution& association,
                                          const LocateOptions& opt);

}  // namespace irsense
