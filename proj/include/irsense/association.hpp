#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "irsense/ranging.hpp"
#include "irsense/scene.hpp"

namespace irsense {

/// Per-target hypothesis: which entry of each sorted range set belongs to the
/// target, and which IRS serves it. All indices are zero-based.
struct AssociationTuple {
  std::size_t lambda1{0};
  std::size_t lambda2{0};
  std::size_t mu1{0};
  std::size_t mu2{0};
  std::size_t gamma{0};

  friend auto operator<=>(const AssociationTuple&, const AssociationTuple&) = default;
};

/// One tuple per target; target k owns lambda1 = k (D1^III ascending).
using AssociationSolution = std::vector<AssociationTuple>;

enum class FeasibleStage { none, consistency, closest_irs, residual_pruned };

const char* to_string(FeasibleStage s);

struct FeasibleSet {
  std::vector<AssociationSolution> solutions;
  /// Filters applied, in order.
  std::vector<FeasibleStage> provenance;

  std::size_t size() const { return solutions.size(); }
};

/// d^IT estimated through BS m: D_m^IV(mu_m) - D_m^III(lambda_m)/2 - d^BI_{m,gamma}.
double irs_range_estimate(const RangeSets& sets, const AssociationTuple& t, std::size_t m,
                          const Anchors& anchors);

/// |estimate via BS 1 - estimate via BS 2|.
double consistency_gap(const RangeSets& sets, const AssociationTuple& t, const Anchors& anchors);

bool consistency_check(const RangeSets& sets, const AssociationTuple& t, const Anchors& anchors,
                       double tau);

/// Saturating count; `saturated` is set when the true value exceeds uint64.
struct Cardinality {
  std::uint64_t value{0};
  bool saturated{false};
};

/// |Y-bar| = (K!)^3 * R^K (lambda1 fixed by target labeling).
Cardinality enumerate_bar_Y(std::size_t k, std::size_t r);

/// IRS candidates for a target whose BS ranges are D1^III(lambda1)/2 and
/// D2^III(lambda2)/2: the nearest IRS to each circle-intersection point,
/// with equidistant IRSs all included. Empty when the circles miss by more
/// than `slack` meters.
std::vector<std::size_t> closest_irs_candidates(const Anchors& anchors, const RangeSets& sets,
                                                std::size_t lambda1, std::size_t lambda2,
                                                double slack = 0.0);

struct FeasibleOptions {
  double tau{1.5};
  bool use_closest_irs{false};
  /// Circle-miss tolerance for the closest-IRS filter (meters).
  double circle_slack{0.0};
  /// Stop after this many solutions (enumeration only).
  std::size_t max_solutions{std::numeric_limits<std::size_t>::max()};
};

/// Depth-first enumeration of Y (or Y-hat with use_closest_irs) over targets
/// k = 0..K-1 with lambda1 = k. Requires |D^III| = |D^IV| = K at both BSs;
/// throws std::invalid_argument otherwise.
FeasibleSet build_feasible(const RangeSets& sets, const Anchors& anchors,
                           const FeasibleOptions& options);

/// Same search as build_feasible, counting without materializing.
std::uint64_t count_feasible(const RangeSets& sets, const Anchors& anchors,
                             const FeasibleOptions& options);

/// Ground-truth tuples of a scene against its own range sets: target j's
/// entries are located by value, so repeated entries are resolved by order.
/// Returned in lambda1 order.
AssociationSolution true_association(const Scene& scene, const RangeSets& sets);

/// True when both solutions pick the same range values and IRS for every
/// target. Differs from tuple equality only when a range set repeats a value.
bool equivalent_solutions(const RangeSets& sets, const AssociationSolution& a,
                          const AssociationSolution& b);

/// CSV rows `solution,target,lambda1,lambda2,mu1,mu2,gamma` (zero-based).
void write_feasible_csv(std::ostream& os, const FeasibleSet& set);

}  // namespace irsense
