#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irsense/association.hpp"
#include "irsense/config.hpp"
#include "irsense/locate.hpp"

namespace irsense {

/// Per-target outcome, indexed by the estimate's lambda1.
struct TargetOutcome {
  std::size_t true_index{0};
  Point2D estimate;
  Point2D truth;
  double residual{0.0};
  AssociationTuple tuple;
  /// Infinite when the target could not be localized.
  double error_m{0.0};
};

struct TrialOutcome {
  std::size_t trial{0};
  std::size_t k{0};
  std::uint64_t seed{0};
  bool detection_failure{false};
  /// Empty feasible set.
  bool association_failure{false};
  bool association_correct{false};
  bool fallback{false};
  Cardinality bar_y;
  /// |Y| (consistency filter only).
  std::uint64_t y_size{0};
  /// Size of the set the search enumerated: |Y| for R = 1, |Y-hat| otherwise.
  std::uint64_t searched_size{0};
  /// Solutions surviving residual pruning.
  std::uint64_t survivor_size{0};
  std::size_t solver_calls{0};
  std::vector<TargetOutcome> targets;
  /// Not written to CSV, so outputs stay reproducible.
  double wall_ms{0.0};

  /// Targets counted as errors under radius `radius_m`; all K on detection failure.
  std::size_t error_count(double radius_m = 0.8) const;
};

/// Seed of trial `index` at target count `k`.
std::uint64_t trial_seed(std::uint64_t master, std::size_t k, std::size_t index);

/// Samples a scene, obtains range sets (Phase I or quantized geometry), runs
/// the association and localization, and scores the result against the truth.
TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t k, std::size_t index);

/// Errors over K * trials; detection-failed trials contribute all K targets.
double error_probability(const std::vector<TrialOutcome>& outcomes, double radius_m = 0.8);

/// Runs `fn(i)` for i in [0, n) on `threads` workers (0 = hardware).
/// Results are stored by index, so output order never depends on scheduling.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t threads, Fn fn);

/// Trials 0..cfg.trials-1 at target count k.
std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg, std::size_t k);

struct Stat {
  double mean{0.0};
  double stderr_{0.0};
};

Stat summarize(const std::vector<double>& values);

struct CardinalityRow {
  std::size_t k{0};
  std::size_t r{0};
  Cardinality bar_y;
  Stat y;
  Stat searched;
  Stat survivors;
  Stat solver_calls;
  double error_probability{0.0};
  std::size_t trials{0};
  std::size_t detection_failures{0};
  std::size_t association_errors{0};
};

CardinalityRow summarize_trials(const ExperimentConfig& cfg, std::size_t k,
                                const std::vector<TrialOutcome>& outcomes);

std::vector<CardinalityRow> cardinality_experiment(const ExperimentConfig& cfg);

struct BaselineRow {
  std::size_t k{0};
  std::size_t trials{0};
  double irs_error_probability{0.0};
  double irs_oracle_error_probability{0.0};
  Stat irs_solver_calls;
  double bs3_error_probability{0.0};
  double bs3_oracle_error_probability{0.0};
  Stat bs3_solver_calls;
  Stat irs_wall_ms;
  Stat bs3_wall_ms;
};

/// IRS scheme vs the three-active-BS stand-in on matched scenes (R = 1,
/// quantized ranges).
std::vector<BaselineRow> baseline_experiment(const ExperimentConfig& cfg);

struct TopologyRow {
  std::string variant;
  std::size_t r{0};
  bool c1_ok{true};
  bool c2_ok{true};
  std::size_t k{0};
  std::size_t trials{0};
  double error_probability{0.0};
  double association_error_rate{0.0};
  Stat y;
};

/// Error probability per IRS placement with trial seeds shared across placements.
std::vector<TopologyRow> topology_experiment(const ExperimentConfig& cfg);

struct Theorem1Row {
  std::size_t k{0};
  std::size_t r{0};
  std::size_t scenes{0};
  /// Scenes with exactly one feasible solution equal to the truth.
  std::size_t unique_correct{0};
  /// Largest position error over uniquely solved scenes.
  double max_position_error_m{0.0};
};

/// Perfect (unquantized) ranges, tau = 1e-9 m, over cfg.k_list and the three
/// reference IRS geometries.
std::vector<Theorem1Row> theorem1_check(const ExperimentConfig& cfg);

/// Reference IRS layouts for R = 1, 2, 3.
std::vector<Point2D> reference_irs_layout(std::size_t r);

void write_trials_csv(std::ostream& os, const std::vector<TrialOutcome>& outcomes);
void write_targets_csv(std::ostream& os, const std::vector<TrialOutcome>& outcomes);
void write_cardinality_csv(std::ostream& os, const std::vector<CardinalityRow>& rows);
void write_baseline_csv(std::ostream& os, const std::vector<BaselineRow>& rows);
void write_topology_csv(std::ostream& os, const std::vector<TopologyRow>& rows);
void write_theorem1_csv(std::ostream& os, const std::vector<Theorem1Row>& rows);

void print_cardinality_table(std::ostream& os, const std::vector<CardinalityRow>& rows);
void print_baseline_table(std::ostream& os, const std::vector<BaselineRow>& rows);
void print_topology_table(std::ostream& os, const std::vector<TopologyRow>& rows);
void print_theorem1_table(std::ostream& os, const std::vector<Theorem1Row>& rows);

}  // namespace irsense

#include "irsense/parallel.ipp"
