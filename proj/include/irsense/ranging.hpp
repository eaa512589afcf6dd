#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "irsense/scene.hpp"
#include "irsense/waveform.hpp"

namespace irsense {

/// Sparse channel recovery weights and support thresholds.
struct RangingConfig {
  double rho{0.0};
  double rho1{0.0};
  double rho2{0.0};
  double delta1{0.0};
  double delta2{0.0};
  std::size_t max_iters{5000};
  double conv_tol{1e-8};

  void validate() const;

  /// Noise-derived defaults. With unit-modulus pilots every column of
  /// sqrt(p) diag(s) G has norm sqrt(p |N_m|), so the universal weight is
  /// rho = sigma * sqrt(p |N_m|) * sqrt(2 ln L); rho1 = rho / 10, rho2 = rho.
  /// Both support thresholds are 6 noise tap-standard deviations, clamped to
  /// half the weakest (post-shrinkage) echo reachable within `coverage_radius`
  /// of an IRS.
  static RangingConfig calibrate(const OfdmConfig& cfg, const Anchors& anchors,
                                 double coverage_radius);
};

struct ChannelEstimate {
  std::vector<cd> taps;
  std::size_t iterations{0};
  bool converged{false};
  double objective{0.0};
  /// Relative objective change of the last iteration.
  double objective_gap{0.0};

  std::vector<double> magnitudes() const;
};

/// Complex proximal map of t|.|: shrinks the modulus by t, keeps the phase.
cd soft_threshold(cd z, double t);
double soft_threshold(double x, double t);

/// min_h 0.5 ||y - sqrt(p) diag(s) G h||^2 + sum_l w_l |h_l| by proximal
/// gradient with backtracking. Stops when the relative objective change falls
/// below `conv_tol`; otherwise returns converged = false after `max_iters`.
ChannelEstimate weighted_l1_solve(const FreqSnapshot& snap, std::span<const double> weights,
                                  std::size_t max_iters, double conv_tol);

ChannelEstimate lasso_solve(const FreqSnapshot& snap, std::size_t taps, double rho,
                            std::size_t max_iters = 5000, double conv_tol = 1e-8);

/// Weighted LASSO with weight rho1 on phi2 U phi3 and rho2 elsewhere.
ChannelEstimate weighted_lasso_solve(const FreqSnapshot& snap, std::size_t taps,
                                     std::span<const std::size_t> phi2,
                                     std::span<const std::size_t> phi3, const RangingConfig& cfg);

/// Indices l with |h_l| >= delta, ascending.
std::vector<std::size_t> detect_support(const ChannelEstimate& est, double delta);

/// Cell-midpoint path length of delay index l: (l + 1/2) c0 / B.
double delay_to_range(std::size_t l, const OfdmConfig& cfg);

/// Delay indices of the monostatic Type II paths per BS (set semantics).
std::array<std::vector<std::size_t>, 2> known_irs_delays(const Anchors& anchors,
                                                         const OfdmConfig& cfg);

/// Per-BS range sets handed from Phase I to Phase II. d3 holds round-trip
/// BS-target-BS lengths, d4 BS-target-IRS-BS lengths, both ascending.
struct RangeSets {
  std::array<std::vector<double>, 2> d3;
  std::array<std::vector<double>, 2> d4;
  std::array<std::vector<std::size_t>, 2> phi2;
  std::array<std::vector<std::size_t>, 2> phi3;
  std::array<std::vector<std::size_t>, 2> phi4;

  /// True when every set holds exactly k entries.
  bool balanced(std::size_t k) const;
  /// Common cardinality of d3[0]; meaningful when balanced.
  std::size_t size() const { return d3[0].size(); }
};

/// Phi^III from the q = 1 estimates, Phi^IV = supp(q = 2) \ (Phi^II U Phi^III),
/// and the corresponding sorted range sets.
RangeSets build_range_sets(const std::array<ChannelEstimate, 2>& q1,
                           const std::array<ChannelEstimate, 2>& q2, const Anchors& anchors,
                           const OfdmConfig& ofdm, const RangingConfig& cfg);

/// Unquantized ranges straight from the geometry.
RangeSets exact_range_sets(const Scene& scene);

/// Geometry ranges snapped to the delay grid (floor then cell midpoint), as an
/// ideal on-grid Phase I would report them. Entries may repeat.
RangeSets quantized_range_sets(const Scene& scene, const OfdmConfig& cfg);

struct PhaseOneResult {
  RangeSets sets;
  std::array<ChannelEstimate, 2> q1;
  std::array<ChannelEstimate, 2> q2;
  PathList paths_q1;
  PathList paths_q2;
};

/// Waveform synthesis for both symbols, (weighted) LASSO per BS, supports and
/// range sets. Throws OutOfWindowError for scenes beyond the tap window.
PhaseOneResult run_phase_one(const Scene& scene, const OfdmConfig& ofdm, const RangingConfig& cfg,
                             std::uint64_t seed, bool add_noise = true);

/// CSV rows `bs,set,index,meters` with set in {III, IV}; bs and index zero-based.
void write_range_sets_csv(std::ostream& os, const RangeSets& sets);
RangeSets read_range_sets_csv(std::istream& is);

}  // namespace irsense
