#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "irsense/locate.hpp"
#include "irsense/scene.hpp"
#include "irsense/waveform.hpp"

namespace irsense {

/// Round-trip range sets of a three-BS network: the two BSs plus an active
/// micro BS at the position of the (single) IRS. Entries ascending.
struct ThreeBsRanges {
  std::array<Point2D, 3> anchor;
  std::array<std::vector<double>, 3> d;

  std::size_t size() const { return d[0].size(); }
};

/// Quantized round-trip ranges 2 d(anchor, target) on the delay grid.
/// Throws std::invalid_argument unless the scene has exactly one IRS.
ThreeBsRanges three_bs_ranges(const Scene& scene, const OfdmConfig& cfg);

struct ThreeBsResult {
  /// perm[a][k]: index into d[a] assigned to target k (perm[0][k] = k).
  std::array<std::vector<std::size_t>, 3> perm;
  /// Indexed by k, i.e. by D^(1) rank.
  std::vector<LocEstimate> estimates;
  double total_residual{0.0};
  std::size_t solver_calls{0};
};

/// Exhaustive association over (lambda2, lambda3) permutation pairs with
/// residual minimization. All K^2 tuples per target are solved once, then a
/// branch-and-bound search picks the minimizing pair of permutations.
ThreeBsResult solve_three_bs(const ThreeBsRanges& ranges, const ResidualWeights& w,
                             const GnConfig& cfg);

/// Localization under the true association (upper bound).
ThreeBsResult solve_three_bs_oracle(const ThreeBsRanges& ranges, const Scene& scene,
                                    const ResidualWeights& w, const GnConfig& cfg);

}  // namespace irsense
