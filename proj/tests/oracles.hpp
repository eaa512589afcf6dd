// Independent reference implementations used by the unit and acceptance tests.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "irsense/association.hpp"
#include "irsense/locate.hpp"
#include "irsense/waveform.hpp"

namespace oracle {

using cd = std::complex<double>;

/// O(N^2) DFT with sign -1 (forward) or +1 (inverse, unnormalized).
std::vector<cd> naive_dft(const std::vector<cd>& x, int sign);

/// Sample-level OFDM link: both BSs transmit one symbol with CP; BS `m`
/// receives the linear convolution of every transmission with its channel
/// (monostatic taps from `paths`, bistatic taps from `bistatic[tx]`), drops
/// the CP, applies the DFT and keeps its own bins. Noiseless.
std::vector<cd> time_domain_rx(const irsense::PathList& paths,
                               const std::array<std::vector<irsense::PathTap>, 2>& bistatic,
                               const irsense::PilotSet& pilots, const irsense::OfdmConfig& cfg,
                               const irsense::SubcarrierPlan& plan, std::size_t m);

/// (K!)^3 R^K by explicit enumeration of (lambda2, mu1, mu2) permutations
/// and IRS labels, keeping solutions whose tuples all pass `keep`.
template <typename Keep>
std::uint64_t brute_force_count(std::size_t k, std::size_t r, Keep keep);

/// Circle intersection from the chord construction.
std::vector<irsense::Point2D> circles(irsense::Point2D c1, irsense::Point2D c2, double r1, double r2);

/// Central-difference Jacobian of residual_vector.
Eigen::MatrixX2d fd_jacobian(const irsense::RangeProblem& obs, irsense::Point2D pos, double h);

/// Two-stage grid search: `coarse` spacing over +-half_width around
/// `center`, then `fine` spacing over +-3 coarse cells around the coarse argmin.
irsense::Point2D grid_argmin(const irsense::RangeProblem& obs, irsense::Point2D center,
                             double half_width, double coarse, double fine);

}  // namespace oracle

#include <algorithm>
#include <numeric>

namespace oracle {

template <typename Keep>
std::uint64_t brute_force_count(std::size_t k, std::size_t r, Keep keep) {
  std::vector<std::size_t> l2(k), m1(k), m2(k);
  std::iota(l2.begin(), l2.end(), std::size_t{0});
  std::uint64_t labels = 1;
  for (std::size_t i = 0; i < k; ++i) labels *= r;
  std::uint64_t count = 0;
  do {
    std::iota(m1.begin(), m1.end(), std::size_t{0});
    do {
      std::iota(m2.begin(), m2.end(), std::size_t{0});
      do {
        for (std::uint64_t code = 0; code < labels; ++code) {
          std::uint64_t c = code;
          bool ok = true;
          for (std::size_t t = 0; t < k && ok; ++t) {
            const irsense::AssociationTuple tuple{t, l2[t], m1[t], m2[t], static_cast<std::size_t>(c % r)};
            c /= r;
            ok = keep(tuple);
          }
          count += ok ? 1 : 0;
        }
      } while (std::next_permutation(m2.begin(), m2.end()));
    } while (std::next_permutation(m1.begin(), m1.end()));
  } while (std::next_permutation(l2.begin(), l2.end()));
  return count;
}

}  // namespace oracle
