#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irsense/geometry.hpp"
#include "irsense/random.hpp"

namespace irsense {

/// Known-position anchors: two active base stations and R passive IRSs.
struct Anchors {
  std::array<Point2D, 2> bs{Point2D{100.0, 0.0}, Point2D{-100.0, 0.0}};
  std::vector<Point2D> irs;

  std::size_t irs_count() const { return irs.size(); }

  /// d^BI_{m,r}
  double bs_irs_distance(std::size_t m, std::size_t r) const { return distance(bs.at(m), irs.at(r)); }

  /// Index of the IRS nearest to `p` (lowest index on ties).
  std::size_t nearest_irs(Point2D p) const;

  /// Throws std::invalid_argument unless R >= 1, all points are finite and no
  /// two IRSs coincide.
  void validate() const;
};

/// Ground-truth scenario: anchors plus K targets and their serving IRS.
struct Scene {
  Anchors anchors;
  std::vector<Point2D> targets;
  std::vector<std::size_t> true_gamma;

  std::size_t target_count() const { return targets.size(); }

  /// d^BT_{m,k}
  double bs_target_distance(std::size_t m, std::size_t k) const {
    return distance(anchors.bs.at(m), targets.at(k));
  }
  /// d^IT_{gamma_k,k}
  double irs_target_distance(std::size_t k) const {
    return distance(anchors.irs.at(true_gamma.at(k)), targets.at(k));
  }

  /// Anchors valid, K >= 1, finite targets, true_gamma[k] is the nearest IRS.
  void validate() const;
};

struct TopologyReport {
  bool c1_ok{true};
  bool c2_ok{true};
  std::vector<std::pair<std::size_t, std::size_t>> offending_pairs;

  bool ok() const { return c1_ok && c2_ok; }
};

/// Flags IRS pairs with equal BS-distance difference d_{1,r} - d_{2,r}.
/// A pair on the perpendicular bisector of the BS segment (both differences
/// ~0) violates C1; any other equal pair shares a hyperbola branch (C2).
TopologyReport check_topology(const Anchors& anchors, double tol = 1e-6);

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplerOptions {
  /// Range-resolution grid used for delay-cell collision checks.
  double bandwidth_hz{400e6};
  double c0{3e8};
  /// Reject draws whose BS round-trip delay cell collides with another target's
  /// at the same BS.
  bool separate_round_trip{true};
  /// Additionally reject draws whose BS-target-IRS-BS delay cell collides with
  /// any other monostatic echo (Type II/III/IV) at the same BS, so every echo
  /// is resolvable by the delay-domain estimator.
  bool separate_all_echoes{false};
  std::size_t max_attempts{100000};
};

/// Half-disk of radius `radius` centred on `irs`, opening toward the BS axis.
/// Returns a uniform draw inside it.
Point2D sample_half_disk(const Anchors& anchors, Point2D irs, double radius, Rng& rng);

/// Draws K targets around IRSs chosen uniformly at random; each target lies in
/// the half-disk of its generating IRS and is served by that IRS (nearest).
Scene sample_targets(const Anchors& anchors, std::size_t k, double radius, std::uint64_t seed,
                     const SamplerOptions& options = {});

}  // namespace irsense
