#include "irsense/scene.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace irsense {

std::size_t Anchors::nearest_irs(Point2D p) const {
  std::size_t best = 0;
  double best_d = distance(p, irs.at(0));
  for (std::size_t r = 1; r < irs.size(); ++r) {
    const double d = distance(p, irs[r]);
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return best;
}

void Anchors::validate() const {
  if (irs.empty()) throw std::invalid_argument("scene needs at least one IRS");
  for (const auto& b : bs) {
    if (!is_finite(b)) throw std::invalid_argument("non-finite BS coordinate");
  }
  if (bs[0] == bs[1]) throw std::invalid_argument("the two BSs coincide");
  for (std::size_t r = 0; r < irs.size(); ++r) {
    if (!is_finite(irs[r])) throw std::invalid_argument("non-finite IRS coordinate");
    for (std::size_t s = r + 1; s < irs.size(); ++s) {
      if (irs[r] == irs[s]) {
        throw std::invalid_argument("IRS " + std::to_string(r) + " and " + std::to_string(s) +
                                    " share coordinates");
      }
    }
  }
}

void Scene::validate() const {
  anchors.validate();
  if (targets.empty()) throw std::invalid_argument("scene needs at least one target");
  if (true_gamma.size() != targets.size()) {
    throw std::invalid_argument("true_gamma must have one entry per target");
  }
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!is_finite(targets[k])) throw std::invalid_argument("non-finite target coordinate");
    if (true_gamma[k] >= anchors.irs.size()) throw std::invalid_argument("true_gamma out of range");
    const double own = distance(targets[k], anchors.irs[true_gamma[k]]);
    for (const auto& r : anchors.irs) {
      if (distance(targets[k], r) < own) {
        throw std::invalid_argument("target " + std::to_string(k) + " is not served by its nearest IRS");
      }
    }
  }
}

TopologyReport check_topology(const Anchors& anchors, double tol) {
  TopologyReport report;
  const auto n = anchors.irs.size();
  std::vector<double> delta(n);
  for (std::size_t r = 0; r < n; ++r) {
    delta[r] = anchors.bs_irs_distance(0, r) - anchors.bs_irs_distance(1, r);
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t s = r + 1; s < n; ++s) {
      if (std::abs(delta[r] - delta[s]) > tol) continue;
      report.offending_pairs.emplace_back(r, s);
      if (std::abs(delta[r]) <= tol && std::abs(delta[s]) <= tol) {
        report.c1_ok = false;
      } else {
        report.c2_ok = false;
      }
    }
  }
  return report;
}

Point2D sample_half_disk(const Anchors& anchors, Point2D irs, double radius, Rng& rng) {
  const Point2D b0 = anchors.bs[0];
  const Point2D axis = anchors.bs[1] - b0;
  const double axis_len = std::hypot(axis.x, axis.y);
  const Point2D t{axis.x / axis_len, axis.y / axis_len};
  const Point2D rel = irs - b0;
  const double along = rel.x * t.x + rel.y * t.y;
  const Point2D foot = b0 + along * t;
  Point2D n = foot - irs;
  const double off = std::hypot(n.x, n.y);
  if (off < 1e-9) {
    n = Point2D{-t.y, t.x};
  } else {
    n = (1.0 / off) * n;
  }
  const Point2D side{-n.y, n.x};

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
  const double r = radius * std::sqrt(unit(rng));
  const double th = angle(rng);
  return irs + (r * std::cos(th)) * n + (r * std::sin(th)) * side;
}

namespace {

struct EchoCells {
  std::array<std::size_t, 2> round_trip{};
  std::array<std::size_t, 2> via_irs{};
};

EchoCells echo_cells(const Anchors& a, Point2D target, std::size_t gamma, const SamplerOptions& o) {
  EchoCells c;
  const double d_it = distance(target, a.irs[gamma]);
  for (std::size_t m = 0; m < 2; ++m) {
    const double d_bt = distance(target, a.bs[m]);
    c.round_trip[m] = delay_index(2.0 * d_bt, o.bandwidth_hz, o.c0);
    c.via_irs[m] = delay_index(d_bt + d_it + a.bs_irs_distance(m, gamma), o.bandwidth_hz, o.c0);
  }
  return c;
}

bool collides(const EchoCells& cand, const std::vector<EchoCells>& placed,
              const std::array<std::vector<std::size_t>, 2>& irs_cells, const SamplerOptions& o) {
  for (std::size_t m = 0; m < 2; ++m) {
    if (o.separate_all_echoes) {
      if (cand.round_trip[m] == cand.via_irs[m]) return true;
      for (auto l : irs_cells[m]) {
        if (l == cand.round_trip[m] || l == cand.via_irs[m]) return true;
      }
    }
    for (const auto& p : placed) {
      if (o.separate_round_trip && p.round_trip[m] == cand.round_trip[m]) return true;
      if (o.separate_all_echoes) {
        if (p.via_irs[m] == cand.via_irs[m] || p.round_trip[m] == cand.via_irs[m] ||
            p.via_irs[m] == cand.round_trip[m]) {
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

Scene sample_targets(const Anchors& anchors, std::size_t k, double radius, std::uint64_t seed,
                     const SamplerOptions& options) {
  if (k == 0) throw std::invalid_argument("sample_targets: K must be at least 1");
  if (!(radius > 0.0)) throw std::invalid_argument("sample_targets: radius must be positive");
  anchors.validate();

  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_irs(0, anchors.irs.size() - 1);

  std::array<std::vector<std::size_t>, 2> irs_cells;
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t r = 0; r < anchors.irs.size(); ++r) {
      irs_cells[m].push_back(
          delay_index(2.0 * anchors.bs_irs_distance(m, r), options.bandwidth_hz, options.c0));
    }
  }

  Scene scene;
  scene.anchors = anchors;
  std::vector<EchoCells> placed;
  std::size_t attempts = 0;
  while (scene.targets.size() < k) {
    if (++attempts > options.max_attempts) {
      throw SamplingError("sample_targets: no admissible placement after " +
                          std::to_string(options.max_attempts) + " attempts");
    }
    const std::size_t gamma = pick_irs(rng);
    const Point2D p = sample_half_disk(anchors, anchors.irs[gamma], radius, rng);
    if (anchors.nearest_irs(p) != gamma) continue;
    if (distance(p, anchors.bs[0]) < 1e-3 || distance(p, anchors.bs[1]) < 1e-3) continue;
    const EchoCells cells = echo_cells(anchors, p, gamma, options);
    if (collides(cells, placed, irs_cells, options)) continue;
    scene.targets.push_back(p);
    scene.true_gamma.push_back(gamma);
    placed.push_back(cells);
  }
  return scene;
}

}  // namespace irsense
