#include "irsense/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "irsense/ranging.hpp"

namespace irsense {

ThreeBsRanges three_bs_ranges(const Scene& scene, const OfdmConfig& cfg) {
  if (scene.anchors.irs_count() != 1) {
    throw std::invalid_argument("three_bs_ranges: the baseline replaces exactly one IRS");
  }
  ThreeBsRanges out;
  out.anchor = {scene.anchors.bs[0], scene.anchors.bs[1], scene.anchors.irs[0]};
  for (std::size_t a = 0; a < 3; ++a) {
    for (const auto& t : scene.targets) {
      const auto l = delay_index(2.0 * distance(out.anchor[a], t), cfg.bandwidth_hz(), cfg.c0);
      out.d[a].push_back(delay_to_range(l, cfg));
    }
    std::sort(out.d[a].begin(), out.d[a].end());
  }
  return out;
}

namespace {

LocEstimate solve_triple(const ThreeBsRanges& r, std::size_t k, std::size_t i, std::size_t j,
                         const ResidualWeights& w, const GnConfig& cfg) {
  RangeProblem obs;
  obs.anchor = {r.anchor[0], r.anchor[1], r.anchor[2]};
  obs.range = {0.5 * r.d[0].at(k), 0.5 * r.d[1].at(i), 0.5 * r.d[2].at(j)};
  obs.sigma = {w.sigma_bt, w.sigma_bt, w.sigma_bt};

  // sigma = cell / (2 sqrt 3) under the quantization weighting; allow one cell of miss.
  const double cell = 2.0 * std::sqrt(3.0) * w.sigma_bt;
  const auto pts = circle_intersect_relaxed(obs.anchor[0], obs.anchor[1], obs.range[0], obs.range[1], cell);
  Point2D init = r.anchor[2];
  if (!pts.empty()) {
    init = objective(obs, pts[0]) <= objective(obs, pts[1]) ? pts[0] : pts[1];
  }
  auto est = solve_range_problem(obs, cfg, init);
  est.tuple = {k, i, 0, 0, 0};
  return est;
}

}  // namespace

ThreeBsResult solve_three_bs(const ThreeBsRanges& ranges, const ResidualWeights& w,
                             const GnConfig& cfg) {
  const std::size_t k_count = ranges.size();
  if (ranges.d[1].size() != k_count || ranges.d[2].size() != k_count) {
    throw std::invalid_argument("solve_three_bs: range sets differ in size");
  }
  if (k_count > 64) throw std::invalid_argument("solve_three_bs: at most 64 targets supported");

  ThreeBsResult out;
  std::vector<LocEstimate> table(k_count * k_count * k_count);
  auto at = [&](std::size_t k, std::size_t i, std::size_t j) -> LocEstimate& {
    return table[(k * k_count + i) * k_count + j];
  };
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < k_count; ++i) {
      for (std::size_t j = 0; j < k_count; ++j) at(k, i, j) = solve_triple(ranges, k, i, j, w, cfg);
    }
  }
  out.solver_calls = table.size();

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cur_i, cur_j, best_i, best_j;
  auto dfs = [&](auto&& self, std::size_t k, std::uint64_t used_i, std::uint64_t used_j,
                 double partial) -> void {
    if (partial >= best) return;
    if (k == k_count) {
      best = partial;
      best_i = cur_i;
      best_j = cur_j;
      return;
    }
    for (std::size_t i = 0; i < k_count; ++i) {
      if (used_i & (std::uint64_t{1} << i)) continue;
      for (std::size_t j = 0; j < k_count; ++j) {
        if (used_j & (std::uint64_t{1} << j)) continue;
        cur_i.push_back(i);
        cur_j.push_back(j);
        self(self, k + 1, used_i | (std::uint64_t{1} << i), used_j | (std::uint64_t{1} << j),
             partial + at(k, i, j).residual);
        cur_i.pop_back();
        cur_j.pop_back();
      }
    }
  };
  dfs(dfs, 0, 0, 0, 0.0);

  out.perm[0].resize(k_count);
  std::iota(out.perm[0].begin(), out.perm[0].end(), std::size_t{0});
  out.perm[1] = best_i;
  out.perm[2] = best_j;
  out.total_residual = best;
  for (std::size_t k = 0; k < k_count; ++k) out.estimates.push_back(at(k, best_i[k], best_j[k]));
  return out;
}

ThreeBsResult solve_three_bs_oracle(const ThreeBsRanges& ranges, const Scene& scene,
                                    const ResidualWeights& w, const GnConfig& cfg) {
  const std::size_t k_count = scene.target_count();
  if (ranges.size() != k_count) throw std::invalid_argument("solve_three_bs_oracle: size mismatch");
  ThreeBsResult out;
  for (std::size_t a = 0; a < 3; ++a) {
    std::vector<std::size_t> order(k_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return distance(ranges.anchor[a], scene.targets[x]) < distance(ranges.anchor[a], scene.targets[y]);
    });
    std::vector<std::size_t> rank(k_count);
    for (std::size_t n = 0; n < k_count; ++n) rank[order[n]] = n;
    out.perm[a] = rank;
  }
  // Re-index by the first anchor's rank.
  std::array<std::vector<std::size_t>, 3> by_k;
  for (auto& v : by_k) v.resize(k_count);
  for (std::size_t t = 0; t < k_count; ++t) {
    for (std::size_t a = 0; a < 3; ++a) by_k[a][out.perm[0][t]] = out.perm[a][t];
  }
  out.perm = by_k;
  for (std::size_t k = 0; k < k_count; ++k) {
    out.estimates.push_back(solve_triple(ranges, k, out.perm[1][k], out.perm[2][k], w, cfg));
    out.total_residual += out.estimates.back().residual;
  }
  out.solver_calls = k_count;
  return out;
}

}  // namespace irsense
