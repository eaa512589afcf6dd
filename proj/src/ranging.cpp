#include "irsense/ranging.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace irsense {

void RangingConfig::validate() const {
  if (!(rho >= 0.0)) throw std::invalid_argument("RangingConfig: rho must be >= 0");
  if (!(rho1 >= 0.0) || !(rho1 < rho2)) throw std::invalid_argument("RangingConfig: need 0 <= rho1 < rho2");
  if (!(delta1 > 0.0) || !(delta2 > 0.0)) throw std::invalid_argument("RangingConfig: thresholds must be positive");
  if (max_iters == 0) throw std::invalid_argument("RangingConfig: max_iters must be positive");
}

RangingConfig RangingConfig::calibrate(const OfdmConfig& ofdm, const Anchors& anchors,
                                       double coverage_radius) {
  ofdm.validate();
  const double assigned = static_cast<double>(ofdm.subcarriers / 2);
  const double p = ofdm.power_per_subcarrier_w(ofdm.subcarriers / 2);
  const double sigma = std::sqrt(ofdm.noise_variance_w());
  const double col_norm = std::sqrt(p * assigned);
  const double tap_std = sigma / col_norm;

  RangingConfig cfg;
  cfg.rho = sigma * col_norm * std::sqrt(2.0 * std::log(static_cast<double>(ofdm.taps)));
  cfg.rho1 = cfg.rho / 10.0;
  cfg.rho2 = cfg.rho;

  double weakest = std::numeric_limits<double>::infinity();
  const double g0 = ofdm.target_gain();
  const double gi = ofdm.irs_gain();
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t r = 0; r < anchors.irs_count(); ++r) {
      const double d_bi = anchors.bs_irs_distance(m, r);
      const double d_bt = d_bi + coverage_radius;
      weakest = std::min(weakest, std::sqrt(g0) / (d_bt * d_bt));
      weakest = std::min(weakest, std::sqrt(g0 * gi) / (d_bt * coverage_radius * d_bi));
    }
  }
  const double shrink = cfg.rho2 / (col_norm * col_norm);
  double delta = 6.0 * tap_std;
  const double ceiling = 0.5 * (weakest - shrink);
  if (ceiling > 0.0) delta = std::min(delta, ceiling);
  cfg.delta1 = delta;
  cfg.delta2 = delta;
  return cfg;
}

std::vector<double> ChannelEstimate::magnitudes() const {
  std::vector<double> out;
  out.reserve(taps.size());
  for (const auto& t : taps) out.push_back(std::abs(t));
  return out;
}

cd soft_threshold(cd z, double t) {
  const double mag = std::abs(z);
  if (mag <= t) return {};
  return z * ((mag - t) / mag);
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

namespace {

class SnapshotOperator {
 public:
  SnapshotOperator(const FreqSnapshot& s, std::size_t taps) : snap_(s), taps_(taps), amp_(std::sqrt(s.tx_power_w)) {}

  std::vector<cd> apply(std::span<const cd> h) const {
    auto out = steering_apply(snap_.bins, snap_.subcarriers, h);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] *= amp_ * snap_.pilots[n];
    return out;
  }

  std::vector<cd> adjoint(std::span<const cd> v) const {
    std::vector<cd> w(v.size());
    for (std::size_t n = 0; n < v.size(); ++n) w[n] = amp_ * std::conj(snap_.pilots[n]) * v[n];
    return steering_adjoint(snap_.bins, snap_.subcarriers, w, taps_);
  }

  /// Upper bound on ||A||^2: p * max|s|^2 * |N_m| is exact for orthogonal columns.
  double lipschitz_guess() const {
    double smax = 0.0;
    for (const auto& s : snap_.pilots) smax = std::max(smax, std::norm(s));
    return amp_ * amp_ * smax * static_cast<double>(snap_.bins.size());
  }

 private:
  const FreqSnapshot& snap_;
  std::size_t taps_;
  double amp_;
};

double half_sq_residual(std::span<const cd> ax, std::span<const cd> y) {
  double s = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) s += std::norm(ax[n] - y[n]);
  return 0.5 * s;
}

double weighted_l1(std::span<const cd> x, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) s += w[l] * std::abs(x[l]);
  return s;
}

}  // namespace

ChannelEstimate weighted_l1_solve(const FreqSnapshot& snap, std::span<const double> weights,
                                  std::size_t max_iters, double conv_tol) {
  if (snap.y.size() != snap.bins.size() || snap.pilots.size() != snap.bins.size()) {
    throw std::invalid_argument("weighted_l1_solve: malformed snapshot");
  }
  const std::size_t taps = weights.size();
  if (taps == 0 || taps > snap.subcarriers) throw std::invalid_argument("weighted_l1_solve: bad tap count");
  const SnapshotOperator op(snap, taps);

  double y_energy = 0.0;
  for (const auto& v : snap.y) y_energy += std::norm(v);
  // Objective floor relative to the signal energy so that exact fits terminate.
  const double floor = 1e-20 * std::max(y_energy, std::numeric_limits<double>::min());

  std::vector<cd> x(taps);
  std::vector<cd> ax(snap.y.size());
  double smooth = half_sq_residual(ax, snap.y);
  double objective = smooth;
  double step = 1.0 / op.lipschitz_guess();

  ChannelEstimate est;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    std::vector<cd> resid(ax.size());
    for (std::size_t n = 0; n < ax.size(); ++n) resid[n] = ax[n] - snap.y[n];
    const auto grad = op.adjoint(resid);

    std::vector<cd> next(taps);
    std::vector<cd> a_next;
    double smooth_next = 0.0;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (std::size_t l = 0; l < taps; ++l) {
        next[l] = soft_threshold(x[l] - step * grad[l], step * weights[l]);
      }
      a_next = op.apply(next);
      smooth_next = half_sq_residual(a_next, snap.y);
      double lin = 0.0;
      double dist = 0.0;
      for (std::size_t l = 0; l < taps; ++l) {
        const cd d = next[l] - x[l];
        lin += std::real(std::conj(grad[l]) * d);
        dist += std::norm(d);
      }
      const double model = smooth + lin + dist / (2.0 * step);
      if (smooth_next <= model * (1.0 + 1e-12) + floor) break;
      step *= 0.5;
    }

    const double objective_next = smooth_next + weighted_l1(next, weights);
    const double change = std::abs(objective - objective_next);
    const double scale = std::max(std::abs(objective), floor);
    x = std::move(next);
    ax = std::move(a_next);
    smooth = smooth_next;
    objective = objective_next;
    est.iterations = it;
    est.objective_gap = change / scale;
    if (change <= conv_tol * scale) {
      est.converged = true;
      break;
    }
  }
  est.taps = std::move(x);
  est.objective = objective;
  return est;
}

ChannelEstimate lasso_solve(const FreqSnapshot& snap, std::size_t taps, double rho,
                            std::size_t max_iters, double conv_tol) {
  if (!(rho >= 0.0)) throw std::invalid_argument("lasso_solve: rho must be >= 0");
  const std::vector<double> w(taps, rho);
  return weighted_l1_solve(snap, w, max_iters, conv_tol);
}

ChannelEstimate weighted_lasso_solve(const FreqSnapshot& snap, std::size_t taps,
                                     std::span<const std::size_t> phi2,
                                     std::span<const std::size_t> phi3, const RangingConfig& cfg) {
  std::vector<double> w(taps, cfg.rho2);
  for (auto l : phi2) {
    if (l < taps) w[l] = cfg.rho1;
  }
  for (auto l : phi3) {
    if (l < taps) w[l] = cfg.rho1;
  }
  return weighted_l1_solve(snap, w, cfg.max_iters, cfg.conv_tol);
}

std::vector<std::size_t> detect_support(const ChannelEstimate& est, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("detect_support: threshold must be positive");
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < est.taps.size(); ++l) {
    if (std::abs(est.taps[l]) >= delta) out.push_back(l);
  }
  return out;
}

double delay_to_range(std::size_t l, const OfdmConfig& cfg) {
  return (static_cast<double>(l) + 0.5) * cfg.c0 / cfg.bandwidth_hz();
}

std::array<std::vector<std::size_t>, 2> known_irs_delays(const Anchors& anchors,
                                                         const OfdmConfig& cfg) {
  std::array<std::vector<std::size_t>, 2> out;
  for (std::size_t m = 0; m < 2; ++m) {
    std::set<std::size_t> cells;
    for (std::size_t r = 0; r < anchors.irs_count(); ++r) {
      cells.insert(delay_index(2.0 * anchors.bs_irs_distance(m, r), cfg.bandwidth_hz(), cfg.c0));
    }
    out[m].assign(cells.begin(), cells.end());
  }
  return out;
}

bool RangeSets::balanced(std::size_t k) const {
  for (std::size_t m = 0; m < 2; ++m) {
    if (d3[m].size() != k || d4[m].size() != k) return false;
  }
  return true;
}

RangeSets build_range_sets(const std::array<ChannelEstimate, 2>& q1,
                           const std::array<ChannelEstimate, 2>& q2, const Anchors& anchors,
                           const OfdmConfig& ofdm, const RangingConfig& cfg) {
  RangeSets sets;
  const auto phi2 = known_irs_delays(anchors, ofdm);
  for (std::size_t m = 0; m < 2; ++m) {
    sets.phi2[m] = phi2[m];
    sets.phi3[m] = detect_support(q1[m], cfg.delta1);
    const auto support = detect_support(q2[m], cfg.delta2);
    for (auto l : support) {
      const bool known = std::binary_search(sets.phi2[m].begin(), sets.phi2[m].end(), l) ||
                         std::binary_search(sets.phi3[m].begin(), sets.phi3[m].end(), l);
      if (!known) sets.phi4[m].push_back(l);
    }
    for (auto l : sets.phi3[m]) sets.d3[m].push_back(delay_to_range(l, ofdm));
    for (auto l : sets.phi4[m]) sets.d4[m].push_back(delay_to_range(l, ofdm));
  }
  return sets;
}

RangeSets exact_range_sets(const Scene& scene) {
  RangeSets sets;
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t k = 0; k < scene.target_count(); ++k) {
      const double d_bt = scene.bs_target_distance(m, k);
      sets.d3[m].push_back(2.0 * d_bt);
      sets.d4[m].push_back(d_bt + scene.irs_target_distance(k) +
                           scene.anchors.bs_irs_distance(m, scene.true_gamma[k]));
    }
    std::sort(sets.d3[m].begin(), sets.d3[m].end());
    std::sort(sets.d4[m].begin(), sets.d4[m].end());
  }
  return sets;
}

RangeSets quantized_range_sets(const Scene& scene, const OfdmConfig& cfg) {
  const auto exact = exact_range_sets(scene);
  RangeSets sets;
  const double b = cfg.bandwidth_hz();
  for (std::size_t m = 0; m < 2; ++m) {
    for (double d : exact.d3[m]) sets.phi3[m].push_back(delay_index(d, b, cfg.c0));
    for (double d : exact.d4[m]) sets.phi4[m].push_back(delay_index(d, b, cfg.c0));
    for (auto l : sets.phi3[m]) sets.d3[m].push_back(delay_to_range(l, cfg));
    for (auto l : sets.phi4[m]) sets.d4[m].push_back(delay_to_range(l, cfg));
  }
  sets.phi2 = known_irs_delays(scene.anchors, cfg);
  return sets;
}

PhaseOneResult run_phase_one(const Scene& scene, const OfdmConfig& ofdm, const RangingConfig& cfg,
                             std::uint64_t seed, bool add_noise) {
  const auto plan = make_plan(ofdm.subcarriers);
  Rng pilot_rng(derive_seed(seed, 0x70696c6f74ULL));
  PhaseOneResult out;
  out.paths_q1 = build_paths(scene, ofdm, 1, derive_seed(seed, 0x7068617365ULL));
  out.paths_q2 = build_paths(scene, ofdm, 2, derive_seed(seed, 0x7068617365ULL));

  const auto pilots1 = make_pilots(plan, pilot_rng);
  const auto pilots2 = make_pilots(plan, pilot_rng);
  const auto rx1 = simulate_freq_rx(out.paths_q1, pilots1, ofdm, plan, derive_seed(seed, 0x6e6f697365ULL, 1), add_noise);
  const auto rx2 = simulate_freq_rx(out.paths_q2, pilots2, ofdm, plan, derive_seed(seed, 0x6e6f697365ULL, 2), add_noise);

  const auto phi2 = known_irs_delays(scene.anchors, ofdm);
  for (std::size_t m = 0; m < 2; ++m) {
    out.q1[m] = lasso_solve(rx1[m], ofdm.taps, cfg.rho, cfg.max_iters, cfg.conv_tol);
  }
  for (std::size_t m = 0; m < 2; ++m) {
    const auto phi3 = detect_support(out.q1[m], cfg.delta1);
    out.q2[m] = weighted_lasso_solve(rx2[m], ofdm.taps, phi2[m], phi3, cfg);
  }
  out.sets = build_range_sets(out.q1, out.q2, scene.anchors, ofdm, cfg);
  return out;
}

void write_range_sets_csv(std::ostream& os, const RangeSets& sets) {
  os << "bs,set,index,meters\n";
  os.precision(17);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t i = 0; i < sets.d3[m].size(); ++i) os << m << ",III," << i << ',' << sets.d3[m][i] << '\n';
    for (std::size_t i = 0; i < sets.d4[m].size(); ++i) os << m << ",IV," << i << ',' << sets.d4[m][i] << '\n';
  }
}

RangeSets read_range_sets_csv(std::istream& is) {
  RangeSets sets;
  std::string line;
  if (!std::getline(is, line) || line.rfind("bs,set,index,meters", 0) != 0) {
    throw std::runtime_error("range-set CSV: missing header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string bs, set, index, meters;
    if (!std::getline(ss, bs, ',') || !std::getline(ss, set, ',') || !std::getline(ss, index, ',') ||
        !std::getline(ss, meters)) {
      throw std::runtime_error("range-set CSV: malformed row '" + line + "'");
    }
    const auto m = std::stoul(bs);
    if (m > 1) throw std::runtime_error("range-set CSV: bs must be 0 or 1");
    auto& target = set == "III" ? sets.d3[m] : set == "IV" ? sets.d4[m] : throw std::runtime_error("range-set CSV: unknown set " + set);
    target.push_back(std::stod(meters));
  }
  for (std::size_t m = 0; m < 2; ++m) {
    std::sort(sets.d3[m].begin(), sets.d3[m].end());
    std::sort(sets.d4[m].begin(), sets.d4[m].end());
  }
  return sets;
}

}  // namespace irsense
