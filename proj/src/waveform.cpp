#include "irsense/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace irsense {

double OfdmConfig::tx_power_w() const { return std::pow(10.0, (tx_power_dbm - 30.0) / 10.0); }

double OfdmConfig::power_per_subcarrier_w(std::size_t assigned) const {
  return tx_power_w() / static_cast<double>(assigned);
}

double OfdmConfig::noise_variance_w() const {
  return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0) * subcarrier_spacing_hz;
}

double OfdmConfig::target_gain() const { return std::pow(10.0, target_gain_db / 10.0); }
double OfdmConfig::irs_gain() const { return std::pow(10.0, irs_gain_db / 10.0); }

void OfdmConfig::validate() const {
  if (subcarriers < 2) throw std::invalid_argument("OfdmConfig: need at least 2 subcarriers");
  if (taps < 1) throw std::invalid_argument("OfdmConfig: need at least one tap");
  if (cp_length + 1 < taps) throw std::invalid_argument("OfdmConfig: cyclic prefix shorter than L-1");
  if (2 * taps > subcarriers) throw std::invalid_argument("OfdmConfig: L must not exceed N/2");
  if (!(subcarrier_spacing_hz > 0.0) || !(c0 > 0.0)) {
    throw std::invalid_argument("OfdmConfig: spacing and c0 must be positive");
  }
}

SubcarrierPlan make_plan(std::size_t subcarriers) {
  if (subcarriers == 0 || subcarriers % 2 != 0) {
    throw std::invalid_argument("make_plan: interleaved allocation needs an even N");
  }
  SubcarrierPlan plan;
  plan.subcarriers = subcarriers;
  for (std::size_t b = 0; b < subcarriers; ++b) plan.bins[b % 2].push_back(b);
  return plan;
}

const char* to_string(LinkType t) {
  switch (t) {
    case LinkType::I: return "I";
    case LinkType::II: return "II";
    case LinkType::III: return "III";
    case LinkType::IV: return "IV";
  }
  return "?";
}

std::size_t PathList::count(std::size_t m, LinkType t) const {
  std::size_t n = 0;
  for (const auto& tap : per_bs.at(m)) n += tap.type == t ? 1 : 0;
  return n;
}

namespace {

cd unit_phasor(std::uint64_t seed, LinkType type, std::size_t m, std::size_t a, std::size_t b) {
  const auto key = derive_seed(seed, static_cast<std::uint64_t>(type) * 0x10000 + m,
                               (static_cast<std::uint64_t>(a) << 32) ^ b);
  const double u = static_cast<double>(key >> 11) * 0x1.0p-53;
  return std::polar(1.0, 2.0 * std::numbers::pi * u);
}

PathTap make_tap(const OfdmConfig& cfg, LinkType type, std::size_t m, double length, cd gain) {
  PathTap tap;
  tap.delay = delay_index(length, cfg.bandwidth_hz(), cfg.c0);
  if (tap.delay >= cfg.taps) {
    throw OutOfWindowError(std::string("build_paths: Type ") + to_string(type) + " path of " +
                           std::to_string(length) + " m exceeds the " + std::to_string(cfg.taps) +
                           "-tap window");
  }
  tap.gain = gain;
  tap.type = type;
  tap.tx_bs = m;
  tap.rx_bs = m;
  tap.path_length_m = length;
  return tap;
}

}  // namespace

PathList build_paths(const Scene& scene, const OfdmConfig& cfg, std::size_t symbol,
                     std::uint64_t phase_seed) {
  if (symbol != 1 && symbol != 2) throw std::invalid_argument("build_paths: symbol must be 1 or 2");
  const auto& a = scene.anchors;
  const double g0 = cfg.target_gain();
  const double gi = cfg.irs_gain();

  PathList paths;
  paths.symbol = symbol;
  for (std::size_t m = 0; m < 2; ++m) {
    auto& list = paths.per_bs[m];
    for (std::size_t k = 0; k < scene.target_count(); ++k) {
      const double d_bt = scene.bs_target_distance(m, k);
      auto tap = make_tap(cfg, LinkType::III, m, 2.0 * d_bt,
                          std::sqrt(g0) / (d_bt * d_bt) * unit_phasor(phase_seed, LinkType::III, m, k, 0));
      tap.target = k;
      list.push_back(tap);
    }
    if (symbol == 1) continue;

    for (std::size_t r = 0; r < a.irs_count(); ++r) {
      const double d_bi = a.bs_irs_distance(m, r);
      auto tap = make_tap(cfg, LinkType::II, m, 2.0 * d_bi,
                          std::sqrt(g0 * gi) / (d_bi * d_bi) * unit_phasor(phase_seed, LinkType::II, m, r, 0));
      tap.irs = r;
      list.push_back(tap);
    }
    for (std::size_t k = 0; k < scene.target_count(); ++k) {
      const std::size_t g = scene.true_gamma.at(k);
      const double d_bt = scene.bs_target_distance(m, k);
      const double d_it = scene.irs_target_distance(k);
      const double d_bi = a.bs_irs_distance(m, g);
      auto tap = make_tap(cfg, LinkType::IV, m, d_bt + d_it + d_bi,
                          std::sqrt(g0 * gi) / (d_bt * d_it * d_bi) *
                              unit_phasor(phase_seed, LinkType::IV, m, k, g));
      tap.target = k;
      tap.irs = g;
      list.push_back(tap);
    }
  }
  return paths;
}

std::vector<cd> channel_vector(std::span<const PathTap> taps, std::size_t length) {
  std::vector<cd> h(length);
  for (const auto& t : taps) h.at(t.delay) += t.gain;
  return h;
}

std::vector<cd> ofdm_modulate(std::span<const cd> symbols, std::size_t cp_length) {
  const std::size_t n = symbols.size();
  if (cp_length > n) throw std::invalid_argument("ofdm_modulate: CP longer than the symbol");
  auto body = idft_unnormalized(symbols);
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<cd> out;
  out.reserve(n + cp_length);
  for (std::size_t i = n - cp_length; i < n; ++i) out.push_back(body[i] * scale);
  for (std::size_t i = 0; i < n; ++i) out.push_back(body[i] * scale);
  return out;
}

std::vector<cd> ofdm_demodulate(std::span<const cd> samples, std::size_t subcarriers,
                                std::size_t cp_length) {
  if (samples.size() < subcarriers + cp_length) {
    throw std::invalid_argument("ofdm_demodulate: too few samples");
  }
  return dft(samples.subspan(cp_length, subcarriers));
}

PilotSet make_pilots(const SubcarrierPlan& plan, Rng& rng) {
  static constexpr double kAmp = std::numbers::sqrt2 / 2.0;
  std::bernoulli_distribution bit(0.5);
  PilotSet pilots;
  for (std::size_t m = 0; m < 2; ++m) {
    pilots[m].assign(plan.subcarriers, cd{});
    for (auto b : plan.bins[m]) {
      pilots[m][b] = cd{bit(rng) ? kAmp : -kAmp, bit(rng) ? kAmp : -kAmp};
    }
  }
  return pilots;
}

std::vector<cd> steering_apply(std::span<const std::size_t> bins, std::size_t subcarriers,
                               std::span<const cd> h) {
  if (h.size() > subcarriers) throw std::invalid_argument("steering_apply: more taps than subcarriers");
  std::vector<cd> padded(subcarriers);
  std::copy(h.begin(), h.end(), padded.begin());
  const auto spectrum = dft(padded);
  std::vector<cd> out(bins.size());
  for (std::size_t n = 0; n < bins.size(); ++n) out[n] = spectrum.at(bins[n]);
  return out;
}

std::vector<cd> steering_adjoint(std::span<const std::size_t> bins, std::size_t subcarriers,
                                 std::span<const cd> v, std::size_t length) {
  if (v.size() != bins.size()) throw std::invalid_argument("steering_adjoint: size mismatch");
  std::vector<cd> spread(subcarriers);
  for (std::size_t n = 0; n < bins.size(); ++n) spread.at(bins[n]) += v[n];
  auto full = idft_unnormalized(spread);
  full.resize(length);
  return full;
}

std::array<FreqSnapshot, 2> simulate_freq_rx(const PathList& paths, const PilotSet& pilots,
                                             const OfdmConfig& cfg, const SubcarrierPlan& plan,
                                             std::uint64_t noise_seed, bool add_noise) {
  if (plan.subcarriers != cfg.subcarriers) throw std::invalid_argument("simulate_freq_rx: plan/config N mismatch");
  std::array<FreqSnapshot, 2> out;
  Rng rng(noise_seed);
  for (std::size_t m = 0; m < 2; ++m) {
    auto& snap = out[m];
    snap.bs = m;
    snap.symbol = paths.symbol;
    snap.subcarriers = cfg.subcarriers;
    snap.bins = plan.bins[m];
    snap.tx_power_w = cfg.power_per_subcarrier_w(snap.bins.size());
    snap.noise_variance_w = cfg.noise_variance_w();
    snap.pilots.reserve(snap.bins.size());
    for (auto b : snap.bins) snap.pilots.push_back(pilots.at(m).at(b));

    const auto h = channel_vector(paths.per_bs[m], cfg.taps);
    snap.y = steering_apply(snap.bins, cfg.subcarriers, h);
    const double amp = std::sqrt(snap.tx_power_w);
    std::normal_distribution<double> gauss(0.0, std::sqrt(snap.noise_variance_w / 2.0));
    for (std::size_t n = 0; n < snap.y.size(); ++n) {
      snap.y[n] *= amp * snap.pilots[n];
      if (add_noise) snap.y[n] += cd{gauss(rng), gauss(rng)};
    }
  }
  return out;
}

}  // namespace irsense
