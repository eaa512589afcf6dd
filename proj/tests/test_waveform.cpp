#include <cmath>
#include <random>

#include "doctest.h"
#include "irsense/waveform.hpp"
#include "oracles.hpp"

using namespace irsense;

namespace {

OfdmConfig small_cfg() {
  OfdmConfig c;
  c.subcarriers = 256;
  c.cp_length = 64;
  c.taps = 64;
  c.subcarrier_spacing_hz = 400e6 / 256.0;
  return c;
}

std::vector<PathTap> random_taps(std::mt19937_64& rng, std::size_t count, std::size_t taps, std::size_t bs) {
  std::uniform_int_distribution<std::size_t> d(0, taps - 1);
  std::normal_distribution<double> g(0, 1e-6);
  std::vector<PathTap> out;
  for (std::size_t i = 0; i < count; ++i) {
    PathTap t;
    t.delay = d(rng);
    t.gain = {g(rng), g(rng)};
    t.tx_bs = t.rx_bs = bs;
    out.push_back(t);
  }
  return out;
}

double rel_err(const std::vector<cd>& a, const std::vector<cd>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("ofdm config derived quantities") {
  OfdmConfig c;
  CHECK(c.bandwidth_hz() == doctest::Approx(400e6));
  CHECK(c.range_cell_m() == doctest::Approx(0.75));
  CHECK(c.tx_power_w() == doctest::Approx(7.943282347));
  CHECK(c.noise_variance_w() == doctest::Approx(std::pow(10.0, -20.4) * 195312.5));
  CHECK_NOTHROW(c.validate());
  c.cp_length = 100;
  CHECK_THROWS(c.validate());
}

TEST_CASE("interleaved plan") {
  const auto p = make_plan(8);
  CHECK(p.bins[0] == std::vector<std::size_t>{0, 2, 4, 6});
  CHECK(p.bins[1] == std::vector<std::size_t>{1, 3, 5, 7});
  CHECK_THROWS(make_plan(7));
}

TEST_CASE("build_paths tap counts and delays") {
  Scene s;
  s.anchors.irs = {{0, 40}};
  s.targets = {{10, 20}, {-15, 5}};
  s.true_gamma = {0, 0};
  OfdmConfig cfg;
  const auto q1 = build_paths(s, cfg, 1, 9);
  const auto q2 = build_paths(s, cfg, 2, 9);
  for (std::size_t m = 0; m < 2; ++m) {
    CHECK(q1.count(m, LinkType::III) == 2);
    CHECK(q1.count(m, LinkType::IV) == 0);
    CHECK(q2.count(m, LinkType::II) == 1);
    CHECK(q2.count(m, LinkType::IV) == 2);
  }
  for (const auto& t : q2.per_bs[0]) {
    if (t.type == LinkType::II) CHECK(t.delay == 287);
    if (t.type == LinkType::III) {
      CHECK(t.delay == delay_index(2.0 * distance(s.anchors.bs[0], s.targets[*t.target]), 400e6, 3e8));
    }
  }
  // Same physical path keeps its phase across symbols.
  CHECK(q1.per_bs[1][0].gain == q2.per_bs[1][0].gain);
  CHECK_THROWS(build_paths(s, cfg, 3, 9));
}

TEST_CASE("build_paths rejects paths beyond the tap window") {
  Scene s;
  s.anchors.irs = {{0, 40}};
  s.targets = {{0, 300}};
  s.true_gamma = {0};
  CHECK_THROWS_AS(build_paths(s, OfdmConfig{}, 1, 1), OutOfWindowError);
}

TEST_CASE("modulate then demodulate is the identity") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<cd> x(64);
  for (auto& v : x) v = {g(rng), g(rng)};
  const auto y = ofdm_demodulate(ofdm_modulate(x, 16), 64, 16);
  CHECK(rel_err(y, x) < 1e-12);
}

TEST_CASE("steering adjoint matches the forward operator") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const auto plan = make_plan(128);
  std::vector<cd> h(32), v(64);
  for (auto& x : h) x = {g(rng), g(rng)};
  for (auto& x : v) x = {g(rng), g(rng)};
  const auto gh = steering_apply(plan.bins[1], 128, h);
  const auto ghv = steering_adjoint(plan.bins[1], 128, v, 32);
  cd lhs{}, rhs{};
  for (std::size_t i = 0; i < v.size(); ++i) lhs += std::conj(v[i]) * gh[i];
  for (std::size_t i = 0; i < h.size(); ++i) rhs += std::conj(ghv[i]) * h[i];
  CHECK(std::abs(lhs - rhs) < 1e-9 * std::abs(lhs));
}

TEST_CASE("steering_apply against the naive DFT") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const auto plan = make_plan(64);
  std::vector<cd> h(64);
  for (std::size_t i = 0; i < 16; ++i) h[i] = {g(rng), g(rng)};
  const auto ref = oracle::naive_dft(h, -1);
  const auto got = steering_apply(plan.bins[0], 64, std::span<const cd>(h.data(), 16));
  for (std::size_t n = 0; n < got.size(); ++n) CHECK(std::abs(got[n] - ref[plan.bins[0][n]]) < 1e-10);
}

TEST_CASE("frequency-domain model equals the sample-level link") {
  const auto cfg = small_cfg();
  const auto plan = make_plan(cfg.subcarriers);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    PathList paths;
    std::array<std::vector<PathTap>, 2> bistatic;
    for (std::size_t m = 0; m < 2; ++m) {
      paths.per_bs[m] = random_taps(rng, 6, cfg.taps, m);
      bistatic[m] = random_taps(rng, 4, cfg.taps, m);
    }
    Rng prng(trial);
    const auto pilots = make_pilots(plan, prng);
    const auto freq = simulate_freq_rx(paths, pilots, cfg, plan, 0, false);
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK(rel_err(oracle::time_domain_rx(paths, bistatic, pilots, cfg, plan, m), freq[m].y) < 1e-9);
    }
  }
}

TEST_CASE("pilots are unit-modulus on assigned bins only") {
  const auto plan = make_plan(32);
  Rng rng(3);
  const auto p = make_pilots(plan, rng);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t b = 0; b < 32; ++b) {
      CHECK(std::abs(p[m][b]) == doctest::Approx(b % 2 == m ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("receiver noise has the configured variance") {
  const OfdmConfig cfg;
  const auto plan = make_plan(cfg.subcarriers);
  PathList empty;
  Rng rng(5);
  const auto pilots = make_pilots(plan, rng);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& snap : simulate_freq_rx(empty, pilots, cfg, plan, seed)) {
      for (const auto& v : snap.y) sum += std::norm(v);
      n += snap.y.size();
    }
  }
  CHECK(sum / static_cast<double>(n) == doctest::Approx(cfg.noise_variance_w()).epsilon(0.02));
}
