#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "irsense/harness.hpp"

using namespace irsense;

namespace {

ExperimentConfig quick(std::size_t trials) {
  ExperimentConfig c;
  c.trials = trials;
  c.threads = 2;
  c.k_list = {2};
  return c;
}

}  // namespace

TEST_CASE("config parsing keeps defaults for missing keys") {
  std::stringstream ss(R"({"trials": 7, "seed": 99, "k_list": [2, 3],
    "scene": {"irs": [[-60, 60], [70, 60], [0, -70]]},
    "locate": {"tau": 2.0}, "ranging": {"rho": 0.5}})");
  const auto c = parse_config(ss);
  CHECK(c.trials == 7);
  CHECK(c.seed == 99);
  CHECK(c.k_list == std::vector<std::size_t>{2, 3});
  CHECK(c.anchors.irs_count() == 3);
  CHECK(c.locate.tau == 2.0);
  CHECK(c.locate.gn.xi == 16.0);
  CHECK(c.ofdm.subcarriers == 2048);
  CHECK(c.ranging_config().rho == 0.5);
  CHECK(c.locate.weights.sigma_bt == doctest::Approx(0.375 / std::sqrt(3.0)));
}

TEST_CASE("config round trip") {
  auto c = quick(3);
  c.anchors.irs = {{0, 60}, {30, -60}};
  c.locate.tau = 1.25;
  c.ranging.delta1 = 1e-9;
  std::stringstream ss;
  write_config(ss, c);
  const auto d = parse_config(ss);
  CHECK(d.trials == c.trials);
  CHECK(d.anchors.irs == c.anchors.irs);
  CHECK(d.locate.tau == c.locate.tau);
  CHECK(d.ranging.delta1 == c.ranging.delta1);
  CHECK_FALSE(d.ranging.rho.has_value());
}

TEST_CASE("invalid configs are rejected") {
  std::stringstream bad(R"({"trials": 0})");
  CHECK_THROWS(parse_config(bad));
  std::stringstream junk("{not json");
  CHECK_THROWS(parse_config(junk));
}

TEST_CASE("error probability counts") {
  TrialOutcome a;
  a.k = 2;
  a.targets.resize(2);
  a.targets[0].error_m = 0.1;
  a.targets[1].error_m = 0.9;
  TrialOutcome b;
  b.k = 2;
  b.detection_failure = true;
  CHECK(error_probability({a}) == doctest::Approx(0.5));
  CHECK(error_probability({a, b}) == doctest::Approx(0.75));
  CHECK(error_probability({a}, 1.0) == doctest::Approx(0.0));
  CHECK_THROWS(error_probability({}));
}

TEST_CASE("summary statistics") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("parallel_map keeps index order") {
  const auto v = parallel_map<std::size_t>(100, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == i * i);
}

TEST_CASE("trial seeds differ across trials and target counts") {
  CHECK(trial_seed(1, 4, 0) != trial_seed(1, 4, 1));
  CHECK(trial_seed(1, 4, 0) != trial_seed(1, 5, 0));
  CHECK(trial_seed(1, 4, 0) == trial_seed(1, 4, 0));
}

TEST_CASE("outputs are identical across runs and thread counts") {
  auto c = quick(20);
  const auto a = run_trials(c, 3);
  c.threads = 1;
  const auto b = run_trials(c, 3);
  std::stringstream sa, sb, ta, tb;
  write_trials_csv(sa, a);
  write_trials_csv(sb, b);
  write_targets_csv(ta, a);
  write_targets_csv(tb, b);
  CHECK(sa.str() == sb.str());
  CHECK(ta.str() == tb.str());
}

TEST_CASE("quantized K = 2 trials localize reliably") {
  const auto out = run_trials(quick(50), 2);
  CHECK(error_probability(out) < 0.8);
  std::size_t correct = 0;
  for (const auto& o : out) correct += o.association_correct ? 1 : 0;
  CHECK(correct >= 40);
}

TEST_CASE("oracle association does no worse than the search") {
  auto c = quick(50);
  const auto alg = run_trials(c, 3);
  c.oracle = true;
  const auto orc = run_trials(c, 3);
  CHECK(error_probability(orc) <= error_probability(alg));
}

TEST_CASE("echoes beyond the tap window are detection failures") {
  auto c = quick(2);
  c.skip_phase1 = false;
  c.anchors.irs = {{0, 250}};
  const auto out = run_trials(c, 1);
  for (const auto& o : out) {
    CHECK(o.detection_failure);
    CHECK(o.error_count() == 1);
  }
}

TEST_CASE("CSV headers") {
  std::stringstream ss;
  write_trials_csv(ss, {});
  std::string line;
  std::getline(ss, line);
  CHECK(line ==
        "trial,k,seed,detection_failure,association_failure,association_correct,fallback,bar_y,"
        "bar_y_saturated,y_size,searched_size,survivor_size,solver_calls,errors_0p8");
}

TEST_CASE("reference layouts pass the topology check") {
  for (std::size_t r = 1; r <= 3; ++r) {
    Anchors a;
    a.irs = reference_irs_layout(r);
    CHECK(a.irs_count() == r);
    CHECK(check_topology(a).ok());
  }
}
