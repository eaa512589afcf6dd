#include <set>

#include "doctest.h"
#include "irsense/scene.hpp"

using namespace irsense;

namespace {

Anchors with_irs(std::vector<Point2D> irs) {
  Anchors a;
  a.irs = std::move(irs);
  return a;
}

}  // namespace

TEST_CASE("check_topology on reference placements") {
  auto r = check_topology(with_irs({{0, 60}, {0, -60}}));
  CHECK_FALSE(r.c1_ok);
  CHECK(r.c2_ok);
  REQUIRE(r.offending_pairs.size() == 1);

  r = check_topology(with_irs({{0, 60}, {30, -60}}));
  CHECK(r.ok());

  r = check_topology(with_irs({{80, -60}, {80, 60}}));
  CHECK(r.c1_ok);
  CHECK_FALSE(r.c2_ok);

  CHECK(check_topology(with_irs({{80, -60}, {120, -60}})).ok());
  CHECK(check_topology(with_irs({{0, 40}})).ok());
  CHECK(check_topology(with_irs({{-60, 60}, {70, 60}, {0, -70}})).ok());
}

TEST_CASE("mirrored pair across the bisector violates C1") {
  CHECK_FALSE(check_topology(with_irs({{0, 25}, {0, 75}})).c1_ok);
}

TEST_CASE("anchors validation") {
  CHECK_THROWS(with_irs({}).validate());
  CHECK_THROWS(with_irs({{1, 1}, {1, 1}}).validate());
  CHECK_NOTHROW(with_irs({{1, 1}}).validate());
}

TEST_CASE("sample_targets preconditions") {
  const auto a = with_irs({{0, 40}});
  CHECK_THROWS(sample_targets(a, 0, 50, 1));
  CHECK_THROWS(sample_targets(a, 2, 0, 1));
}

TEST_CASE("sample_targets stays in the half-disk toward the BS axis") {
  const auto a = with_irs({{0, 40}});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = sample_targets(a, 5, 50, seed);
    CHECK_NOTHROW(s.validate());
    for (const auto& t : s.targets) {
      CHECK(distance(t, {0, 40}) <= 50.0 + 1e-9);
      CHECK(t.y <= 40.0 + 1e-9);
    }
  }
}

TEST_CASE("sample_targets is deterministic") {
  const auto a = with_irs({{-60, 60}, {70, 60}, {0, -70}});
  const auto s1 = sample_targets(a, 6, 50, 42);
  const auto s2 = sample_targets(a, 6, 50, 42);
  CHECK(s1.targets == s2.targets);
  CHECK(s1.true_gamma == s2.true_gamma);
}

TEST_CASE("every sampled target is served by its nearest IRS") {
  const auto a = with_irs({{-60, 60}, {70, 60}, {0, -70}});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sample_targets(a, 8, 50, seed);
    for (std::size_t k = 0; k < s.target_count(); ++k) {
      for (std::size_t r = 0; r < a.irs_count(); ++r) {
        CHECK(distance(s.targets[k], a.irs[s.true_gamma[k]]) <= distance(s.targets[k], a.irs[r]));
      }
    }
  }
}

TEST_CASE("round-trip delay cells are distinct per BS") {
  const auto a = with_irs({{0, 40}});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sample_targets(a, 7, 50, seed);
    for (std::size_t m = 0; m < 2; ++m) {
      std::set<std::size_t> cells;
      for (std::size_t k = 0; k < s.target_count(); ++k) {
        cells.insert(delay_index(2.0 * s.bs_target_distance(m, k), 400e6, 3e8));
      }
      CHECK(cells.size() == s.target_count());
    }
  }
}

TEST_CASE("separate_all_echoes keeps every monostatic echo in its own cell") {
  const auto a = with_irs({{0, 40}});
  SamplerOptions opt;
  opt.separate_all_echoes = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sample_targets(a, 3, 50, seed, opt);
    for (std::size_t m = 0; m < 2; ++m) {
      std::set<std::size_t> cells{delay_index(2.0 * a.bs_irs_distance(m, 0), 400e6, 3e8)};
      for (std::size_t k = 0; k < s.target_count(); ++k) {
        const double d = s.bs_target_distance(m, k);
        cells.insert(delay_index(2.0 * d, 400e6, 3e8));
        cells.insert(delay_index(d + s.irs_target_distance(k) + a.bs_irs_distance(m, 0), 400e6, 3e8));
      }
      CHECK(cells.size() == 1 + 2 * s.target_count());
    }
  }
}
