#include "irsense/association.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace irsense {

const char* to_string(FeasibleStage s) {
  switch (s) {
    case FeasibleStage::none: return "none";
    case FeasibleStage::consistency: return "consistency";
    case FeasibleStage::closest_irs: return "closest-irs";
    case FeasibleStage::residual_pruned: return "residual-pruned";
  }
  return "?";
}

double irs_range_estimate(const RangeSets& sets, const AssociationTuple& t, std::size_t m,
                          const Anchors& anchors) {
  const std::size_t lambda = m == 0 ? t.lambda1 : t.lambda2;
  const std::size_t mu = m == 0 ? t.mu1 : t.mu2;
  return sets.d4.at(m).at(mu) - 0.5 * sets.d3.at(m).at(lambda) - anchors.bs_irs_distance(m, t.gamma);
}

double consistency_gap(const RangeSets& sets, const AssociationTuple& t, const Anchors& anchors) {
  return std::abs(irs_range_estimate(sets, t, 0, anchors) - irs_range_estimate(sets, t, 1, anchors));
}

bool consistency_check(const RangeSets& sets, const AssociationTuple& t, const Anchors& anchors,
                       double tau) {
  if (tau < 0.0) throw std::invalid_argument("consistency_check: tau must be non-negative");
  return consistency_gap(sets, t, anchors) <= tau;
}

namespace {

bool mul_saturating(std::uint64_t& acc, std::uint64_t f) {
  if (f != 0 && acc > std::numeric_limits<std::uint64_t>::max() / f) {
    acc = std::numeric_limits<std::uint64_t>::max();
    return false;
  }
  acc *= f;
  return true;
}

}  // namespace

Cardinality enumerate_bar_Y(std::size_t k, std::size_t r) {
  if (k == 0) throw std::invalid_argument("enumerate_bar_Y: K must be at least 1");
  if (r == 0) throw std::invalid_argument("enumerate_bar_Y: R must be at least 1");
  Cardinality c{1, false};
  for (int rep = 0; rep < 3; ++rep) {
    for (std::size_t i = 2; i <= k; ++i) c.saturated |= !mul_saturating(c.value, i);
  }
  for (std::size_t i = 0; i < k; ++i) c.saturated |= !mul_saturating(c.value, r);
  if (c.saturated) c.value = std::numeric_limits<std::uint64_t>::max();
  return c;
}

std::vector<std::size_t> closest_irs_candidates(const Anchors& anchors, const RangeSets& sets,
                                                std::size_t lambda1, std::size_t lambda2,
                                                double slack) {
  const double r1 = 0.5 * sets.d3.at(0).at(lambda1);
  const double r2 = 0.5 * sets.d3.at(1).at(lambda2);
  std::vector<std::size_t> out;
  for (const auto& p : circle_intersect_relaxed(anchors.bs[0], anchors.bs[1], r1, r2, slack)) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < anchors.irs_count(); ++r) best = std::min(best, distance(p, anchors.irs[r]));
    const double tie = 1e-9 * std::max(1.0, best);
    for (std::size_t r = 0; r < anchors.irs_count(); ++r) {
      if (distance(p, anchors.irs[r]) <= best + tie) out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

struct Candidate {
  AssociationTuple tuple;
  double gap;
};

// Admissible tuples per target (lambda1 = k), ordered by consistency gap.
std::vector<std::vector<Candidate>> admissible_tuples(const RangeSets& sets, const Anchors& anchors,
                                                      const FeasibleOptions& opt) {
  const std::size_t k = sets.size();
  if (!sets.balanced(k)) {
    throw std::invalid_argument("build_feasible: range sets must all hold K entries");
  }
  if (k > 64) throw std::invalid_argument("build_feasible: at most 64 targets supported");
  if (opt.tau < 0.0) throw std::invalid_argument("build_feasible: tau must be non-negative");
  const std::size_t r_count = anchors.irs_count();

  std::vector<std::vector<Candidate>> out(k);
  for (std::size_t l1 = 0; l1 < k; ++l1) {
    for (std::size_t l2 = 0; l2 < k; ++l2) {
      std::vector<std::size_t> gammas;
      if (opt.use_closest_irs) {
        gammas = closest_irs_candidates(anchors, sets, l1, l2, opt.circle_slack);
      } else {
        gammas.resize(r_count);
        std::iota(gammas.begin(), gammas.end(), std::size_t{0});
      }
      for (auto g : gammas) {
        for (std::size_t m1 = 0; m1 < k; ++m1) {
          for (std::size_t m2 = 0; m2 < k; ++m2) {
            const AssociationTuple t{l1, l2, m1, m2, g};
            const double gap = consistency_gap(sets, t, anchors);
            if (gap <= opt.tau) out[l1].push_back({t, gap});
          }
        }
      }
    }
    std::stable_sort(out[l1].begin(), out[l1].end(),
                     [](const Candidate& a, const Candidate& b) { return a.gap < b.gap; });
  }
  return out;
}

struct Search {
  const std::vector<std::vector<Candidate>>& cands;
  std::size_t limit;
  std::vector<AssociationSolution>* sink;  // null when counting
  std::uint64_t count{0};
  AssociationSolution current;

  bool done() const { return sink != nullptr && sink->size() >= limit; }

  void run(std::size_t k, std::uint64_t used2, std::uint64_t used_m1, std::uint64_t used_m2) {
    if (k == cands.size()) {
      ++count;
      if (sink != nullptr) sink->push_back(current);
      return;
    }
    for (const auto& c : cands[k]) {
      const auto b2 = std::uint64_t{1} << c.tuple.lambda2;
      const auto b3 = std::uint64_t{1} << c.tuple.mu1;
      const auto b4 = std::uint64_t{1} << c.tuple.mu2;
      if ((used2 & b2) || (used_m1 & b3) || (used_m2 & b4)) continue;
      current.push_back(c.tuple);
      run(k + 1, used2 | b2, used_m1 | b3, used_m2 | b4);
      current.pop_back();
      if (done()) return;
    }
  }
};

std::vector<FeasibleStage> provenance_of(const FeasibleOptions& opt) {
  std::vector<FeasibleStage> p;
  if (std::isfinite(opt.tau)) p.push_back(FeasibleStage::consistency);
  if (opt.use_closest_irs) p.push_back(FeasibleStage::closest_irs);
  if (p.empty()) p.push_back(FeasibleStage::none);
  return p;
}

}  // namespace

FeasibleSet build_feasible(const RangeSets& sets, const Anchors& anchors,
                           const FeasibleOptions& options) {
  const auto cands = admissible_tuples(sets, anchors, options);
  FeasibleSet out;
  out.provenance = provenance_of(options);
  if (options.max_solutions == 0) return out;
  Search s{cands, options.max_solutions, &out.solutions, 0, {}};
  s.run(0, 0, 0, 0);
  std::sort(out.solutions.begin(), out.solutions.end());
  return out;
}

std::uint64_t count_feasible(const RangeSets& sets, const Anchors& anchors,
                             const FeasibleOptions& options) {
  const auto cands = admissible_tuples(sets, anchors, options);
  Search s{cands, 0, nullptr, 0, {}};
  s.run(0, 0, 0, 0);
  return s.count;
}

namespace {

// Rank of each target's value in ascending order; equal values keep target order.
std::vector<std::size_t> ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::size_t> rank(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  return rank;
}

}  // namespace

AssociationSolution true_association(const Scene& scene, const RangeSets& sets) {
  const std::size_t k = scene.target_count();
  if (!sets.balanced(k)) throw std::invalid_argument("true_association: range sets must hold K entries");
  std::array<std::vector<double>, 2> d3, d4;
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d_bt = scene.bs_target_distance(m, j);
      d3[m].push_back(2.0 * d_bt);
      d4[m].push_back(d_bt + scene.irs_target_distance(j) +
                      scene.anchors.bs_irs_distance(m, scene.true_gamma[j]));
    }
  }
  const auto l1 = ranks(d3[0]);
  const auto l2 = ranks(d3[1]);
  const auto m1 = ranks(d4[0]);
  const auto m2 = ranks(d4[1]);
  AssociationSolution sol(k);
  for (std::size_t j = 0; j < k; ++j) sol[l1[j]] = {l1[j], l2[j], m1[j], m2[j], scene.true_gamma[j]};
  return sol;
}

bool equivalent_solutions(const RangeSets& sets, const AssociationSolution& a,
                          const AssociationSolution& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& x = a[k];
    const auto& y = b[k];
    if (x.gamma != y.gamma) return false;
    if (sets.d3[0].at(x.lambda1) != sets.d3[0].at(y.lambda1)) return false;
    if (sets.d3[1].at(x.lambda2) != sets.d3[1].at(y.lambda2)) return false;
    if (sets.d4[0].at(x.mu1) != sets.d4[0].at(y.mu1)) return false;
    if (sets.d4[1].at(x.mu2) != sets.d4[1].at(y.mu2)) return false;
  }
  return true;
}

void write_feasible_csv(std::ostream& os, const FeasibleSet& set) {
  os << "solution,target,lambda1,lambda2,mu1,mu2,gamma\n";
  for (std::size_t s = 0; s < set.solutions.size(); ++s) {
    for (std::size_t k = 0; k < set.solutions[s].size(); ++k) {
      const auto& t = set.solutions[s][k];
      os << s << ',' << k << ',' << t.lambda1 << ',' << t.lambda2 << ',' << t.mu1 << ',' << t.mu2
         << ',' << t.gamma << '\n';
    }
  }
}

}  // namespace irsense
