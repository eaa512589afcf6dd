#include "irsense/locate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace irsense {

void ResidualWeights::validate() const {
  if (!(sigma_bt > 0.0) || !(sigma_it > 0.0)) {
    throw std::invalid_argument("ResidualWeights: sigmas must be positive");
  }
}

ResidualWeights ResidualWeights::from_ofdm(const OfdmConfig& cfg) {
  const double s = 0.5 * cfg.range_cell_m() / std::sqrt(3.0);
  return {s, s};
}

void GnConfig::validate() const {
  if (!(xi > 0.0)) throw std::invalid_argument("GnConfig: xi must be positive");
  if (max_iters == 0) throw std::invalid_argument("GnConfig: max_iters must be positive");
  if (!(step_tol > 0.0)) throw std::invalid_argument("GnConfig: step_tol must be positive");
  if (!(damping >= 0.0)) throw std::invalid_argument("GnConfig: damping must be non-negative");
}

void LocateOptions::validate() const {
  if (!(tau >= 0.0)) throw std::invalid_argument("LocateOptions: tau must be non-negative");
  if (!(circle_slack >= 0.0)) throw std::invalid_argument("LocateOptions: circle_slack must be non-negative");
  weights.validate();
  gn.validate();
}

RangeProblem make_observation(const RangeSets& sets, const AssociationTuple& t,
                              const Anchors& anchors, const ResidualWeights& w) {
  RangeProblem obs;
  const Point2D irs = anchors.irs.at(t.gamma);
  obs.anchor = {anchors.bs[0], anchors.bs[1], irs, irs};
  obs.range = {0.5 * sets.d3.at(0).at(t.lambda1), 0.5 * sets.d3.at(1).at(t.lambda2),
               irs_range_estimate(sets, t, 0, anchors), irs_range_estimate(sets, t, 1, anchors)};
  obs.sigma = {w.sigma_bt, w.sigma_bt, w.sigma_it, w.sigma_it};
  return obs;
}

Eigen::VectorXd residual_vector(const RangeProblem& obs, Point2D pos) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    r[static_cast<Eigen::Index>(i)] = (obs.range[i] - distance(pos, obs.anchor[i])) / obs.sigma[i];
  }
  return r;
}

std::array<double, 4> residual_terms(Point2D pos, const RangeSets& sets, const AssociationTuple& t,
                                     const Anchors& anchors, const ResidualWeights& w) {
  const auto r = residual_vector(make_observation(sets, t, anchors, w), pos);
  return {r[0] * r[0], r[1] * r[1], r[2] * r[2], r[3] * r[3]};
}

Eigen::MatrixX2d residual_jacobian(const RangeProblem& obs, Point2D pos) {
  Eigen::MatrixX2d j = Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(obs.size()), 2);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Point2D d = pos - obs.anchor[i];
    const double n = std::hypot(d.x, d.y);
    if (n == 0.0) continue;
    const auto row = static_cast<Eigen::Index>(i);
    j(row, 0) = -d.x / (n * obs.sigma[i]);
    j(row, 1) = -d.y / (n * obs.sigma[i]);
  }
  return j;
}

double objective(const RangeProblem& obs, Point2D pos) {
  return residual_vector(obs, pos).squaredNorm();
}

LocEstimate solve_range_problem(const RangeProblem& obs, const GnConfig& cfg, Point2D init) {
  if (!is_finite(init)) throw std::invalid_argument("solve_range_problem: non-finite initial point");
  if (obs.range.size() != obs.size() || obs.sigma.size() != obs.size()) {
    throw std::invalid_argument("solve_range_problem: inconsistent problem sizes");
  }
  LocEstimate est;
  Point2D p = init;
  Eigen::VectorXd r = residual_vector(obs, p);
  double f = r.squaredNorm();
  double mu = cfg.damping;

  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const Eigen::MatrixX2d j = residual_jacobian(obs, p);
    const Eigen::Vector2d g = j.transpose() * r;
    if (f == 0.0 || g.norm() == 0.0) {
      est.converged = true;
      break;
    }
    const Eigen::Matrix2d h = j.transpose() * j;
    bool accepted = false;
    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    while (mu <= 1e12) {
      const Eigen::Matrix2d a = h + mu * Eigen::Matrix2d::Identity();
      step = a.ldlt().solve(-g);
      const Point2D q{p.x + step[0], p.y + step[1]};
      Eigen::VectorXd rq = residual_vector(obs, q);
      const double fq = rq.squaredNorm();
      if (std::isfinite(fq) && fq <= f) {
        p = q;
        r = std::move(rq);
        f = fq;
        mu = std::max(mu * 0.1, cfg.damping);
        accepted = true;
        break;
      }
      mu = std::max(mu * 10.0, 1e-12);
    }
    est.iterations = it + 1;
    // No descent left at any damping: p is stationary to working precision.
    if (!accepted || step.norm() < cfg.step_tol) {
      est.converged = true;
      break;
    }
  }
  est.position = p;
  est.residual = f;
  return est;
}

LocEstimate gauss_newton_solve(const RangeSets& sets, const AssociationTuple& t,
                               const Anchors& anchors, const ResidualWeights& w,
                               const GnConfig& cfg, Point2D init) {
  auto est = solve_range_problem(make_observation(sets, t, anchors, w), cfg, init);
  est.tuple = t;
  return est;
}

Point2D initial_guess(const RangeSets& sets, const AssociationTuple& t, const Anchors& anchors,
                      const ResidualWeights& w, double circle_slack) {
  const auto pts = circle_intersect_relaxed(anchors.bs[0], anchors.bs[1], 0.5 * sets.d3.at(0).at(t.lambda1),
                                            0.5 * sets.d3.at(1).at(t.lambda2), circle_slack);
  const Point2D irs = anchors.irs.at(t.gamma);
  if (pts.empty()) return irs;

  const auto obs = make_observation(sets, t, anchors, w);
  bool found = false;
  Point2D best{};
  double best_f = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& q : anchors.irs) nearest = std::min(nearest, distance(p, q));
    if (distance(p, irs) > nearest + 1e-9 * std::max(1.0, nearest)) continue;
    const double f = objective(obs, p);
    if (f < best_f) {
      best_f = f;
      best = p;
      found = true;
    }
  }
  if (found) return best;
  return 0.5 * (pts[0] + pts[1]);
}

TupleCache::TupleCache(const RangeSets& sets, const Anchors& anchors, const LocateOptions& opt)
    : sets_(sets), anchors_(anchors), opt_(opt) {}

const LocEstimate& TupleCache::get(const AssociationTuple& t) {
  if (opt_.use_cache) {
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
  }
  ++calls_;
  const Point2D init = initial_guess(sets_, t, anchors_, opt_.weights, opt_.circle_slack);
  auto est = gauss_newton_solve(sets_, t, anchors_, opt_.weights, opt_.gn, init);
  if (!opt_.use_cache) {
    scratch_ = est;
    return scratch_;
  }
  return memo_.emplace(t, est).first->second;
}

namespace {

LocalizationResult search(const RangeSets& sets, const Anchors& anchors, const LocateOptions& opt,
                          bool closest_irs) {
  opt.validate();
  FeasibleOptions fo;
  fo.tau = opt.tau;
  fo.use_closest_irs = closest_irs;
  fo.circle_slack = opt.circle_slack;
  fo.max_solutions = opt.max_solutions;
  const auto feasible = build_feasible(sets, anchors, fo);

  LocalizationResult res;
  res.feasible_size = feasible.size();
  res.truncated = feasible.size() >= opt.max_solutions;
  if (feasible.solutions.empty()) return res;

  TupleCache cache(sets, anchors, opt);
  const double xi = opt.gn.xi;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<LocEstimate> best_est;
  std::size_t best_idx = 0;
  std::vector<LocEstimate> est;

  // Evaluates solution s; with pruning it stops at the first tuple above xi.
  auto evaluate = [&](const AssociationSolution& s, bool stop_early, bool& pass) {
    est.clear();
    pass = true;
    double total = 0.0;
    for (const auto& t : s) {
      const auto& e = cache.get(t);
      if (e.residual > xi) {
        pass = false;
        if (stop_early) return total;
      }
      total += e.residual;
      est.push_back(e);
    }
    return total;
  };

  for (std::size_t i = 0; i < feasible.solutions.size(); ++i) {
    bool pass = false;
    const double total = evaluate(feasible.solutions[i], opt.prune, pass);
    if (pass) ++res.survivor_size;
    if ((pass || !opt.prune) && total < best_total) {
      best_total = total;
      best_idx = i;
      best_est = est;
    }
  }
  if (best_est.empty()) {
    res.fallback = true;
    for (std::size_t i = 0; i < feasible.solutions.size(); ++i) {
      bool pass = false;
      const double total = evaluate(feasible.solutions[i], false, pass);
      if (total < best_total) {
        best_total = total;
        best_idx = i;
        best_est = est;
      }
    }
  }
  res.ok = true;
  res.association = feasible.solutions[best_idx];
  res.estimates = std::move(best_est);
  res.total_residual = best_total;
  res.solver_calls = cache.solver_calls();
  return res;
}

}  // namespace

LocalizationResult solve_single_irs(const RangeSets& sets, const Anchors& anchors,
                                    const LocateOptions& opt) {
  if (anchors.irs_count() != 1) throw std::invalid_argument("solve_single_irs: requires exactly one IRS");
  return search(sets, anchors, opt, false);
}

LocalizationResult solve_multi_irs(const RangeSets& sets, const Anchors& anchors,
                                   const LocateOptions& opt) {
  if (anchors.irs_count() == 1) return solve_single_irs(sets, anchors, opt);
  return search(sets, anchors, opt, true);
}

LocalizationResult solve_with_association(const RangeSets& sets, const Anchors& anchors,
                                          const AssociationSolution& association,
                                          const LocateOptions& opt) {
  opt.validate();
  LocalizationResult res;
  res.ok = !association.empty();
  res.association = association;
  res.feasible_size = 1;
  TupleCache cache(sets, anchors, opt);
  bool pass = true;
  for (const auto& t : association) {
    const auto& e = cache.get(t);
    pass = pass && e.residual <= opt.gn.xi;
    res.total_residual += e.residual;
    res.estimates.push_back(e);
  }
  res.survivor_size = pass ? 1 : 0;
  res.solver_calls = cache.solver_calls();
  return res;
}

}  // namespace irsense
