#include "irsense/harness.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include "irsense/baseline.hpp"
#include "irsense/ranging.hpp"

namespace irsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// True target indices ordered by distance to `anchor`.
std::vector<std::size_t> order_by_distance(const Scene& scene, Point2D anchor) {
  std::vector<std::size_t> order(scene.target_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return distance(anchor, scene.targets[a]) < distance(anchor, scene.targets[b]);
  });
  return order;
}

Scene trial_scene(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t k) {
  return sample_targets(cfg.anchors, k, cfg.target_radius, derive_seed(seed, 1), cfg.sampler);
}

void mark_all_failed(TrialOutcome& o, const Scene& scene) {
  const auto order = order_by_distance(scene, scene.anchors.bs[0]);
  o.targets.clear();
  for (std::size_t k = 0; k < order.size(); ++k) {
    TargetOutcome t;
    t.true_index = order[k];
    t.truth = scene.targets[order[k]];
    t.estimate = {std::nan(""), std::nan("")};
    t.error_m = kInf;
    o.targets.push_back(t);
  }
}

}  // namespace

std::size_t TrialOutcome::error_count(double radius_m) const {
  if (detection_failure || association_failure) return k;
  std::size_t n = 0;
  for (const auto& t : targets) n += t.error_m > radius_m ? 1 : 0;
  return n;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t k, std::size_t index) {
  return derive_seed(master, 0x6b00 + k, index);
}

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t k, std::size_t index) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialOutcome o;
  o.trial = index;
  o.k = k;
  o.seed = trial_seed(cfg.seed, k, index);
  const Scene scene = trial_scene(cfg, o.seed, k);
  o.bar_y = enumerate_bar_Y(k, cfg.anchors.irs_count());

  RangeSets sets;
  if (cfg.skip_phase1) {
    sets = quantized_range_sets(scene, cfg.ofdm);
  } else {
    try {
      sets = run_phase_one(scene, cfg.ofdm, cfg.ranging_config(), derive_seed(o.seed, 2), cfg.add_noise).sets;
    } catch (const OutOfWindowError&) {
      o.detection_failure = true;
    }
  }
  if (o.detection_failure || !sets.balanced(k)) {
    o.detection_failure = true;
    mark_all_failed(o, scene);
    o.wall_ms = elapsed_ms(t0);
    return o;
  }

  FeasibleOptions fo;
  fo.tau = cfg.locate.tau;
  o.y_size = count_feasible(sets, cfg.anchors, fo);

  const auto truth = true_association(scene, sets);
  const auto res = cfg.oracle ? solve_with_association(sets, cfg.anchors, truth, cfg.locate)
                              : solve_multi_irs(sets, cfg.anchors, cfg.locate);
  o.searched_size = res.feasible_size;
  o.survivor_size = res.survivor_size;
  o.solver_calls = res.solver_calls;
  o.fallback = res.fallback;
  if (!res.ok) {
    o.association_failure = true;
    mark_all_failed(o, scene);
    o.wall_ms = elapsed_ms(t0);
    return o;
  }
  o.association_correct = equivalent_solutions(sets, res.association, truth);

  const auto order = order_by_distance(scene, scene.anchors.bs[0]);
  for (std::size_t i = 0; i < k; ++i) {
    TargetOutcome t;
    t.true_index = order[i];
    t.truth = scene.targets[order[i]];
    t.estimate = res.estimates[i].position;
    t.residual = res.estimates[i].residual;
    t.tuple = res.association[i];
    t.error_m = distance(t.estimate, t.truth);
    o.targets.push_back(t);
  }
  o.wall_ms = elapsed_ms(t0);
  return o;
}

double error_probability(const std::vector<TrialOutcome>& outcomes, double radius_m) {
  if (outcomes.empty()) throw std::invalid_argument("error_probability: no outcomes");
  std::size_t errors = 0;
  std::size_t total = 0;
  for (const auto& o : outcomes) {
    errors += o.error_count(radius_m);
    total += o.k;
  }
  return static_cast<double>(errors) / static_cast<double>(total);
}

std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg, std::size_t k) {
  return parallel_map<TrialOutcome>(cfg.trials, cfg.threads,
                                    [&](std::size_t i) { return run_trial(cfg, k, i); });
}

Stat summarize(const std::vector<double>& v) {
  Stat s;
  if (v.empty()) return s;
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

CardinalityRow summarize_trials(const ExperimentConfig& cfg, std::size_t k,
                                const std::vector<TrialOutcome>& outcomes) {
  CardinalityRow row;
  row.k = k;
  row.r = cfg.anchors.irs_count();
  row.bar_y = enumerate_bar_Y(k, row.r);
  row.trials = outcomes.size();
  std::vector<double> y, searched, survivors, calls;
  for (const auto& o : outcomes) {
    if (o.detection_failure) {
      ++row.detection_failures;
      continue;
    }
    if (!o.association_correct) ++row.association_errors;
    y.push_back(static_cast<double>(o.y_size));
    searched.push_back(static_cast<double>(o.searched_size));
    survivors.push_back(static_cast<double>(o.survivor_size));
    calls.push_back(static_cast<double>(o.solver_calls));
  }
  row.y = summarize(y);
  row.searched = summarize(searched);
  row.survivors = summarize(survivors);
  row.solver_calls = summarize(calls);
  row.error_probability = error_probability(outcomes);
  return row;
}

std::vector<CardinalityRow> cardinality_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<CardinalityRow> rows;
  for (auto k : cfg.k_list) rows.push_back(summarize_trials(cfg, k, run_trials(cfg, k)));
  return rows;
}

namespace {

struct BaselineTrial {
  TrialOutcome irs;
  TrialOutcome irs_oracle;
  std::size_t bs3_errors{0};
  std::size_t bs3_oracle_errors{0};
  std::size_t bs3_calls{0};
  double bs3_wall_ms{0.0};
};

std::size_t count_bs3_errors(const ThreeBsResult& res, const std::vector<std::size_t>& order,
                             const Scene& scene) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    n += distance(res.estimates[k].position, scene.targets[order[k]]) > 0.8 ? 1 : 0;
  }
  return n;
}

}  // namespace

std::vector<BaselineRow> baseline_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.anchors.irs_count() != 1) {
    throw std::invalid_argument("baseline_experiment: requires a single-IRS configuration");
  }
  ExperimentConfig scheme = cfg;
  scheme.skip_phase1 = true;
  scheme.oracle = false;
  ExperimentConfig upper = scheme;
  upper.oracle = true;

  std::vector<BaselineRow> rows;
  for (auto k : cfg.k_list) {
    const auto trials = parallel_map<BaselineTrial>(cfg.trials, cfg.threads, [&](std::size_t i) {
      BaselineTrial b;
      b.irs = run_trial(scheme, k, i);
      b.irs_oracle = run_trial(upper, k, i);
      const Scene scene = trial_scene(cfg, b.irs.seed, k);
      const auto ranges = three_bs_ranges(scene, cfg.ofdm);
      const auto order = order_by_distance(scene, scene.anchors.bs[0]);
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = solve_three_bs(ranges, cfg.locate.weights, cfg.locate.gn);
      b.bs3_wall_ms = elapsed_ms(t0);
      b.bs3_calls = res.solver_calls;
      b.bs3_errors = count_bs3_errors(res, order, scene);
      const auto oracle = solve_three_bs_oracle(ranges, scene, cfg.locate.weights, cfg.locate.gn);
      b.bs3_oracle_errors = count_bs3_errors(oracle, order, scene);
      return b;
    });

    BaselineRow row;
    row.k = k;
    row.trials = trials.size();
    std::vector<TrialOutcome> irs, irs_oracle;
    std::vector<double> irs_calls, bs3_calls, irs_ms, bs3_ms;
    std::size_t bs3_err = 0, bs3_oracle_err = 0;
    for (const auto& b : trials) {
      irs.push_back(b.irs);
      irs_oracle.push_back(b.irs_oracle);
      irs_calls.push_back(static_cast<double>(b.irs.solver_calls));
      bs3_calls.push_back(static_cast<double>(b.bs3_calls));
      irs_ms.push_back(b.irs.wall_ms);
      bs3_ms.push_back(b.bs3_wall_ms);
      bs3_err += b.bs3_errors;
      bs3_oracle_err += b.bs3_oracle_errors;
    }
    const double total = static_cast<double>(k * trials.size());
    row.irs_error_probability = error_probability(irs);
    row.irs_oracle_error_probability = error_probability(irs_oracle);
    row.irs_solver_calls = summarize(irs_calls);
    row.bs3_error_probability = static_cast<double>(bs3_err) / total;
    row.bs3_oracle_error_probability = static_cast<double>(bs3_oracle_err) / total;
    row.bs3_solver_calls = summarize(bs3_calls);
    row.irs_wall_ms = summarize(irs_ms);
    row.bs3_wall_ms = summarize(bs3_ms);
    rows.push_back(row);
  }
  return rows;
}

std::vector<TopologyRow> topology_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto variants = cfg.topology.empty() ? default_topology_variants() : cfg.topology;
  std::vector<TopologyRow> rows;
  for (const auto& v : variants) {
    ExperimentConfig c = cfg;
    c.anchors.irs = v.irs;
    const auto report = check_topology(c.anchors);
    for (auto k : cfg.k_list) {
      const auto outcomes = run_trials(c, k);
      TopologyRow row;
      row.variant = v.name;
      row.r = v.irs.size();
      row.c1_ok = report.c1_ok;
      row.c2_ok = report.c2_ok;
      row.k = k;
      row.trials = outcomes.size();
      row.error_probability = error_probability(outcomes);
      std::size_t wrong = 0;
      std::vector<double> y;
      for (const auto& o : outcomes) {
        wrong += o.association_correct ? 0 : 1;
        y.push_back(static_cast<double>(o.y_size));
      }
      row.association_error_rate = static_cast<double>(wrong) / static_cast<double>(outcomes.size());
      row.y = summarize(y);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<Point2D> reference_irs_layout(std::size_t r) {
  switch (r) {
    case 1: return {{0.0, 40.0}};
    case 2: return {{-60.0, 40.0}, {70.0, 40.0}};
    case 3: return {{-60.0, 60.0}, {70.0, 60.0}, {0.0, -70.0}};
    default: throw std::invalid_argument("reference_irs_layout: R must be 1, 2 or 3");
  }
}

std::vector<Theorem1Row> theorem1_check(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Theorem1Row> rows;
  for (auto k : cfg.k_list) {
    for (std::size_t r = 1; r <= 3; ++r) {
      ExperimentConfig c = cfg;
      c.anchors.irs = reference_irs_layout(r);
      LocateOptions lo = cfg.locate;
      lo.tau = 1e-9;
      struct One {
        bool unique_correct{false};
        double err{0.0};
      };
      const auto res = parallel_map<One>(cfg.trials, cfg.threads, [&](std::size_t i) {
        const auto seed = derive_seed(trial_seed(cfg.seed, k, i), r);
        const Scene scene = trial_scene(c, seed, k);
        const auto sets = exact_range_sets(scene);
        FeasibleOptions fo;
        fo.tau = 1e-9;
        fo.max_solutions = 2;
        const auto fs = build_feasible(sets, c.anchors, fo);
        const auto truth = true_association(scene, sets);
        One out;
        if (fs.size() != 1 || fs.solutions[0] != truth) return out;
        out.unique_correct = true;
        const auto loc = solve_with_association(sets, c.anchors, truth, lo);
        const auto order = order_by_distance(scene, scene.anchors.bs[0]);
        for (std::size_t j = 0; j < k; ++j) {
          out.err = std::max(out.err, distance(loc.estimates[j].position, scene.targets[order[j]]));
        }
        return out;
      });
      Theorem1Row row;
      row.k = k;
      row.r = r;
      row.scenes = res.size();
      for (const auto& o : res) {
        row.unique_correct += o.unique_correct ? 1 : 0;
        if (o.unique_correct) row.max_position_error_m = std::max(row.max_position_error_m, o.err);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

void write_stat(std::ostream& os, const Stat& s) { os << ',' << s.mean << ',' << s.stderr_; }

}  // namespace

void write_trials_csv(std::ostream& os, const std::vector<TrialOutcome>& outcomes) {
  os << std::setprecision(10);
  os << "trial,k,seed,detection_failure,association_failure,association_correct,fallback,"
        "bar_y,bar_y_saturated,y_size,searched_size,survivor_size,solver_calls,errors_0p8\n";
  for (const auto& o : outcomes) {
    os << o.trial << ',' << o.k << ',' << o.seed << ',' << o.detection_failure << ','
       << o.association_failure << ',' << o.association_correct << ',' << o.fallback << ','
       << o.bar_y.value << ',' << o.bar_y.saturated << ',' << o.y_size << ',' << o.searched_size
       << ',' << o.survivor_size << ',' << o.solver_calls << ',' << o.error_count() << '\n';
  }
}

void write_targets_csv(std::ostream& os, const std::vector<TrialOutcome>& outcomes) {
  os << std::setprecision(10);
  os << "trial,target,x_hat,y_hat,residual,lambda1,lambda2,mu1,mu2,gamma,true_index,true_x,true_y,"
        "error_m\n";
  for (const auto& o : outcomes) {
    for (std::size_t k = 0; k < o.targets.size(); ++k) {
      const auto& t = o.targets[k];
      os << o.trial << ',' << k << ',' << t.estimate.x << ',' << t.estimate.y << ',' << t.residual
         << ',' << t.tuple.lambda1 << ',' << t.tuple.lambda2 << ',' << t.tuple.mu1 << ','
         << t.tuple.mu2 << ',' << t.tuple.gamma << ',' << t.true_index << ',' << t.truth.x << ','
         << t.truth.y << ',' << t.error_m << '\n';
    }
  }
}

void write_cardinality_csv(std::ostream& os, const std::vector<CardinalityRow>& rows) {
  os << std::setprecision(10);
  os << "k,r,bar_y,bar_y_saturated,mean_y,se_y,mean_searched,se_searched,mean_survivors,"
        "se_survivors,mean_solver_calls,se_solver_calls,error_probability,trials,"
        "detection_failures,association_errors\n";
  for (const auto& r : rows) {
    os << r.k << ',' << r.r << ',' << r.bar_y.value << ',' << r.bar_y.saturated;
    write_stat(os, r.y);
    write_stat(os, r.searched);
    write_stat(os, r.survivors);
    write_stat(os, r.solver_calls);
    os << ',' << r.error_probability << ',' << r.trials << ',' << r.detection_failures << ','
       << r.association_errors << '\n';
  }
}

void write_baseline_csv(std::ostream& os, const std::vector<BaselineRow>& rows) {
  os << std::setprecision(10);
  os << "k,trials,irs_error_probability,irs_oracle_error_probability,mean_irs_solver_calls,"
        "se_irs_solver_calls,bs3_error_probability,bs3_oracle_error_probability,"
        "mean_bs3_solver_calls,se_bs3_solver_calls\n";
  for (const auto& r : rows) {
    os << r.k << ',' << r.trials << ',' << r.irs_error_probability << ','
       << r.irs_oracle_error_probability;
    write_stat(os, r.irs_solver_calls);
    os << ',' << r.bs3_error_probability << ',' << r.bs3_oracle_error_probability;
    write_stat(os, r.bs3_solver_calls);
    os << '\n';
  }
}

void write_topology_csv(std::ostream& os, const std::vector<TopologyRow>& rows) {
  os << std::setprecision(10);
  os << "variant,r,c1_ok,c2_ok,k,trials,error_probability,association_error_rate,mean_y,se_y\n";
  for (const auto& r : rows) {
    os << r.variant << ',' << r.r << ',' << r.c1_ok << ',' << r.c2_ok << ',' << r.k << ','
       << r.trials << ',' << r.error_probability << ',' << r.association_error_rate;
    write_stat(os, r.y);
    os << '\n';
  }
}

void write_theorem1_csv(std::ostream& os, const std::vector<Theorem1Row>& rows) {
  os << std::setprecision(10);
  os << "k,r,scenes,unique_correct,max_position_error_m\n";
  for (const auto& r : rows) {
    os << r.k << ',' << r.r << ',' << r.scenes << ',' << r.unique_correct << ','
       << r.max_position_error_m << '\n';
  }
}

void print_cardinality_table(std::ostream& os, const std::vector<CardinalityRow>& rows) {
  os << std::left << std::setw(4) << "K" << std::setw(4) << "R" << std::setw(22) << "|Ybar|"
     << std::setw(18) << "mean |Y|" << std::setw(18) << "mean searched" << std::setw(18)
     << "mean survivors" << std::setw(14) << "solves" << std::setw(10) << "P_err"
     << "det.fail\n";
  for (const auto& r : rows) {
    os << std::setw(4) << r.k << std::setw(4) << r.r << std::setw(22)
       << (r.bar_y.saturated ? std::string(">2^64") : std::to_string(r.bar_y.value))
       << std::setw(18) << std::fixed << std::setprecision(2) << r.y.mean << std::setw(18)
       << r.searched.mean << std::setw(18) << r.survivors.mean << std::setw(14)
       << r.solver_calls.mean << std::setw(10) << std::setprecision(4) << r.error_probability
       << r.detection_failures << '\n';
  }
  os.unsetf(std::ios::fixed);
}

void print_baseline_table(std::ostream& os, const std::vector<BaselineRow>& rows) {
  os << std::left << std::setw(4) << "K" << std::setw(12) << "P_err IRS" << std::setw(14)
     << "P_err IRS UB" << std::setw(12) << "solves IRS" << std::setw(12) << "P_err 3BS"
     << std::setw(14) << "P_err 3BS UB" << std::setw(12) << "solves 3BS" << std::setw(12)
     << "ms IRS" << "ms 3BS\n";
  for (const auto& r : rows) {
    os << std::setw(4) << r.k << std::fixed << std::setprecision(4) << std::setw(12)
       << r.irs_error_probability << std::setw(14) << r.irs_oracle_error_probability
       << std::setprecision(1) << std::setw(12) << r.irs_solver_calls.mean << std::setprecision(4)
       << std::setw(12) << r.bs3_error_probability << std::setw(14) << r.bs3_oracle_error_probability
       << std::setprecision(1) << std::setw(12) << r.bs3_solver_calls.mean << std::setprecision(3)
       << std::setw(12) << r.irs_wall_ms.mean << r.bs3_wall_ms.mean << '\n';
  }
  os.unsetf(std::ios::fixed);
}

void print_topology_table(std::ostream& os, const std::vector<TopologyRow>& rows) {
  os << std::left << std::setw(12) << "variant" << std::setw(4) << "R" << std::setw(6) << "C1"
     << std::setw(6) << "C2" << std::setw(4) << "K" << std::setw(10) << "P_err"
     << std::setw(12) << "assoc.err" << "mean |Y|\n";
  for (const auto& r : rows) {
    os << std::setw(12) << r.variant << std::setw(4) << r.r << std::setw(6)
       << (r.c1_ok ? "ok" : "FAIL") << std::setw(6) << (r.c2_ok ? "ok" : "FAIL") << std::setw(4)
       << r.k << std::fixed << std::setprecision(4) << std::setw(10) << r.error_probability
       << std::setw(12) << r.association_error_rate << std::setprecision(2) << r.y.mean << '\n';
  }
  os.unsetf(std::ios::fixed);
}

void print_theorem1_table(std::ostream& os, const std::vector<Theorem1Row>& rows) {
  os << std::left << std::setw(4) << "K" << std::setw(4) << "R" << std::setw(8) << "scenes"
     << std::setw(16) << "unique+correct" << "max error (m)\n";
  for (const auto& r : rows) {
    os << std::setw(4) << r.k << std::setw(4) << r.r << std::setw(8) << r.scenes << std::setw(16)
       << r.unique_correct << std::scientific << std::setprecision(2) << r.max_position_error_m
       << '\n';
    os.unsetf(std::ios::scientific);
  }
}

}  // namespace irsense
