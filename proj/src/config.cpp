#include "irsense/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace irsense {

using nlohmann::json;

void ExperimentConfig::validate() const {
  anchors.validate();
  ofdm.validate();
  locate.validate();
  if (trials == 0) throw std::invalid_argument("config: trials must be at least 1");
  if (!(target_radius > 0.0)) throw std::invalid_argument("config: target_radius must be positive");
  if (k_list.empty()) throw std::invalid_argument("config: k_list must not be empty");
  for (auto k : k_list) {
    if (k == 0 || k > 64) throw std::invalid_argument("config: K must lie in 1..64");
  }
  for (const auto& v : topology) {
    Anchors a = anchors;
    a.irs = v.irs;
    a.validate();
  }
}

RangingConfig ExperimentConfig::ranging_config() const {
  auto c = RangingConfig::calibrate(ofdm, anchors, target_radius);
  if (ranging.rho) c.rho = *ranging.rho;
  if (ranging.rho1) c.rho1 = *ranging.rho1;
  if (ranging.rho2) c.rho2 = *ranging.rho2;
  if (ranging.delta1) c.delta1 = *ranging.delta1;
  if (ranging.delta2) c.delta2 = *ranging.delta2;
  if (ranging.max_iters) c.max_iters = *ranging.max_iters;
  if (ranging.conv_tol) c.conv_tol = *ranging.conv_tol;
  c.validate();
  return c;
}

std::vector<TopologyVariant> default_topology_variants() {
  return {
      {"single", {{0.0, 60.0}}},
      {"c1_fails", {{0.0, 60.0}, {0.0, -60.0}}},
      {"c1_holds", {{0.0, 60.0}, {30.0, -60.0}}},
      {"c2_fails", {{80.0, -60.0}, {80.0, 60.0}}},
      {"c2_holds", {{80.0, -60.0}, {120.0, -60.0}}},
  };
}

namespace {

Point2D point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("config: points are [x, y] arrays");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Point2D> points_from(const json& j) {
  std::vector<Point2D> out;
  for (const auto& p : j) out.push_back(point_from(p));
  return out;
}

json to_json_points(const std::vector<Point2D>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
  const json j = json::parse(is);
  ExperimentConfig c;
  read(j, "name", c.name);

  if (j.contains("scene")) {
    const auto& s = j.at("scene");
    if (s.contains("bs")) {
      const auto bs = points_from(s.at("bs"));
      if (bs.size() != 2) throw std::invalid_argument("config: scene.bs needs exactly two points");
      c.anchors.bs = {bs[0], bs[1]};
    }
    if (s.contains("irs")) c.anchors.irs = points_from(s.at("irs"));
    read(s, "target_radius", c.target_radius);
    read(s, "separate_round_trip", c.sampler.separate_round_trip);
    read(s, "separate_all_echoes", c.sampler.separate_all_echoes);
    read(s, "max_attempts", c.sampler.max_attempts);
  }

  if (j.contains("ofdm")) {
    const auto& o = j.at("ofdm");
    read(o, "subcarriers", c.ofdm.subcarriers);
    read(o, "subcarrier_spacing_hz", c.ofdm.subcarrier_spacing_hz);
    read(o, "cp_length", c.ofdm.cp_length);
    read(o, "taps", c.ofdm.taps);
    read(o, "tx_power_dbm", c.ofdm.tx_power_dbm);
    read(o, "noise_psd_dbm_hz", c.ofdm.noise_psd_dbm_hz);
    read(o, "c0", c.ofdm.c0);
    read(o, "target_gain_db", c.ofdm.target_gain_db);
    read(o, "irs_gain_db", c.ofdm.irs_gain_db);
  }
  c.sampler.bandwidth_hz = c.ofdm.bandwidth_hz();
  c.sampler.c0 = c.ofdm.c0;

  if (j.contains("ranging")) {
    const auto& r = j.at("ranging");
    read_opt(r, "rho", c.ranging.rho);
    read_opt(r, "rho1", c.ranging.rho1);
    read_opt(r, "rho2", c.ranging.rho2);
    read_opt(r, "delta1", c.ranging.delta1);
    read_opt(r, "delta2", c.ranging.delta2);
    read_opt(r, "max_iters", c.ranging.max_iters);
    read_opt(r, "conv_tol", c.ranging.conv_tol);
  }

  c.locate.weights = ResidualWeights::from_ofdm(c.ofdm);
  c.locate.circle_slack = c.ofdm.range_cell_m();
  if (j.contains("locate")) {
    const auto& l = j.at("locate");
    read(l, "tau", c.locate.tau);
    read(l, "xi", c.locate.gn.xi);
    read(l, "gn_max_iters", c.locate.gn.max_iters);
    read(l, "step_tol", c.locate.gn.step_tol);
    read(l, "damping", c.locate.gn.damping);
    read(l, "sigma_bt", c.locate.weights.sigma_bt);
    read(l, "sigma_it", c.locate.weights.sigma_it);
    read(l, "circle_slack", c.locate.circle_slack);
    read(l, "use_cache", c.locate.use_cache);
    read(l, "prune", c.locate.prune);
    read(l, "max_solutions", c.locate.max_solutions);
  }

  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "k_list", c.k_list);
  read(j, "skip_phase1", c.skip_phase1);
  read(j, "add_noise", c.add_noise);
  read(j, "oracle", c.oracle);
  read(j, "threads", c.threads);

  if (j.contains("topology")) {
    for (const auto& v : j.at("topology")) {
      c.topology.push_back({v.at("name").get<std::string>(), points_from(v.at("irs"))});
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

void write_config(std::ostream& os, const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["scene"] = {{"bs", to_json_points({c.anchors.bs[0], c.anchors.bs[1]})},
                {"irs", to_json_points(c.anchors.irs)},
                {"target_radius", c.target_radius},
                {"separate_round_trip", c.sampler.separate_round_trip},
                {"separate_all_echoes", c.sampler.separate_all_echoes},
                {"max_attempts", c.sampler.max_attempts}};
  j["ofdm"] = {{"subcarriers", c.ofdm.subcarriers},
               {"subcarrier_spacing_hz", c.ofdm.subcarrier_spacing_hz},
               {"cp_length", c.ofdm.cp_length},
               {"taps", c.ofdm.taps},
               {"tx_power_dbm", c.ofdm.tx_power_dbm},
               {"noise_psd_dbm_hz", c.ofdm.noise_psd_dbm_hz},
               {"c0", c.ofdm.c0},
               {"target_gain_db", c.ofdm.target_gain_db},
               {"irs_gain_db", c.ofdm.irs_gain_db}};
  json r = json::object();
  if (c.ranging.rho) r["rho"] = *c.ranging.rho;
  if (c.ranging.rho1) r["rho1"] = *c.ranging.rho1;
  if (c.ranging.rho2) r["rho2"] = *c.ranging.rho2;
  if (c.ranging.delta1) r["delta1"] = *c.ranging.delta1;
  if (c.ranging.delta2) r["delta2"] = *c.ranging.delta2;
  if (c.ranging.max_iters) r["max_iters"] = *c.ranging.max_iters;
  if (c.ranging.conv_tol) r["conv_tol"] = *c.ranging.conv_tol;
  j["ranging"] = r;
  j["locate"] = {{"tau", c.locate.tau},
                 {"xi", c.locate.gn.xi},
                 {"gn_max_iters", c.locate.gn.max_iters},
                 {"step_tol", c.locate.gn.step_tol},
                 {"damping", c.locate.gn.damping},
                 {"sigma_bt", c.locate.weights.sigma_bt},
                 {"sigma_it", c.locate.weights.sigma_it},
                 {"circle_slack", c.locate.circle_slack},
                 {"use_cache", c.locate.use_cache},
                 {"prune", c.locate.prune},
                 {"max_solutions", c.locate.max_solutions}};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["k_list"] = c.k_list;
  j["skip_phase1"] = c.skip_phase1;
  j["add_noise"] = c.add_noise;
  j["oracle"] = c.oracle;
  j["threads"] = c.threads;
  json t = json::array();
  for (const auto& v : c.topology) t.push_back({{"name", v.name}, {"irs", to_json_points(v.irs)}});
  j["topology"] = t;
  os << j.dump(2) << '\n';
}

}  // namespace irsense
