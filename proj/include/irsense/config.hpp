#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irsense/locate.hpp"
#include "irsense/ranging.hpp"
#include "irsense/scene.hpp"
#include "irsense/waveform.hpp"

namespace irsense {

/// Any field left unset takes the value of RangingConfig::calibrate.
struct RangingOverrides {
  std::optional<double> rho;
  std::optional<double> rho1;
  std::optional<double> rho2;
  std::optional<double> delta1;
  std::optional<double> delta2;
  std::optional<std::size_t> max_iters;
  std::optional<double> conv_tol;
};

/// Named IRS placement for the topology experiment.
struct TopologyVariant {
  std::string name;
  std::vector<Point2D> irs;
};

struct ExperimentConfig {
  std::string name{"default"};
  Anchors anchors{{Point2D{100.0, 0.0}, Point2D{-100.0, 0.0}}, {Point2D{0.0, 40.0}}};
  double target_radius{50.0};
  SamplerOptions sampler;
  OfdmConfig ofdm;
  RangingOverrides ranging;
  LocateOptions locate;
  std::size_t trials{1000};
  std::uint64_t seed{1};
  std::vector<std::size_t> k_list{4};
  /// Quantized geometric ranges instead of the waveform-level Phase I.
  bool skip_phase1{true};
  bool add_noise{true};
  /// Localize with the true association (upper bound).
  bool oracle{false};
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t threads{0};
  std::vector<TopologyVariant> topology;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// Calibrated ranging thresholds with overrides applied.
  RangingConfig ranging_config() const;
};

/// Placements used by the topology experiment when none are configured:
/// a single-IRS control, then C1 fail/hold and C2 fail/hold pairs.
std::vector<TopologyVariant> default_topology_variants();

/// Parses a JSON document; missing keys keep their defaults. Residual weights
/// default to the half-cell quantization level of the configured OFDM grid.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);
void write_config(std::ostream& os, const ExperimentConfig& cfg);

}  // namespace irsense
