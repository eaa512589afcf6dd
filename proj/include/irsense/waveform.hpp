#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "irsense/fft.hpp"
#include "irsense/random.hpp"
#include "irsense/scene.hpp"

namespace irsense {

/// OFDM numerology, power budget and echo gain constants.
struct OfdmConfig {
  std::size_t subcarriers{2048};
  double subcarrier_spacing_hz{195312.5};
  std::size_t cp_length{512};
  std::size_t taps{512};
  double tx_power_dbm{39.0};
  double noise_psd_dbm_hz{-174.0};
  double c0{3e8};
  /// Two-way target echo constant G0 (dB).
  double target_gain_db{-30.0};
  /// IRS aperture factor G_I (dB), applied once per IRS bounce.
  double irs_gain_db{30.0};

  double bandwidth_hz() const { return static_cast<double>(subcarriers) * subcarrier_spacing_hz; }
  /// Range-resolution cell c0 / B in meters.
  double range_cell_m() const { return c0 / bandwidth_hz(); }
  double tx_power_w() const;
  /// Per-subcarrier power when the budget is split over `assigned` subcarriers.
  double power_per_subcarrier_w(std::size_t assigned) const;
  /// Per-subcarrier noise variance noise_psd * delta_f.
  double noise_variance_w() const;
  double target_gain() const;
  double irs_gain() const;

  void validate() const;
};

/// Orthogonal subcarrier allocation; bins are zero-based (bin = subcarrier - 1).
struct SubcarrierPlan {
  std::size_t subcarriers{0};
  std::array<std::vector<std::size_t>, 2> bins;
};

/// Interleaved plan: BS 1 gets subcarriers 1,3,5,..., BS 2 gets 2,4,6,...
SubcarrierPlan make_plan(std::size_t subcarriers);

enum class LinkType { I, II, III, IV };

const char* to_string(LinkType t);

struct PathTap {
  std::size_t delay{0};
  cd gain{};
  LinkType type{LinkType::III};
  std::size_t tx_bs{0};
  std::size_t rx_bs{0};
  std::optional<std::size_t> target;
  std::optional<std::size_t> irs;
  double path_length_m{0.0};
};

/// Monostatic propagation taps of one OFDM symbol, per receiving BS.
struct PathList {
  std::size_t symbol{1};
  std::array<std::vector<PathTap>, 2> per_bs;

  std::size_t count(std::size_t m, LinkType t) const;
};

class OutOfWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Echo taps for symbol q under the IRS on-off scheme: q = 1 has every IRS
/// absorbing (Type III only); q = 2 adds Type II and Type IV taps. Path phases
/// are uniform and derived from `phase_seed`, identical for the same physical
/// path across symbols.
///
/// Throws OutOfWindowError when a tap falls at or beyond cfg.taps.
PathList build_paths(const Scene& scene, const OfdmConfig& cfg, std::size_t symbol,
                     std::uint64_t phase_seed);

/// Dense L-tap channel from a tap list; gains of taps sharing a delay add up.
std::vector<cd> channel_vector(std::span<const PathTap> taps, std::size_t length);

/// Normalized IDFT followed by a J-sample cyclic prefix.
std::vector<cd> ofdm_modulate(std::span<const cd> symbols, std::size_t cp_length);

/// Drops the cyclic prefix and applies the DFT.
std::vector<cd> ofdm_demodulate(std::span<const cd> samples, std::size_t subcarriers,
                                std::size_t cp_length);

/// Full-length (N) pilot vectors per BS; unit-modulus QPSK on assigned bins, 0 elsewhere.
using PilotSet = std::array<std::vector<cd>, 2>;

PilotSet make_pilots(const SubcarrierPlan& plan, Rng& rng);

/// Received frequency-domain echo of one BS over its own subcarriers.
struct FreqSnapshot {
  std::size_t bs{0};
  std::size_t symbol{1};
  std::size_t subcarriers{0};
  std::vector<std::size_t> bins;
  std::vector<cd> y;
  std::vector<cd> pilots;
  double tx_power_w{0.0};
  double noise_variance_w{0.0};
};

/// G h restricted to `bins`: out[n] = sum_l h[l] exp(-j 2 pi bins[n] l / N).
std::vector<cd> steering_apply(std::span<const std::size_t> bins, std::size_t subcarriers,
                               std::span<const cd> h);

/// G^H v, truncated to `length` taps.
std::vector<cd> steering_adjoint(std::span<const std::size_t> bins, std::size_t subcarriers,
                                 std::span<const cd> v, std::size_t length);

/// y_m = sqrt(p) diag(s_m) G_m h_mm + z_m for both BSs. Bistatic echoes land
/// on the other BS's subcarriers and are not synthesized. Noise is i.i.d.
/// CN(0, noise_psd * delta_f) when `add_noise` is set.
std::array<FreqSnapshot, 2> simulate_freq_rx(const PathList& paths, const PilotSet& pilots,
                                             const OfdmConfig& cfg, const SubcarrierPlan& plan,
                                             std::uint64_t noise_seed, bool add_noise = true);

}  // namespace irsense
