#pragma once

#include <functional>
#include <vector>

#include "entnet/quantum_state.hpp"

namespace entnet {

/// Channel on the 100 GHz ITU grid, centered at 190.0 + 0.1 n THz.
struct ItuChannel {
  int number = 0;
  double width_ghz = 62.0;
  double insertion_loss_db = 0.0;

  double center_frequency_thz() const;
  double center_wavelength_nm() const;
  /// Passband edges in nm, converted from the frequency passband.
  double passband_low_nm() const;
  double passband_high_nm() const;
  /// 10^(-IL/10)
  double transmission() const;

  bool operator==(const ItuChannel&) const = default;
};

struct ChannelPlan {
  std::vector<ItuChannel> channels;
  double grid_spacing_ghz = 200.0;
  double passband_width_ghz = 62.0;

  /// Centers strictly increasing with neighbour spacing equal to grid_spacing.
  void validate() const;
  const ItuChannel& channel(int number) const;
  bool contains(int number) const;

  bool operator==(const ChannelPlan&) const = default;
};

/// Eight-channel 200 GHz demultiplexer, ITU channels 27, 29, ..., 41, 62 GHz passbands.
ChannelPlan paper_dwdm_plan();

struct EntangledChannelPair {
  ItuChannel low;
  ItuChannel high;
  bool operator==(const EntangledChannelPair&) const = default;
};

struct PairingResult {
  /// Sorted by the low channel number.
  std::vector<EntangledChannelPair> pairs;
  /// Channel numbers in ascending order.
  std::vector<int> unpaired;
};

/// c / (190.0 + 0.1 n) in nm.
double channel_wavelength(int number);

inline constexpr double kDefaultPairingToleranceGhz = 10.0;

/// Energy-conservation pairing: nu_low + nu_high = nu_pump within tolerance.
PairingResult pair_channels(const ChannelPlan& plan, double pump_frequency_thz,
                            double tolerance_ghz = kDefaultPairingToleranceGhz);

/// Photon wavelength density in 1/nm.
using SpectralDensity = std::function<double(double)>;

struct PairRate {
  EntangledChannelPair pair;
  double rate = 0.0;
};

/// Integrates a spectral density over [lo, hi] with composite Simpson (samples odd, >= 3).
double integrate_density(const SpectralDensity& density, double lo_nm, double hi_nm,
                         int samples = 401);

/// Pair rate behind the demultiplexer for every energy-matched channel pair.
///
/// A pair lands in (low, high) when either photon falls in the low passband
/// and its partner in the high one, so the spectral weight is the sum of both
/// passband integrals. Each arm is attenuated by its channel insertion loss.
std::vector<PairRate> demux_rates(double total_rate, const SpectralDensity& density,
                                  const ChannelPlan& plan, double pump_frequency_thz,
                                  double tolerance_ghz = kDefaultPairingToleranceGhz);

/// 1 / bandwidth, in ps.
double coherence_time(double bandwidth_ghz);
/// D * L * delta-lambda, in ps.
double chromatic_spread(double dispersion_ps_nm_km, double length_km, double channel_width_nm);
/// coefficient * sqrt(L), in ps.
double pmd_delay(double pmd_coefficient_ps_sqrt_km, double length_km);

/// Average of (U(l) (x) I) rho (U(l) (x) I)^dagger over a uniform passband,
/// with U a rotation about the circular axis by slope * (l - l0).
TwoQubitState cwdm_depolarize(const TwoQubitState& rho, double passband_nm,
                              double rotation_slope_rad_per_nm, int samples = 401);

/// min(E_z, E_x): conservative two-basis correlation visibility.
double correlation_visibility(const TwoQubitState& rho);

/// Rotation slope for which cwdm_depolarize(Phi+, passband) has the target
/// visibility. Bisection; target must lie in (0, 1).
double calibrate_cwdm_slope(double target_visibility, double passband_nm);

struct ChannelCapacity {
  int channels = 0;
  int pairs = 0;
  /// Unrounded bandwidth / spacing ratio.
  double exact_ratio = 0.0;
};

ChannelCapacity channel_capacity(double total_bandwidth_nm, double center_nm, double spacing_ghz);

}  // namespace entnet
