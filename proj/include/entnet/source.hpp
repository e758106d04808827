#pragma once

#include "entnet/quantum_state.hpp"

namespace entnet {

namespace constants {
inline constexpr double kPi = 3.14159265358979323846;
/// Speed of light in nm * THz.
inline constexpr double kSpeedOfLightNmThz = 299792.458;
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
}  // namespace constants

/// Waveguide SPDC source parameters.
struct SourceConfig {
  double center_wavelength_nm = 1550.0;
  double spectral_fwhm_nm = 70.0;
  /// Pump power coupled into each crystal, mW.
  double pump_power_mw = 0.018;
  double phase_theta = 0.0;
  /// cos(alpha)|HH> + e^{i theta} sin(alpha)|VV>; pi/4 is balanced.
  double crystal_balance = constants::kPi / 4.0;
  /// Pairs per pump photon inside the waveguide.
  double intrinsic_efficiency = 1.1e-5;
  double coupling_efficiency_per_facet = 0.5;
  /// Fibre-coupled brightness, pairs/s/mW/GHz.
  double brightness = 4.5e5;

  // Second-harmonic test efficiencies of the two crystals, %/W. Metadata only.
  double shg_efficiency_crystal1 = 186.0;
  double shg_efficiency_crystal2 = 218.0;

  /// Throws InvalidArgument on a violated invariant.
  void validate() const;
  bool operator==(const SourceConfig&) const = default;
};

struct EmissionModel {
  TwoQubitState state;
  /// Pairs per second per crystal over the full spectrum.
  double pair_rate_total = 0.0;
};

/// Normalized Gaussian photon spectrum (1/nm). Zero outside (1300, 1800) nm.
double spectral_density(const SourceConfig& cfg, double wavelength_nm);

/// Integral of spectral_density over [lo, hi] nm, evaluated in closed form.
double spectral_fraction(const SourceConfig& cfg, double lo_nm, double hi_nm);

/// Total SPDC bandwidth in GHz implied by the spectral FWHM.
double source_bandwidth_ghz(const SourceConfig& cfg);

TwoQubitState emitted_state(const SourceConfig& cfg);

/// Pump photon flux times intrinsic efficiency, per crystal.
EmissionModel emission(const SourceConfig& cfg);

/// B * P * bandwidth. Bandwidth may not exceed the source bandwidth.
double pair_rate(const SourceConfig& cfg, double bandwidth_ghz);

/// B = Rc / (eta_det1 eta_det2 eta_duty) / P_pump / bandwidth.
double brightness_from_counts(double coincidence_rate, double eta_det1, double eta_det2,
                              double eta_duty, double pump_mw, double bandwidth_ghz);

/// (p_out / p_in) / coupling^2. The pump enters through one coupled facet
/// and the pairs leave through the other.
double intrinsic_conversion_efficiency(double p_out_w, double p_in_w, double coupling_per_facet);

}  // namespace entnet
