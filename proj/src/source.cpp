#include "entnet/source.hpp"

#include <cmath>

#include "entnet/errors.hpp"

namespace entnet {

namespace {

constexpr double kBandLowNm = 1300.0;
constexpr double kBandHighNm = 1800.0;

// FWHM = 2 sqrt(2 ln 2) sigma
double sigma_nm(const SourceConfig& cfg) {
  return cfg.spectral_fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

}  // namespace

void SourceConfig::validate() const {
  if (!(spectral_fwhm_nm > 0.0)) throw InvalidArgument("source: spectral_fwhm must be positive");
  if (!(pump_power_mw >= 0.0)) throw InvalidArgument("source: pump_power must be non-negative");
  if (!(coupling_efficiency_per_facet >= 0.0 && coupling_efficiency_per_facet <= 1.0)) {
    throw InvalidArgument("source: coupling_efficiency_per_facet must lie in [0, 1]");
  }
  if (!(intrinsic_efficiency >= 0.0)) throw InvalidArgument("source: intrinsic_efficiency must be >= 0");
  if (!(brightness >= 0.0)) throw InvalidArgument("source: brightness must be >= 0");
  if (!std::isfinite(phase_theta) || !std::isfinite(crystal_balance)) {
    throw InvalidArgument("source: phase_theta and crystal_balance must be finite");
  }
}

double spectral_density(const SourceConfig& cfg, double wavelength_nm) {
  if (!(wavelength_nm > kBandLowNm && wavelength_nm < kBandHighNm)) return 0.0;
  const double s = sigma_nm(cfg);
  const double z = (wavelength_nm - cfg.center_wavelength_nm) / s;
  return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * constants::kPi));
}

double spectral_fraction(const SourceConfig& cfg, double lo_nm, double hi_nm) {
  if (hi_nm < lo_nm) return 0.0;
  const double lo = std::max(lo_nm, kBandLowNm);
  const double hi = std::min(hi_nm, kBandHighNm);
  if (hi <= lo) return 0.0;
  const double scale = sigma_nm(cfg) * std::sqrt(2.0);
  return 0.5 * (std::erf((hi - cfg.center_wavelength_nm) / scale) -
                std::erf((lo - cfg.center_wavelength_nm) / scale));
}

double source_bandwidth_ghz(const SourceConfig& cfg) {
  const double lambda = cfg.center_wavelength_nm;
  return constants::kSpeedOfLightNmThz * cfg.spectral_fwhm_nm / (lambda * lambda) * 1000.0;
}

TwoQubitState emitted_state(const SourceConfig& cfg) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(0) = std::cos(cfg.crystal_balance);
  psi(3) = std::sin(cfg.crystal_balance) * std::exp(Complex(0.0, cfg.phase_theta));
  return TwoQubitState::from_pure(psi);
}

EmissionModel emission(const SourceConfig& cfg) {
  cfg.validate();
  // The pump sits at half the degenerate signal wavelength.
  const double pump_wavelength_m = cfg.center_wavelength_nm * 0.5e-9;
  const double photon_energy = constants::kPlanck * constants::kSpeedOfLight / pump_wavelength_m;
  const double pump_photons = cfg.pump_power_mw * 1e-3 / photon_energy;
  return {emitted_state(cfg), cfg.intrinsic_efficiency * pump_photons};
}

double pair_rate(const SourceConfig& cfg, double bandwidth_ghz) {
  if (cfg.brightness < 0.0 || cfg.pump_power_mw < 0.0 || bandwidth_ghz < 0.0) {
    throw InvalidArgument("pair_rate: brightness, pump power and bandwidth must be non-negative");
  }
  if (bandwidth_ghz > source_bandwidth_ghz(cfg)) {
    throw InvalidArgument("pair_rate: bandwidth exceeds the source bandwidth");
  }
  return cfg.brightness * cfg.pump_power_mw * bandwidth_ghz;
}

double brightness_from_counts(double coincidence_rate, double eta_det1, double eta_det2,
                              double eta_duty, double pump_mw, double bandwidth_ghz) {
  auto in_unit = [](double x) { return x > 0.0 && x <= 1.0; };
  if (!in_unit(eta_det1) || !in_unit(eta_det2) || !in_unit(eta_duty)) {
    throw InvalidArgument("brightness_from_counts: efficiencies must lie in (0, 1]");
  }
  if (!(pump_mw > 0.0) || !(bandwidth_ghz > 0.0)) {
    throw InvalidArgument("brightness_from_counts: pump power and bandwidth must be positive");
  }
  if (coincidence_rate < 0.0) throw InvalidArgument("brightness_from_counts: negative rate");
  return coincidence_rate / (eta_det1 * eta_det2 * eta_duty) / pump_mw / bandwidth_ghz;
}

double intrinsic_conversion_efficiency(double p_out_w, double p_in_w, double coupling_per_facet) {
  if (!(p_in_w > 0.0)) throw InvalidArgument("intrinsic_conversion_efficiency: p_in must be positive");
  if (!(coupling_per_facet > 0.0 && coupling_per_facet <= 1.0)) {
    throw InvalidArgument("intrinsic_conversion_efficiency: coupling must lie in (0, 1]");
  }
  if (p_out_w < 0.0) throw InvalidArgument("intrinsic_conversion_efficiency: negative output power");
  return (p_out_w / p_in_w) / (coupling_per_facet * coupling_per_facet);
}

}  // namespace entnet
