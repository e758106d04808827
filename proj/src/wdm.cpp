#include "entnet/wdm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entnet/errors.hpp"
#include "entnet/source.hpp"

namespace entnet {

namespace {

constexpr double kGridAnchorThz = 190.0;
constexpr double kGridStepThz = 0.1;

double to_nm(double frequency_thz) { return constants::kSpeedOfLightNmThz / frequency_thz; }

}  // namespace

double ItuChannel::center_frequency_thz() const { return kGridAnchorThz + kGridStepThz * number; }
double ItuChannel::center_wavelength_nm() const { return channel_wavelength(number); }

double ItuChannel::passband_low_nm() const {
  return to_nm(center_frequency_thz() + 0.5e-3 * width_ghz);
}

double ItuChannel::passband_high_nm() const {
  return to_nm(center_frequency_thz() - 0.5e-3 * width_ghz);
}

double ItuChannel::transmission() const { return std::pow(10.0, -insertion_loss_db / 10.0); }

void ChannelPlan::validate() const {
  for (const auto& ch : channels) {
    if (!(ch.width_ghz > 0.0)) {
      throw InvalidArgument("channel " + std::to_string(ch.number) + ": width must be positive");
    }
    if (ch.number < -60 || ch.number > 120) {
      throw InvalidArgument("channel " + std::to_string(ch.number) + " is outside the ITU range");
    }
  }
  for (std::size_t i = 1; i < channels.size(); ++i) {
    const double step_ghz =
        (channels[i].center_frequency_thz() - channels[i - 1].center_frequency_thz()) * 1000.0;
    if (!(step_ghz > 0.0)) throw InvalidArgument("channel plan: centers must be strictly increasing");
    if (std::abs(step_ghz - grid_spacing_ghz) > 1e-6) {
      std::ostringstream os;
      os << "channel plan: spacing between channels " << channels[i - 1].number << " and "
         << channels[i].number << " is " << step_ghz << " GHz, expected " << grid_spacing_ghz;
      throw InvalidArgument(os.str());
    }
  }
}

const ItuChannel& ChannelPlan::channel(int number) const {
  for (const auto& ch : channels) {
    if (ch.number == number) return ch;
  }
  throw InvalidArgument("channel " + std::to_string(number) + " is not in the plan");
}

bool ChannelPlan::contains(int number) const {
  return std::any_of(channels.begin(), channels.end(),
                     [number](const ItuChannel& ch) { return ch.number == number; });
}

ChannelPlan paper_dwdm_plan() {
  ChannelPlan plan;
  plan.grid_spacing_ghz = 200.0;
  plan.passband_width_ghz = 62.0;
  for (int n = 27; n <= 41; n += 2) plan.channels.push_back({n, 62.0, 0.0});
  return plan;
}

double channel_wavelength(int number) { return to_nm(kGridAnchorThz + kGridStepThz * number); }

PairingResult pair_channels(const ChannelPlan& plan, double pump_frequency_thz,
                            double tolerance_ghz) {
  if (!(tolerance_ghz >= 0.0 && tolerance_ghz < plan.grid_spacing_ghz / 2.0)) {
    throw InvalidArgument("pair_channels: tolerance must be below half the grid spacing");
  }
  std::vector<ItuChannel> sorted = plan.channels;
  std::sort(sorted.begin(), sorted.end(),
            [](const ItuChannel& a, const ItuChannel& b) { return a.number < b.number; });

  // With the tolerance under half a grid step each channel has at most one
  // energy-matched partner, so greedy matching is exact.
  std::vector<bool> used(sorted.size(), false);
  PairingResult out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (used[j]) continue;
      const double mismatch_ghz =
          (sorted[i].center_frequency_thz() + sorted[j].center_frequency_thz() - pump_frequency_thz) *
          1000.0;
      if (std::abs(mismatch_ghz) <= tolerance_ghz) {
        used[i] = used[j] = true;
        out.pairs.push_back({sorted[i], sorted[j]});
        break;
      }
    }
  }
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!used[i]) out.unpaired.push_back(sorted[i].number);
  }
  return out;
}

double integrate_density(const SpectralDensity& density, double lo_nm, double hi_nm, int samples) {
  if (hi_nm <= lo_nm) return 0.0;
  if (samples < 3) samples = 3;
  if (samples % 2 == 0) ++samples;
  const int intervals = samples - 1;
  const double h = (hi_nm - lo_nm) / intervals;
  double acc = density(lo_nm) + density(hi_nm);
  for (int k = 1; k < intervals; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * density(lo_nm + k * h);
  return acc * h / 3.0;
}

std::vector<PairRate> demux_rates(double total_rate, const SpectralDensity& density,
                                  const ChannelPlan& plan, double pump_frequency_thz,
                                  double tolerance_ghz) {
  if (total_rate < 0.0) throw InvalidArgument("demux_rates: total rate must be non-negative");
  const PairingResult pairing = pair_channels(plan, pump_frequency_thz, tolerance_ghz);
  std::vector<PairRate> out;
  out.reserve(pairing.pairs.size());
  for (const auto& pair : pairing.pairs) {
    const double weight =
        integrate_density(density, pair.low.passband_low_nm(), pair.low.passband_high_nm()) +
        integrate_density(density, pair.high.passband_low_nm(), pair.high.passband_high_nm());
    out.push_back({pair, total_rate * weight * pair.low.transmission() * pair.high.transmission()});
  }
  return out;
}

double coherence_time(double bandwidth_ghz) {
  if (!(bandwidth_ghz > 0.0)) throw InvalidArgument("coherence_time: bandwidth must be positive");
  return 1000.0 / bandwidth_ghz;
}

double chromatic_spread(double dispersion_ps_nm_km, double length_km, double channel_width_nm) {
  if (dispersion_ps_nm_km < 0.0 || length_km < 0.0 || channel_width_nm < 0.0) {
    throw InvalidArgument("chromatic_spread: arguments must be non-negative");
  }
  return dispersion_ps_nm_km * length_km * channel_width_nm;
}

double pmd_delay(double pmd_coefficient_ps_sqrt_km, double length_km) {
  if (pmd_coefficient_ps_sqrt_km < 0.0 || length_km < 0.0) {
    throw InvalidArgument("pmd_delay: arguments must be non-negative");
  }
  return pmd_coefficient_ps_sqrt_km * std::sqrt(length_km);
}

TwoQubitState cwdm_depolarize(const TwoQubitState& rho, double passband_nm,
                              double rotation_slope_rad_per_nm, int samples) {
  if (!(passband_nm > 0.0)) throw InvalidArgument("cwdm_depolarize: passband must be positive");
  if (!(rotation_slope_rad_per_nm >= 0.0)) throw InvalidArgument("cwdm_depolarize: slope must be >= 0");
  if (rotation_slope_rad_per_nm == 0.0) return rho;
  samples = std::max(samples, 201);
  if (samples % 2 == 0) ++samples;

  // Simpson weights over [-passband/2, passband/2] for a uniform w(l).
  const int intervals = samples - 1;
  const double h = passband_nm / intervals;
  Matrix4c acc = Matrix4c::Zero();
  double weight_sum = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const double offset = -0.5 * passband_nm + k * h;
    const Matrix4c u = kron(rotation_y(rotation_slope_rad_per_nm * offset), Matrix2c::Identity());
    acc += w * (u * rho.matrix() * u.adjoint());
    weight_sum += w;
  }
  acc /= weight_sum;
  return rho.physical() ? TwoQubitState::from_matrix(acc) : TwoQubitState::allow_unphysical(acc);
}

double correlation_visibility(const TwoQubitState& rho) {
  const MetricsReport m = metrics(rho);
  return std::min(m.correlation_z, m.correlation_x);
}

double calibrate_cwdm_slope(double target_visibility, double passband_nm) {
  if (!(target_visibility > 0.0 && target_visibility < 1.0)) {
    throw InvalidArgument("calibrate_cwdm_slope: target visibility must lie in (0, 1)");
  }
  if (!(passband_nm > 0.0)) throw InvalidArgument("calibrate_cwdm_slope: passband must be positive");
  const TwoQubitState bell = phi_plus();
  // Visibility falls monotonically while the half-spread angle stays below pi.
  double lo = 0.0;
  double hi = 2.0 * constants::kPi / passband_nm;
  for (int iter = 0; iter < 100 && (hi - lo) > 1e-14; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (correlation_visibility(cwdm_depolarize(bell, passband_nm, mid)) > target_visibility) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ChannelCapacity channel_capacity(double total_bandwidth_nm, double center_nm, double spacing_ghz) {
  if (!(total_bandwidth_nm > 0.0 && center_nm > 0.0 && spacing_ghz > 0.0)) {
    throw InvalidArgument("channel_capacity: arguments must be positive");
  }
  const double bandwidth_ghz =
      constants::kSpeedOfLightNmThz * total_bandwidth_nm / (center_nm * center_nm) * 1000.0;
  ChannelCapacity out;
  out.exact_ratio = bandwidth_ghz / spacing_ghz;
  out.channels = static_cast<int>(std::floor(out.exact_ratio));
  out.pairs = out.channels / 2;
  return out;
}

}  // namespace entnet
