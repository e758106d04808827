#include "entnet/phase_lock.hpp"

#include <cmath>

#include "entnet/errors.hpp"

namespace entnet {

namespace {

constexpr double kQuarterFringe = constants::kPi / 2.0;
// d(signal)/d(phase) at the quadrature point.
constexpr double kFringeSlope = -0.5;

double wrap(double phi) { return std::remainder(phi, 2.0 * constants::kPi); }

}  // namespace

void DriftModel::validate() const {
  if (!(rate >= 0.0)) throw InvalidArgument("drift: rate must be non-negative");
  if (!(time_step > 0.0)) throw InvalidArgument("drift: time_step must be positive");
}

void LockGains::validate() const {
  if (!(kp >= 0.0) || !(ki >= 0.0)) throw InvalidArgument("lock gains must be non-negative");
  if (!(loop_rate_hz > 0.0)) throw InvalidArgument("lock loop rate must be positive");
}

double LockState::residual() const { return wrap(applied() - target); }

double LockState::signal() const { return photodiode_signal(applied() - target + kQuarterFringe); }

double photodiode_signal(double theta) { return 0.5 * (1.0 + std::cos(theta)); }

LockState drift_step(const DriftModel& model, const LockState& state, std::mt19937_64& rng) {
  model.validate();
  LockState out = state;
  if (model.rate > 0.0) {
    std::normal_distribution<double> step(0.0, model.rate * std::sqrt(model.time_step));
    out.theta += step(rng);
  }
  return out;
}

LockState controller_step(const LockState& state, const LockGains& gains) {
  gains.validate();
  LockState out = state;
  const double error = (state.signal() - state.setpoint) / kFringeSlope;
  if (error == 0.0 || (gains.kp == 0.0 && gains.ki == 0.0)) return out;
  out.integrator += error;
  out.stretcher_offset = -(gains.kp * error + gains.ki * out.integrator);
  return out;
}

LockResult simulate_lock(const DriftModel& model, const LockGains& gains, double duration_s,
                         double target_phase, std::uint64_t seed, int record_every) {
  model.validate();
  gains.validate();
  if (!(duration_s > 0.0)) throw InvalidArgument("simulate_lock: duration must be positive");

  const long long steps = std::max<long long>(1, std::llround(duration_s / model.time_step));
  const long long per_loop =
      std::max<long long>(1, std::llround(1.0 / (gains.loop_rate_hz * model.time_step)));
  const bool closed = gains.kp > 0.0 || gains.ki > 0.0;

  std::mt19937_64 rng(seed);
  LockState state;
  state.target = target_phase;
  // The stretcher starts on target with the integrator holding that offset.
  state.stretcher_offset = target_phase;
  if (gains.ki > 0.0) state.integrator = -target_phase / gains.ki;

  LockResult out;
  double sum_sq = 0.0;
  double sum_fid = 0.0;
  for (long long k = 1; k <= steps; ++k) {
    state = drift_step(model, state, rng);
    const double r = state.residual();
    sum_sq += r * r;
    const double c = std::cos(0.5 * r);
    sum_fid += c * c;
    if (record_every > 0 && k % record_every == 0) {
      out.series.push_back({static_cast<double>(k) * model.time_step, state.theta, state.applied(), state.signal()});
    }
    if (closed && k % per_loop == 0) state = controller_step(state, gains);
  }
  out.residual_rms = std::sqrt(sum_sq / static_cast<double>(steps));
  out.mean_fidelity_factor = sum_fid / static_cast<double>(steps);
  return out;
}

}  // namespace entnet
