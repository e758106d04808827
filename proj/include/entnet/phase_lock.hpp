#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "entnet/source.hpp"

namespace entnet {

/// Wiener-process phase drift of the source interferometer.
struct DriftModel {
  double rate = constants::kPi;  // rad / sqrt(s)
  double time_step = 1e-4;       // s

  void validate() const;
  bool operator==(const DriftModel&) const = default;
};

struct LockGains {
  double kp = 0.1;
  double ki = 0.9;
  double loop_rate_hz = 1000.0;

  void validate() const;
  bool operator==(const LockGains&) const = default;
};

/// The monitor photodiode sees the interferometer biased by a quarter fringe
/// relative to the software target, so the lock point sits at signal 0.5.
struct LockState {
  double theta = 0.0;             // free-running interferometer phase
  double stretcher_offset = 0.0;  // phase added by the fibre stretcher
  double setpoint = 0.5;
  double integrator = 0.0;
  double target = 0.0;

  double applied() const { return theta + stretcher_offset; }
  /// applied - target, wrapped to (-pi, pi].
  double residual() const;
  double signal() const;
};

/// (1 + cos theta) / 2
double photodiode_signal(double theta);

/// theta += N(0, rate * sqrt(time_step)).
LockState drift_step(const DriftModel& model, const LockState& state, std::mt19937_64& rng);

/// Position-form PI update. The signal error is converted to a phase error
/// using the fringe slope at quadrature (-1/2), then
/// integrator += e, stretcher_offset = -(kp e + ki integrator).
LockState controller_step(const LockState& state, const LockGains& gains);

struct LockSample {
  double t = 0.0;
  double theta = 0.0;
  double applied = 0.0;
  double signal = 0.0;
};

struct LockResult {
  double residual_rms = 0.0;          // rad
  double mean_fidelity_factor = 1.0;  // time average of cos^2(residual / 2)
  std::vector<LockSample> series;
};

/// Drift advances every time_step; the controller runs once per loop period
/// (rounded to whole drift steps). Residual statistics are taken after every
/// drift step. Gains of zero give the open-loop drift. record_every > 0 keeps
/// every n-th sample in the time series.
LockResult simulate_lock(const DriftModel& model, const LockGains& gains, double duration_s,
                         double target_phase, std::uint64_t seed, int record_every = 0);

}  // namespace entnet
