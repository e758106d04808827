#pragma once

#include <cstdint>

#include "entnet/quantum_state.hpp"

namespace entnet {

/// Gated InGaAs APD. The master (DET1) free-runs at gate_rate_hz; the slave
/// (DET2) opens one gate per DET1 click, so its gate_rate_hz is unused.
struct DetectorConfig {
  double efficiency = 0.10;
  double gate_width_ns = 100.0;
  double gate_rate_hz = 1e6;
  double deadtime_us = 10.0;
  double dark_count_prob_per_gate = 0.0;
  double afterpulse_prob = 0.0;
  /// Mean delay, in live gates after the deadtime, of a spawned afterpulse.
  double afterpulse_decay_gates = 2.0;

  double duty_cycle() const { return gate_rate_hz * gate_width_ns * 1e-9; }
  /// Whole gates blocked after a click at this gate rate.
  long long dead_gates() const;
  /// Throws InvalidArgument on out-of-range fields or duty cycle > 1.
  void validate() const;

  bool operator==(const DetectorConfig&) const = default;
};

/// Everything between the entangled channel pair and the counters.
struct DetectionChain {
  DetectorConfig det1;
  DetectorConfig det2;
  /// Pairs per second reaching the channel pair, all crystals together.
  double pair_rate = 0.0;
  /// Optical transmission of each arm up to its detector.
  double transmission1 = 1.0;
  double transmission2 = 1.0;
  /// Detected-equivalent rate of photons at DET2 not correlated with the
  /// triggering photon (multi-pair emission, stray light).
  double uncorrelated_flux_det2 = 0.0;

  void validate() const;
  bool operator==(const DetectionChain&) const = default;
};

struct CountRecord {
  PolarizationSetting setting;
  double singles_det1 = 0.0;             // c/s
  double singles_det2_triggered = 0.0;   // c/s, DET2 clicks inside triggered gates
  double coincidences = 0.0;             // c/s
  double duration = 0.0;                 // s
  std::uint64_t seed = 0;

  // Diagnostics, not part of the CSV schema.
  std::uint64_t coincidence_count = 0;
  std::uint64_t true_coincidence_count = 0;
  std::uint64_t singles_count = 0;
  std::uint64_t signal_clicks = 0;
  std::uint64_t afterpulse_clicks = 0;
  double effective_gate_rate = 0.0;      // live DET1 gates per second
};

/// f_nominal / (1 + detection_rate * deadtime). detection_rate is the click
/// rate per unit live time.
double effective_gate_rate(double nominal_hz, double detection_rate, double deadtime_us);

/// Steady-state DET1 behaviour for a given photon flux onto the detector.
struct SinglesPrediction {
  double singles = 0.0;           // c/s
  double effective_gate_rate = 0.0;
  double signal_fraction = 0.0;   // clicks caused by signal photons
  double afterpulse_inflation = 0.0;
  double click_prob_per_live_gate = 0.0;
};

/// Renewal model of the gated click process: per-gate Poisson photon
/// arrivals and dark counts, deadtime in whole gates, geometric afterpulses.
SinglesPrediction predict_singles(double photon_rate_at_detector, const DetectorConfig& det);

/// Singles for a pair rate in the channel and the optical transmission.
double expected_singles(double pair_rate_in_channel, double optical_transmission, const DetectorConfig& det);

/// Rc = pair_rate * T1 * eta1 * duty_eff1 * T2 * eta2. DET2 gates only on a
/// DET1 click, so it contributes no duty factor.
double expected_coincidences(double pair_rate, double transmission1, double transmission2,
                             const DetectorConfig& det1, const DetectorConfig& det2);

/// singles_det1 * (uncorrelated_flux * gate2 + dark2).
double accidental_rate(double singles_det1, double uncorrelated_flux_det2, double gate2_ns,
                       double dark2_per_gate);

/// Mean count rates the Monte Carlo engine converges to, for one setting.
struct ChainPrediction {
  double singles_det1 = 0.0;
  double coincidences = 0.0;
  double true_coincidences = 0.0;
  double accidentals = 0.0;
  double effective_gate_rate = 0.0;
};

ChainPrediction predict_counts(const DetectionChain& chain, const TwoQubitState& rho,
                               const PolarizationSetting& setting);

/// Gate-by-gate stochastic simulation of the master/slave chain. Events are
/// generated by skipping over empty gates, so the cost scales with the click
/// count rather than the gate count. Deterministic for a fixed seed.
CountRecord simulate_counts(const DetectionChain& chain, const TwoQubitState& rho,
                            const PolarizationSetting& setting, double duration_s, std::uint64_t seed);

}  // namespace entnet
