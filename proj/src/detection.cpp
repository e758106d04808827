#include "entnet/detection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "entnet/errors.hpp"

namespace entnet {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

// Marginal probability that Alice's photon passes analyser a.
double alice_marginal(const TwoQubitState& rho, Polarization a) {
  return (rho.matrix() * kron(projector(a), Matrix2c::Identity())).trace().real();
}

struct SettingProbabilities {
  double alice = 0.0;
  double joint = 0.0;
  double bob_given_alice() const { return alice > 0.0 ? joint / alice : 0.0; }
};

SettingProbabilities setting_probabilities(const TwoQubitState& rho, const PolarizationSetting& s) {
  rho.require_physical("detection");
  SettingProbabilities p;
  p.alice = std::clamp(alice_marginal(rho, s.alice), 0.0, 1.0);
  p.joint = std::clamp(measurement_probability(rho, s), 0.0, p.alice);
  return p;
}

double poisson_click(double mean) { return -std::expm1(-mean); }

}  // namespace

long long DetectorConfig::dead_gates() const {
  return static_cast<long long>(std::ceil(deadtime_us * 1e-6 * gate_rate_hz - 1e-9));
}

void DetectorConfig::validate() const {
  if (!in_unit(efficiency)) throw InvalidArgument("detector: efficiency must lie in [0, 1]");
  if (!(gate_width_ns > 0.0)) throw InvalidArgument("detector: gate width must be positive");
  if (!(gate_rate_hz >= 0.0)) throw InvalidArgument("detector: gate rate must be non-negative");
  if (!(deadtime_us >= 0.0)) throw InvalidArgument("detector: deadtime must be non-negative");
  if (!in_unit(dark_count_prob_per_gate)) throw InvalidArgument("detector: dark count probability must lie in [0, 1]");
  if (!(afterpulse_prob >= 0.0 && afterpulse_prob < 1.0)) {
    throw InvalidArgument("detector: afterpulse probability must lie in [0, 1)");
  }
  if (!(afterpulse_decay_gates >= 1.0)) throw InvalidArgument("detector: afterpulse decay must be >= 1 gate");
  if (duty_cycle() > 1.0) throw InvalidArgument("detector: duty cycle (gate rate x gate width) exceeds 1");
}

void DetectionChain::validate() const {
  det1.validate();
  det2.validate();
  if (!(det1.gate_rate_hz > 0.0)) throw InvalidArgument("chain: master gate rate must be positive");
  if (!(pair_rate >= 0.0)) throw InvalidArgument("chain: pair rate must be non-negative");
  if (!in_unit(transmission1) || !in_unit(transmission2)) {
    throw InvalidArgument("chain: transmissions must lie in [0, 1]");
  }
  if (!(uncorrelated_flux_det2 >= 0.0)) throw InvalidArgument("chain: uncorrelated flux must be non-negative");
}

double effective_gate_rate(double nominal_hz, double detection_rate, double deadtime_us) {
  if (nominal_hz < 0.0 || detection_rate < 0.0 || deadtime_us < 0.0) {
    throw InvalidArgument("effective_gate_rate: arguments must be non-negative");
  }
  return nominal_hz / (1.0 + detection_rate * deadtime_us * 1e-6);
}

SinglesPrediction predict_singles(double photon_rate_at_detector, const DetectorConfig& det) {
  det.validate();
  if (photon_rate_at_detector < 0.0) throw InvalidArgument("predict_singles: negative photon rate");
  const double f = det.gate_rate_hz;
  const double p_sig = poisson_click(photon_rate_at_detector * det.gate_width_ns * 1e-9 * det.efficiency);
  const double q0 = 1.0 - (1.0 - p_sig) * (1.0 - det.dark_count_prob_per_gate);

  SinglesPrediction out;
  if (q0 <= 0.0) {
    out.effective_gate_rate = f;
    return out;
  }
  // One renewal cycle = one click + its dead gates + the live gates until
  // the next click. A pending afterpulse competes with spontaneous clicks;
  // it is lost when a spontaneous click comes first (or merges on a tie).
  const double dead = static_cast<double>(det.dead_gates());
  const double r = 1.0 / det.afterpulse_decay_gates;
  const double hazard = 1.0 - (1.0 - q0) * (1.0 - r);
  const double p_ap = det.afterpulse_prob;
  const double live_per_cycle = p_ap / hazard + (1.0 - p_ap) / q0;
  const double spontaneous_fraction = p_ap * q0 / hazard + (1.0 - p_ap);

  out.singles = f / (dead + live_per_cycle);
  out.effective_gate_rate = f * live_per_cycle / (dead + live_per_cycle);
  out.click_prob_per_live_gate = 1.0 / live_per_cycle;
  out.afterpulse_inflation = out.click_prob_per_live_gate / q0 - 1.0;
  out.signal_fraction = (p_sig / q0) * spontaneous_fraction;
  return out;
}

double expected_singles(double pair_rate_in_channel, double optical_transmission, const DetectorConfig& det) {
  if (!in_unit(optical_transmission)) throw InvalidArgument("expected_singles: transmission must lie in [0, 1]");
  if (pair_rate_in_channel < 0.0) throw InvalidArgument("expected_singles: negative pair rate");
  return predict_singles(pair_rate_in_channel * optical_transmission, det).singles;
}

double expected_coincidences(double pair_rate, double transmission1, double transmission2,
                             const DetectorConfig& det1, const DetectorConfig& det2) {
  if (!in_unit(transmission1) || !in_unit(transmission2)) {
    throw InvalidArgument("expected_coincidences: transmissions must lie in [0, 1]");
  }
  if (pair_rate < 0.0) throw InvalidArgument("expected_coincidences: negative pair rate");
  det2.validate();
  const SinglesPrediction s1 = predict_singles(pair_rate * transmission1, det1);
  const double duty = s1.effective_gate_rate * det1.gate_width_ns * 1e-9;
  return pair_rate * transmission1 * det1.efficiency * duty * transmission2 * det2.efficiency;
}

double accidental_rate(double singles_det1, double uncorrelated_flux_det2, double gate2_ns,
                       double dark2_per_gate) {
  if (singles_det1 < 0.0 || uncorrelated_flux_det2 < 0.0 || gate2_ns < 0.0 || dark2_per_gate < 0.0) {
    throw InvalidArgument("accidental_rate: arguments must be non-negative");
  }
  return singles_det1 * (uncorrelated_flux_det2 * gate2_ns * 1e-9 + dark2_per_gate);
}

namespace {

double det2_noise_click(const DetectionChain& chain) {
  const double flux = poisson_click(chain.uncorrelated_flux_det2 * chain.det2.gate_width_ns * 1e-9);
  return 1.0 - (1.0 - flux) * (1.0 - chain.det2.dark_count_prob_per_gate);
}

}  // namespace

ChainPrediction predict_counts(const DetectionChain& chain, const TwoQubitState& rho,
                               const PolarizationSetting& setting) {
  chain.validate();
  const SettingProbabilities p = setting_probabilities(rho, setting);
  const double photon_rate = chain.pair_rate * chain.transmission1 * p.alice;
  const SinglesPrediction s1 = predict_singles(photon_rate, chain.det1);
  const double p_sig =
      poisson_click(photon_rate * chain.det1.gate_width_ns * 1e-9 * chain.det1.efficiency);
  const double partner = chain.transmission2 * chain.det2.efficiency * p.bob_given_alice();
  const double noise = det2_noise_click(chain);

  ChainPrediction out;
  out.singles_det1 = s1.singles;
  out.effective_gate_rate = s1.effective_gate_rate;
  out.true_coincidences = s1.effective_gate_rate * p_sig * partner;
  const double signal_click_p2 = 1.0 - (1.0 - partner) * (1.0 - noise);
  out.coincidences =
      s1.singles * (s1.signal_fraction * signal_click_p2 + (1.0 - s1.signal_fraction) * noise);
  out.accidentals = out.coincidences - out.true_coincidences;
  return out;
}

CountRecord simulate_counts(const DetectionChain& chain, const TwoQubitState& rho,
                            const PolarizationSetting& setting, double duration_s, std::uint64_t seed) {
  chain.validate();
  if (!(duration_s > 0.0)) throw InvalidArgument("simulate_counts: duration must be positive");
  const SettingProbabilities p = setting_probabilities(rho, setting);

  const DetectorConfig& d1 = chain.det1;
  const double p_sig = poisson_click(chain.pair_rate * chain.transmission1 * p.alice * d1.gate_width_ns *
                                     1e-9 * d1.efficiency);
  const double q0 = 1.0 - (1.0 - p_sig) * (1.0 - d1.dark_count_prob_per_gate);
  const double signal_given_click = q0 > 0.0 ? p_sig / q0 : 0.0;
  const double partner = chain.transmission2 * chain.det2.efficiency * p.bob_given_alice();
  const double noise2 = det2_noise_click(chain);

  const long long total_gates = std::llround(duration_s * d1.gate_rate_hz);
  const long long dead1 = d1.dead_gates();
  const long long dead2 = static_cast<long long>(std::ceil(chain.det2.deadtime_us * 1e-6 * d1.gate_rate_hz - 1e-9));
  constexpr long long kNever = std::numeric_limits<long long>::max();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::geometric_distribution<long long> spontaneous_gap(q0 > 0.0 ? q0 : 0.5);
  std::geometric_distribution<long long> afterpulse_gap(1.0 / d1.afterpulse_decay_gates);
  std::priority_queue<long long, std::vector<long long>, std::greater<>> pending_afterpulses;

  CountRecord rec;
  rec.setting = setting;
  rec.duration = duration_s;
  rec.seed = seed;

  long long gate = 0;
  long long live_gates = 0;
  long long det2_ready = 0;
  while (gate < total_gates) {
    // Afterpulses due inside a dead window are lost.
    while (!pending_afterpulses.empty() && pending_afterpulses.top() < gate) pending_afterpulses.pop();
    const long long spontaneous = q0 > 0.0 ? gate + spontaneous_gap(rng) : kNever;
    const long long afterpulse = pending_afterpulses.empty() ? kNever : pending_afterpulses.top();
    const long long click = std::min(spontaneous, afterpulse);
    if (click >= total_gates) {
      live_gates += total_gates - gate;
      break;
    }
    live_gates += click - gate + 1;
    if (afterpulse == click) pending_afterpulses.pop();

    bool signal = false;
    if (spontaneous <= afterpulse) {
      signal = uniform(rng) < signal_given_click;
    } else {
      ++rec.afterpulse_clicks;
    }
    ++rec.singles_count;
    if (signal) ++rec.signal_clicks;

    if (click >= det2_ready) {
      const bool partner_hit = signal && uniform(rng) < partner;
      const bool noise_hit = uniform(rng) < noise2;
      if (partner_hit || noise_hit) {
        ++rec.coincidence_count;
        if (partner_hit) ++rec.true_coincidence_count;
        det2_ready = click + dead2;
      }
    }

    if (d1.afterpulse_prob > 0.0 && uniform(rng) < d1.afterpulse_prob) {
      pending_afterpulses.push(click + dead1 + 1 + afterpulse_gap(rng));
    }
    gate = click + dead1 + 1;
  }

  const double t = static_cast<double>(total_gates) / d1.gate_rate_hz;
  rec.singles_det1 = rec.singles_count / t;
  rec.coincidences = rec.coincidence_count / t;
  rec.singles_det2_triggered = rec.coincidences;
  rec.effective_gate_rate = live_gates / t;
  return rec;
}

}  // namespace entnet
