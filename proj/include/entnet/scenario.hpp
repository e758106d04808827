#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entnet/config.hpp"
#include "entnet/report.hpp"

namespace entnet {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"table1", "table2", "cwdm", "brightness", "capacity", "route", "phase-lock"};
  return names;
}

/// SplitMix64 of (base, stream): independent per-row and per-setting streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Configured rotation slope, or the slope calibrated from the cwdm section when it is 0.
double rotation_slope(const ScenarioConfig& config);

/// Pairs per second reaching the channel pair from all crystals, before any
/// channel or optics loss.
double channel_pair_rate(const ScenarioConfig& config, const EntangledChannelPair& pair);

/// Detection chain for one channel pair. DET1 sees the high-numbered channel.
/// Extra losses (e.g. switches) are per photon, in dB.
DetectionChain channel_chain(const ScenarioConfig& config, const EntangledChannelPair& pair,
                             double extra_loss_low_db = 0.0, double extra_loss_high_db = 0.0);

/// Emitted state after phase-lock dephasing, white-noise mixing with the
/// intrinsic visibility, and polarization rotation across the passband.
TwoQubitState delivered_state(const ScenarioConfig& config, const EntangledChannelPair& pair, std::uint64_t seed);

struct ChannelPairRun {
  EntangledChannelPair pair;
  std::uint64_t seed = 0;
  DetectionChain chain;
  TwoQubitState state;
  std::vector<CountRecord> counts;
  TomographyRecord record;
  ReconstructionResult raw;
  ReconstructionResult subtracted;
  double coincidence_rate = 0.0;  // Monte Carlo HH rate, c/s
  double predicted_rate = 0.0;    // analytic HH rate, c/s
  double background_rate = 0.0;   // analytic accidentals averaged over settings, c/s
};

/// Full chain: 16-setting Monte Carlo acquisition, then MLE on raw and
/// background-subtracted counts.
ChannelPairRun run_channel_pair(const ScenarioConfig& config, const EntangledChannelPair& pair, std::uint64_t seed,
                                double extra_loss_low_db = 0.0, double extra_loss_high_db = 0.0);

/// Looks up a configured channel pair in the plan.
EntangledChannelPair find_pair(const ScenarioConfig& config, const ChannelNumbers& numbers);

/// Runs a named scenario. Overrides use the --override syntax and are applied
/// on top of the config. Throws ConfigError for unknown names or bad overrides.
Report run_scenario(const std::string& name, const ScenarioConfig& config,
                    const std::vector<std::string>& overrides = {});

}  // namespace entnet
