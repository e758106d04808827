#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entnet/detection.hpp"
#include "entnet/fabric.hpp"
#include "entnet/phase_lock.hpp"
#include "entnet/source.hpp"
#include "entnet/wdm.hpp"

namespace entnet {

using Json = nlohmann::ordered_json;
using ChannelNumbers = std::pair<int, int>;

/// Eight-channel demultiplexer with the calibrated per-channel insertion losses.
ChannelPlan calibrated_dwdm_plan();

/// Fixed optics common to every channel, per photon.
struct OpticsConfig {
  double coupling_per_facet = 0.5;
  double stretcher_pbs_transmission = 0.9;
  double analyser_transmission = 0.75;

  /// Product of the three; the demux channel transmission multiplies on top.
  double fixed_transmission() const;
  bool operator==(const OpticsConfig&) const = default;
};

/// Detectors used for tomography. DET1 takes the higher-numbered channel.
struct DetectorsConfig {
  DetectorConfig det1{0.10, 100.0, 1e6, 10.0, 0.004, 0.59, 2.0};
  DetectorConfig det2{0.15, 2.0, 1e6, 10.0, 1e-4, 0.0, 2.0};
  double uncorrelated_flux_det2 = 2.2e5;
  bool operator==(const DetectorsConfig&) const = default;
};

/// Single-crystal rate measurement at two DET1 gate rates.
struct CalibrationRunConfig {
  double pair_rate = 1.23e7;
  double transmission1 = 0.2;
  double transmission2 = 0.2;
  DetectorConfig det1_low{0.10, 100.0, 1e5, 10.0, 0.004, 0.0, 2.0};
  DetectorConfig det1_high{0.10, 100.0, 1e6, 10.0, 0.004, 0.59, 2.0};
  DetectorConfig det2{0.15, 2.0, 1e6, 10.0, 0.0, 0.0, 2.0};
  double duration_s = 200.0;
  bool operator==(const CalibrationRunConfig&) const = default;
};

struct BrightnessConfig {
  double coincidence_rate = 75.0;
  double eta_det1 = 0.10;
  double eta_det2 = 0.15;
  double duty = 0.01;
  double pump_mw = 0.018;
  double bandwidth_ghz = 62.0;
  double spdc_output_w = 1.7e-9;
  double pump_input_w = 0.62e-3;
  CalibrationRunConfig calibration;
  bool operator==(const BrightnessConfig&) const = default;
};

/// Imperfections applied to the emitted state before detection.
struct StateModelConfig {
  /// White-noise mixing weight of the source state.
  double intrinsic_visibility = 0.99;
  /// Polarization rotation per nm across a passband; 0 means calibrate from the cwdm section.
  double rotation_slope_rad_per_nm = 0.0;
  bool operator==(const StateModelConfig&) const = default;
};

struct TomographyConfig {
  double time_per_setting_s = 20.0;
  std::vector<ChannelNumbers> pairs{{33, 35}, {31, 37}, {29, 39}, {27, 41}};
  bool operator==(const TomographyConfig&) const = default;
};

struct NamedSetting {
  std::string label;
  SwitchSetting setting;
  bool operator==(const NamedSetting&) const = default;
};

struct FabricConfig {
  /// "paper", "clos4" or "custom".
  std::string preset = "paper";
  std::optional<Fabric> custom;
  double switch_loss_db = 0.0;
  /// Channel pairs fed to the fabric: the first to a1/a2, the second to b1/b2.
  std::vector<ChannelNumbers> pairs{{31, 37}, {33, 35}};
  std::vector<NamedSetting> settings{
      {"I", {{"S1", SwitchState::Cross}, {"S2", SwitchState::Cross}}},
      {"II", {{"S1", SwitchState::Cross}, {"S2", SwitchState::Bar}}},
      {"III", {{"S1", SwitchState::Bar}, {"S2", SwitchState::Bar}}},
  };
  std::vector<std::pair<std::string, std::string>> route_requests{
      {"A", "B"}, {"A", "C"}, {"A", "D"}, {"B", "C"}, {"B", "D"}, {"C", "D"}};

  /// The fabric with switch_loss_db applied to every switch.
  Fabric build() const;
  bool operator==(const FabricConfig&) const = default;
};

struct CwdmConfig {
  double calibration_passband_nm = 13.0;
  double target_visibility = 0.87;
  std::vector<double> passbands_nm{13.0, 0.5};
  bool operator==(const CwdmConfig&) const = default;
};

struct CapacityConfig {
  double bandwidth_nm = 70.0;
  double center_nm = 1550.0;
  double spacing_ghz = 100.0;
  int quoted_channels = 90;
  int quoted_pairs = 45;
  bool operator==(const CapacityConfig&) const = default;
};

struct DispersionConfig {
  double channel_width_nm = 0.5;
  double length_km = 100.0;
  double smf_dispersion = 17.0;
  double nzdsf_dispersion_min = 5.5;
  double nzdsf_dispersion_max = 10.0;
  double pmd_coefficient = 0.04;
  bool operator==(const DispersionConfig&) const = default;
};

struct PhaseLockConfig {
  DriftModel drift;
  LockGains gains;
  double duration_s = 20.0;
  double target_phase = 0.0;
  std::vector<double> loop_rates_hz{10.0, 100.0, 1000.0};
  double series_duration_s = 1.0;
  int record_every = 10;
  bool operator==(const PhaseLockConfig&) const = default;
};

struct ScenarioConfig {
  SourceConfig source;
  int crystals = 2;
  ChannelPlan plan = calibrated_dwdm_plan();
  double pump_frequency_thz = 386.8;
  double pairing_tolerance_ghz = kDefaultPairingToleranceGhz;
  OpticsConfig optics;
  DetectorsConfig detectors;
  BrightnessConfig brightness;
  StateModelConfig state;
  TomographyConfig tomography;
  FabricConfig fabric;
  CwdmConfig cwdm;
  CapacityConfig capacity;
  DispersionConfig dispersion;
  PhaseLockConfig phase_lock;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";

  /// Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

/// Reads a JSON file (comments allowed) and resolves "include" entries
/// relative to the including file. Included documents are merged first and
/// the including file overrides them key by key.
Json load_config_json(const std::filesystem::path& path);

/// Applies "a.b.c=value" overrides; value is parsed as JSON, else taken as a string.
/// Numeric path segments index arrays.
void apply_overrides(Json& doc, const std::vector<std::string>& overrides);

/// Strict conversion: unknown keys and wrong types raise ConfigError.
ScenarioConfig config_from_json(const Json& doc);
Json config_to_json(const ScenarioConfig& config);

ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Git blob SHA-1 of the canonical serialized config.
std::string config_hash(const ScenarioConfig& config);

Json fabric_to_json(const Fabric& fabric);
Fabric fabric_from_json(const Json& j);

}  // namespace entnet
