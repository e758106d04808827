#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "entnet/config.hpp"
#include "entnet/detection.hpp"
#include "entnet/phase_lock.hpp"
#include "entnet/tomography.hpp"

namespace entnet {

/// Extra file written next to the main report, e.g. per-pair tomography counts.
struct Attachment {
  std::string filename;
  std::string content;
};

struct Report {
  std::string scenario;
  std::string config_hash;
  std::vector<std::string> columns;
  /// One object per row, keys in column order.
  Json rows = Json::array();
  /// Scenario-specific structured output (density matrices, routing, ...).
  Json details = Json::object();
  std::vector<std::string> notes;
  std::vector<Attachment> attachments;
  /// Wall-clock seconds; written only to the sidecar.
  double runtime_s = 0.0;

  void add_row(const Json& row);
};

enum class ReportFormat { Csv, Json };
ReportFormat report_format_from_string(const std::string& s);

/// Writes <scenario>.csv (plus attachments) and/or <scenario>.json, then a
/// <scenario>.meta.json sidecar with the timestamp and runtime. Report
/// files depend only on config and seeds. Returns the written paths; an
/// empty format set writes nothing. Throws IoError.
std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& out_dir,
                                               const std::set<ReportFormat>& formats);

/// CSV with a header row; numbers use the shortest round-trip form.
std::string rows_to_csv(const std::vector<std::string>& columns, const Json& rows);

// Serialization helpers.

/// 4x4 array of [re, im].
Json state_to_json(const TwoQubitState& rho);
TwoQubitState state_from_json(const Json& j);
/// Plain-text 4x4 grid: real part block, blank line, imaginary part block.
std::string state_to_grid(const TwoQubitState& rho);
Json metrics_to_json(const MetricsReport& m);
Json reconstruction_to_json(const ReconstructionResult& r);

/// setting,counts,time
std::string tomography_record_to_csv(const TomographyRecord& record);
TomographyRecord tomography_record_from_csv(const std::string& text, double background_rate = 0.0);

/// setting_alice,setting_bob,singles1_cps,singles2_cps,coinc_cps,duration_s,seed
std::string count_records_to_csv(const std::vector<CountRecord>& records);

/// channel_low,channel_high,lambda_low_nm,lambda_high_nm,rate_cps
std::string pair_rates_to_csv(const std::vector<PairRate>& rates);

/// {setting, users, channels, depth, loss_db}
Json routing_to_json(const RoutingResult& r);

/// t,theta,applied,signal
std::string lock_series_to_csv(const std::vector<LockSample>& series);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double x);

}  // namespace entnet
