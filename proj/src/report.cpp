#include "entnet/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "entnet/errors.hpp"

namespace entnet {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string csv_cell(const Json& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  return s;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void Report::add_row(const Json& row) {
  Json ordered = Json::object();
  for (const auto& c : columns) {
    if (!row.contains(c)) throw Error("report row is missing column '" + c + "'");
    ordered[c] = row.at(c);
  }
  if (ordered.size() != row.size()) throw Error("report row has columns outside the schema");
  rows.push_back(ordered);
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw ConfigError("unknown format '" + s + "' (expected csv or json)");
}

std::string rows_to_csv(const std::vector<std::string>& columns, const Json& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_cell(row.at(columns[i]));
    out << "\n";
  }
  return out.str();
}

std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& out_dir,
                                               const std::set<ReportFormat>& formats) {
  std::vector<std::filesystem::path> written;
  if (formats.empty()) return written;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  if (formats.count(ReportFormat::Csv)) {
    const auto path = out_dir / (report.scenario + ".csv");
    write_file(path, rows_to_csv(report.columns, report.rows));
    written.push_back(path);
    for (const auto& a : report.attachments) {
      const auto apath = out_dir / a.filename;
      write_file(apath, a.content);
      written.push_back(apath);
    }
  }
  if (formats.count(ReportFormat::Json)) {
    Json doc{{"scenario", report.scenario},
             {"config_hash", report.config_hash},
             {"columns", report.columns},
             {"rows", report.rows},
             {"details", report.details},
             {"notes", report.notes}};
    const auto path = out_dir / (report.scenario + ".json");
    write_file(path, doc.dump(2) + "\n");
    written.push_back(path);
  }
  Json meta{{"scenario", report.scenario},
            {"config_hash", report.config_hash},
            {"generated_at", utc_timestamp()},
            {"runtime_s", report.runtime_s}};
  const auto meta_path = out_dir / (report.scenario + ".meta.json");
  write_file(meta_path, meta.dump(2) + "\n");
  written.push_back(meta_path);
  return written;
}

Json state_to_json(const TwoQubitState& rho) {
  Json out = Json::array();
  for (int i = 0; i < 4; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 4; ++j) row.push_back(Json::array({rho.matrix()(i, j).real(), rho.matrix()(i, j).imag()}));
    out.push_back(row);
  }
  return out;
}

TwoQubitState state_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw InvalidArgument("state json: expected a 4x4 array");
  Matrix4c m;
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_array() || j[i].size() != 4) throw InvalidArgument("state json: expected a 4x4 array");
    for (int k = 0; k < 4; ++k) {
      const Json& e = j[i][k];
      if (!e.is_array() || e.size() != 2) throw InvalidArgument("state json: entries must be [re, im]");
      m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return TwoQubitState::allow_unphysical(m);
}

std::string state_to_grid(const TwoQubitState& rho) {
  std::ostringstream out;
  char buf[32];
  for (int part = 0; part < 2; ++part) {
    out << (part == 0 ? "# real\n" : "\n# imag\n");
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const Complex z = rho.matrix()(i, j);
        std::snprintf(buf, sizeof buf, "%s%+.6f", j ? " " : "", part == 0 ? z.real() : z.imag());
        out << buf;
      }
      out << "\n";
    }
  }
  return out.str();
}

Json metrics_to_json(const MetricsReport& m) {
  return Json{{"fidelity", m.fidelity},           {"purity", m.purity},       {"correlation_z", m.correlation_z},
              {"correlation_x", m.correlation_x}, {"qber_z", m.qber_z},       {"qber_x", m.qber_x},
              {"qber_mean", m.qber_mean}};
}

Json reconstruction_to_json(const ReconstructionResult& r) {
  Json out{{"method", to_string(r.method)}, {"physical", r.physical}, {"rho", state_to_json(r.rho)}};
  if (r.physical) out["metrics"] = metrics_to_json(metrics(r.rho));
  if (r.method == ReconstructionMethod::Mle) {
    out["log_likelihood"] = r.log_likelihood;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    out["gradient_norm"] = r.gradient_norm;
  }
  return out;
}

std::string tomography_record_to_csv(const TomographyRecord& record) {
  std::ostringstream out;
  out << "setting,counts,time\n";
  const auto& settings = tomography_settings();
  for (std::size_t k = 0; k < 16; ++k) {
    out << settings[k].label() << "," << format_number(record.counts[k]) << ","
        << format_number(record.acquisition_time_per_setting) << "\n";
  }
  return out.str();
}

TomographyRecord tomography_record_from_csv(const std::string& text, double background_rate) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "setting,counts,time") {
    throw InvalidArgument("tomography csv: expected header 'setting,counts,time'");
  }
  TomographyRecord rec;
  rec.background_rate = background_rate;
  std::array<bool, 16> seen{};
  std::optional<double> time;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string label, counts, t;
    if (!std::getline(row, label, ',') || !std::getline(row, counts, ',') || !std::getline(row, t)) {
      throw InvalidArgument("tomography csv: malformed row '" + line + "'");
    }
    const PolarizationSetting s = setting_from_label(label);
    const std::size_t k = static_cast<std::size_t>(s.alice) * 4 + static_cast<std::size_t>(s.bob);
    if (seen[k]) throw InvalidArgument("tomography csv: duplicate setting " + label);
    seen[k] = true;
    rec.counts[k] = std::stod(counts);
    const double tv = std::stod(t);
    if (time && *time != tv) throw InvalidArgument("tomography csv: settings must share one acquisition time");
    time = tv;
  }
  if (std::count(seen.begin(), seen.end(), true) != 16) throw InvalidArgument("tomography csv: need all 16 settings");
  rec.acquisition_time_per_setting = *time;
  rec.validate();
  return rec;
}

std::string count_records_to_csv(const std::vector<CountRecord>& records) {
  std::ostringstream out;
  out << "setting_alice,setting_bob,singles1_cps,singles2_cps,coinc_cps,duration_s,seed\n";
  for (const auto& r : records) {
    out << to_char(r.setting.alice) << "," << to_char(r.setting.bob) << "," << format_number(r.singles_det1) << ","
        << format_number(r.singles_det2_triggered) << "," << format_number(r.coincidences) << ","
        << format_number(r.duration) << "," << r.seed << "\n";
  }
  return out.str();
}

std::string pair_rates_to_csv(const std::vector<PairRate>& rates) {
  std::ostringstream out;
  out << "channel_low,channel_high,lambda_low_nm,lambda_high_nm,rate_cps\n";
  for (const auto& r : rates) {
    out << r.pair.low.number << "," << r.pair.high.number << "," << format_number(r.pair.low.center_wavelength_nm())
        << "," << format_number(r.pair.high.center_wavelength_nm()) << "," << format_number(r.rate) << "\n";
  }
  return out.str();
}

Json routing_to_json(const RoutingResult& r) {
  Json setting = Json::object();
  for (const auto& [id, state] : r.setting) setting[id] = to_string(state);
  return Json{{"setting", setting},
              {"users", Json::array({r.user_pair.first, r.user_pair.second})},
              {"channels", Json::array({r.channel_pair.low.number, r.channel_pair.high.number})},
              {"depth", Json::array({r.per_photon_depth.first, r.per_photon_depth.second})},
              {"loss_db", Json::array({r.per_photon_loss_db.first, r.per_photon_loss_db.second})}};
}

std::string lock_series_to_csv(const std::vector<LockSample>& series) {
  std::ostringstream out;
  out << "t,theta,applied,signal\n";
  for (const auto& s : series) {
    out << format_number(s.t) << "," << format_number(s.theta) << "," << format_number(s.applied) << ","
        << format_number(s.signal) << "\n";
  }
  return out.str();
}

}  // namespace entnet
