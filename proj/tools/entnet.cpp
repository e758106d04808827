#include <CLI11.hpp>

#include <iostream>
#include <set>

#include "entnet/errors.hpp"
#include "entnet/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kRuntimeError = 3, kIoError = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement distribution network simulator"};
  std::string scenario;
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::vector<std::string> formats{"csv", "json"};
  std::vector<std::string> overrides;
  bool quiet = false;

  app.add_option("--scenario", scenario, "Scenario to run")
      ->required()
      ->check(CLI::IsMember(entnet::scenario_names()));
  app.add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seeds, "Seed(s); replaces the seeds list of the config");
  app.add_option("--out", out_dir, "Output directory (default: output_dir from the config)");
  app.add_option("--format", formats, "Report formats: csv, json (comma separated, or 'none')")->delimiter(',');
  app.add_option("--override", overrides, "Config override key=value with a dotted path (repeatable)");
  app.add_flag("-q,--quiet", quiet, "Do not print the report table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    entnet::ScenarioConfig config = entnet::load_config(config_path, overrides);
    if (!seeds.empty()) config.seeds = seeds;
    std::set<entnet::ReportFormat> fmt;
    for (const auto& f : formats) {
      if (f != "none") fmt.insert(entnet::report_format_from_string(f));
    }
    const entnet::Report report = entnet::run_scenario(scenario, config);
    if (!quiet) std::cout << entnet::rows_to_csv(report.columns, report.rows);
    for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
    if (fmt.empty()) {
      std::cerr << "warning: no output format selected, nothing written\n";
      return kOk;
    }
    const auto written = entnet::emit_report(report, out_dir.empty() ? config.output_dir : out_dir, fmt);
    for (const auto& p : written) std::cerr << "wrote " << p.string() << "\n";
    return kOk;
  } catch (const entnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const entnet::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
