#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "entnet/errors.hpp"
#include "entnet/scenario.hpp"

using namespace entnet;
namespace fs = std::filesystem;

namespace {

const fs::path kSourceDir = ENTNET_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("entnet_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string cli() { return std::string(ENTNET_CLI_PATH); }

std::string paper_config() { return (kSourceDir / "config" / "paper.json").string(); }

}  // namespace

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 10; ++base)
    for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(base, s));
  CHECK(seen.size() == 1000);
}

TEST_CASE("shipped config equals the built-in defaults") {
  const ScenarioConfig file = load_config(kSourceDir / "config" / "paper.json");
  CHECK(file == ScenarioConfig{});
  CHECK(config_hash(file) == config_hash(ScenarioConfig{}));
}

TEST_CASE("config round trip") {
  ScenarioConfig c;
  c.seeds = {3, 9};
  c.state.intrinsic_visibility = 0.97;
  c.fabric.switch_loss_db = 0.8;
  c.phase_lock.gains.kp = 0.2;
  const Json j = config_to_json(c);
  const ScenarioConfig back = config_from_json(j);
  CHECK(back == c);
  CHECK(config_to_json(back).dump() == j.dump());
  CHECK(config_from_json(Json::parse(j.dump(2))) == c);
}

TEST_CASE("config hash is the git blob id of the canonical text") {
  const ScenarioConfig c;
  const std::string hash = config_hash(c);
  CHECK(hash.size() == 40);
  const fs::path dir = scratch("hash");
  const fs::path body = dir / "config.json";
  std::ofstream(body, std::ios::binary) << config_to_json(c).dump();
  FILE* pipe = popen(("git hash-object " + body.string() + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[64] = {};
  const bool got = std::fgets(buf, sizeof buf, pipe) != nullptr;
  pclose(pipe);
  if (got) {
    CHECK(std::string(buf, 40) == hash);
  } else {
    MESSAGE("git not available, hash oracle skipped");
  }
  ScenarioConfig other;
  other.seeds = {2};
  CHECK(config_hash(other) != hash);
}

TEST_CASE("overrides and strict keys") {
  Json doc = config_to_json(ScenarioConfig{});
  apply_overrides(doc, {"state.intrinsic_visibility=0.95", "seeds=[4,5]", "fabric.switch_loss_db=1.5", "seeds.1=6"});
  const ScenarioConfig c = config_from_json(doc);
  CHECK(c.state.intrinsic_visibility == 0.95);
  CHECK(c.seeds == std::vector<std::uint64_t>{4, 6});
  CHECK(c.fabric.switch_loss_db == 1.5);

  Json bad = config_to_json(ScenarioConfig{});
  apply_overrides(bad, {"state.intrinsic_visiblity=0.9"});
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  Json typed = config_to_json(ScenarioConfig{});
  apply_overrides(typed, {"state.intrinsic_visibility=high"});
  CHECK_THROWS_AS(config_from_json(typed), ConfigError);
  Json j = config_to_json(ScenarioConfig{});
  CHECK_THROWS_AS(apply_overrides(j, {"novalue"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(j, {"seeds.7=1"}), ConfigError);

  Json empty_seeds = config_to_json(ScenarioConfig{});
  empty_seeds["seeds"] = Json::array();
  CHECK_THROWS_AS(config_from_json(empty_seeds), ConfigError);
  Json missing_channel = config_to_json(ScenarioConfig{});
  apply_overrides(missing_channel, {"tomography.pairs.0=[28,40]"});
  CHECK_THROWS_AS(config_from_json(missing_channel), ConfigError);
}

TEST_CASE("config include merges with local overrides") {
  const fs::path dir = scratch("include");
  std::ofstream(dir / "local.json") << "// local tweaks\n{\n  \"include\": \"" << paper_config()
                                    << "\",\n  \"seeds\": [7], // seven\n  \"state\": {\"intrinsic_visibility\": 0.9}\n}\n";
  const ScenarioConfig c = load_config(dir / "local.json");
  CHECK(c.seeds == std::vector<std::uint64_t>{7});
  CHECK(c.state.intrinsic_visibility == 0.9);
  CHECK(c.state.rotation_slope_rad_per_nm == ScenarioConfig{}.state.rotation_slope_rad_per_nm);
  CHECK(c.detectors == ScenarioConfig{}.detectors);

  std::ofstream(dir / "loop.json") << "{\"include\": \"loop.json\"}";
  CHECK_THROWS_AS(load_config(dir / "loop.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "absent.json"), ConfigError);
  const ScenarioConfig o = load_config(dir / "local.json", {"seeds=[8]"});
  CHECK(o.seeds == std::vector<std::uint64_t>{8});
}

TEST_CASE("unknown scenario") {
  CHECK_THROWS_AS(run_scenario("table3", ScenarioConfig{}), ConfigError);
  CHECK_THROWS_AS(run_scenario("capacity", ScenarioConfig{}, {"capacity.bogus=1"}), ConfigError);
}

TEST_CASE("capacity report") {
  const Report r = run_scenario("capacity", ScenarioConfig{});
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0]["channels"] == 87);
  CHECK(r.rows[0]["pairs"] == 43);
  CHECK(r.rows[0]["quoted_channels"] == 90);
  CHECK(r.notes.size() == 1);
  CHECK(r.config_hash == config_hash(ScenarioConfig{}));
}

TEST_CASE("route report") {
  const Report r = run_scenario("route", ScenarioConfig{});
  CHECK(r.rows.size() == 6);
  for (const auto& row : r.rows) CHECK(row["status"] == "ok");
  CHECK(r.details["fabric_stats"]["max_depth"] == 2);
  CHECK(r.details["clos4_stats"]["switch_count"] == 6);
}

TEST_CASE("report rows follow the schema") {
  Report r;
  r.columns = {"a", "b"};
  r.add_row(Json{{"b", 2}, {"a", 1}});
  CHECK(r.rows[0].begin().key() == "a");
  CHECK_THROWS_AS(r.add_row(Json{{"a", 1}}), Error);
  CHECK_THROWS_AS(r.add_row(Json{{"a", 1}, {"b", 2}, {"c", 3}}), Error);
  CHECK(rows_to_csv(r.columns, r.rows) == "a,b\n1,2\n");
  r.add_row(Json{{"a", "x,y"}, {"b", 0.1}});
  CHECK(rows_to_csv(r.columns, r.rows) == "a,b\n1,2\n\"x,y\",0.1\n");
}

TEST_CASE("emit_report writes nothing for an empty format set") {
  const fs::path dir = scratch("empty") / "sub";
  const Report r = run_scenario("capacity", ScenarioConfig{});
  CHECK(emit_report(r, dir, {}).empty());
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("emit_report surfaces I/O failures") {
  const fs::path dir = scratch("io");
  std::ofstream(dir / "file") << "x";
  const Report r = run_scenario("capacity", ScenarioConfig{});
  CHECK_THROWS_AS(emit_report(r, dir / "file" / "out", {ReportFormat::Csv}), IoError);
}

TEST_CASE("serialization helpers round trip") {
  const auto rho = werner_state(0.7);
  CHECK(state_from_json(state_to_json(rho)) == rho);
  TomographyRecord rec = simulate_tomography(phi_plus(), 100, 3, 2, 5);
  rec.background_rate = 2;
  CHECK(tomography_record_from_csv(tomography_record_to_csv(rec), 2) == rec);
  CHECK_THROWS_AS(tomography_record_from_csv("setting,counts,time\nHH,1,1\n"), InvalidArgument);
  for (double x : {0.1, 1.0 / 3.0, 4.48e5, -2.5e-12}) CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("table1 report") {
  const ScenarioConfig config;
  const Report a = run_scenario("table1", config);
  REQUIRE(a.rows.size() == 4);
  REQUIRE(a.details["pairs"].size() == 4);
  for (const auto& p : a.details["pairs"]) {
    for (const char* which : {"raw", "subtracted"}) {
      const TwoQubitState rho = state_from_json(p[which]["rho"]);
      CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-9);
      CHECK(std::abs(rho.matrix().trace().imag()) < 1e-9);
    }
  }
  for (const auto& row : a.rows) {
    CHECK(row.contains("seed"));
    CHECK(row["mle_converged"] == true);
  }

  const fs::path d1 = scratch("t1a"), d2 = scratch("t1b");
  const auto files = emit_report(a, d1, {ReportFormat::Csv, ReportFormat::Json});
  const Report b = run_scenario("table1", config);
  emit_report(b, d2, {ReportFormat::Csv, ReportFormat::Json});
  CHECK(files.size() == 4 * 3 + 1 + 3);
  for (const auto& f : files) {
    if (f.filename() == "table1.meta.json") continue;
    INFO(f.filename().string());
    CHECK(slurp(f) == slurp(d2 / f.filename()));
  }
  const Json doc = Json::parse(slurp(d1 / "table1.json"));
  CHECK(doc["rows"].size() == 4);
  CHECK(doc["config_hash"] == config_hash(config));
  CHECK(Json::parse(slurp(d1 / "table1.meta.json")).contains("generated_at"));
  std::istringstream csv(slurp(d1 / "table1.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 5);
}

TEST_CASE("table2 report") {
  const Report r = run_scenario("table2", ScenarioConfig{});
  REQUIRE(r.rows.size() == 6);
  std::set<std::string> users;
  for (const auto& row : r.rows) users.insert(row["users"].get<std::string>());
  CHECK(users == std::set<std::string>{"A-D", "B-C", "A-C", "B-D", "A-B", "C-D"});
  const std::string csv = rows_to_csv(r.columns, r.rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("cli exit codes") {
  const std::string base = cli() + " --config " + paper_config();
  const fs::path out = scratch("cli");
  CHECK(run(base + " --scenario capacity --out " + out.string()) == 0);
  CHECK(fs::exists(out / "capacity.csv"));
  CHECK(fs::exists(out / "capacity.json"));
  CHECK(fs::exists(out / "capacity.meta.json"));
  CHECK(run(base + " --scenario capacity --format none") == 0);
  CHECK(run(base + " --scenario nosuch") == 2);
  CHECK(run(cli() + " --scenario capacity") == 2);
  CHECK(run(base + " --scenario capacity --override capacity.bogus=1") == 2);
  CHECK(run(base + " --scenario capacity --format xml") == 2);
  CHECK(run(cli() + " --scenario capacity --config " + (out / "missing.json").string()) == 2);
  std::ofstream(out / "blocker") << "x";
  CHECK(run(base + " --scenario capacity --out " + (out / "blocker" / "dir").string()) == 4);
}
