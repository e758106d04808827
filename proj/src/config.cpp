#include "entnet/config.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "entnet/errors.hpp"

namespace entnet {

namespace {

// Reads fields of one JSON object, remembers which keys were consumed and
// rejects the rest.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void get(const std::string& key, double& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_number()) throw ConfigError(child(key) + ": expected a number");
    out = v.get<double>();
  }
  void get(const std::string& key, int& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
    out = v.get<int>();
  }
  void get(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_string()) throw ConfigError(child(key) + ": expected a string");
    out = v.get<std::string>();
  }
  void get(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_array()) throw ConfigError(child(key) + ": expected an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(child(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
  }
  void get(const std::string& key, std::vector<ChannelNumbers>& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    if (!v.is_array()) throw ConfigError(child(key) + ": expected an array of [low, high] channel numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        throw ConfigError(child(key) + ": expected an array of [low, high] channel numbers");
      }
      out.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(child(key) + ": unknown key");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

DetectorConfig detector_from_json(const Json& j, const std::string& path) {
  DetectorConfig d;
  Reader r(j, path);
  r.get("efficiency", d.efficiency);
  r.get("gate_width_ns", d.gate_width_ns);
  r.get("gate_rate_hz", d.gate_rate_hz);
  r.get("deadtime_us", d.deadtime_us);
  r.get("dark_count_prob_per_gate", d.dark_count_prob_per_gate);
  r.get("afterpulse_prob", d.afterpulse_prob);
  r.get("afterpulse_decay_gates", d.afterpulse_decay_gates);
  r.finish();
  return d;
}

Json detector_to_json(const DetectorConfig& d) {
  return Json{{"efficiency", d.efficiency},
              {"gate_width_ns", d.gate_width_ns},
              {"gate_rate_hz", d.gate_rate_hz},
              {"deadtime_us", d.deadtime_us},
              {"dark_count_prob_per_gate", d.dark_count_prob_per_gate},
              {"afterpulse_prob", d.afterpulse_prob},
              {"afterpulse_decay_gates", d.afterpulse_decay_gates}};
}

SourceConfig source_from_json(const Json& j, const std::string& path) {
  SourceConfig s;
  Reader r(j, path);
  r.get("center_wavelength_nm", s.center_wavelength_nm);
  r.get("spectral_fwhm_nm", s.spectral_fwhm_nm);
  r.get("pump_power_mw", s.pump_power_mw);
  r.get("phase_theta", s.phase_theta);
  r.get("crystal_balance", s.crystal_balance);
  r.get("intrinsic_efficiency", s.intrinsic_efficiency);
  r.get("coupling_efficiency_per_facet", s.coupling_efficiency_per_facet);
  r.get("brightness", s.brightness);
  r.get("shg_efficiency_crystal1", s.shg_efficiency_crystal1);
  r.get("shg_efficiency_crystal2", s.shg_efficiency_crystal2);
  r.finish();
  return s;
}

Json source_to_json(const SourceConfig& s) {
  return Json{{"center_wavelength_nm", s.center_wavelength_nm},
              {"spectral_fwhm_nm", s.spectral_fwhm_nm},
              {"pump_power_mw", s.pump_power_mw},
              {"phase_theta", s.phase_theta},
              {"crystal_balance", s.crystal_balance},
              {"intrinsic_efficiency", s.intrinsic_efficiency},
              {"coupling_efficiency_per_facet", s.coupling_efficiency_per_facet},
              {"brightness", s.brightness},
              {"shg_efficiency_crystal1", s.shg_efficiency_crystal1},
              {"shg_efficiency_crystal2", s.shg_efficiency_crystal2}};
}

ChannelPlan plan_from_json(const Json& j, const std::string& path) {
  ChannelPlan plan;
  plan.channels.clear();
  Reader r(j, path);
  r.get("grid_spacing_ghz", plan.grid_spacing_ghz);
  r.get("passband_width_ghz", plan.passband_width_ghz);
  if (r.has("channels")) {
    const Json& arr = r.raw("channels");
    if (!arr.is_array()) throw ConfigError(r.child("channels") + ": expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ItuChannel ch;
      ch.width_ghz = plan.passband_width_ghz;
      Reader c(arr[i], r.child("channels") + "." + std::to_string(i));
      c.get("number", ch.number);
      c.get("width_ghz", ch.width_ghz);
      c.get("insertion_loss_db", ch.insertion_loss_db);
      c.finish();
      plan.channels.push_back(ch);
    }
  }
  r.finish();
  return plan;
}

Json plan_to_json(const ChannelPlan& plan) {
  Json channels = Json::array();
  for (const auto& ch : plan.channels) {
    channels.push_back(
        Json{{"number", ch.number}, {"width_ghz", ch.width_ghz}, {"insertion_loss_db", ch.insertion_loss_db}});
  }
  return Json{{"grid_spacing_ghz", plan.grid_spacing_ghz},
              {"passband_width_ghz", plan.passband_width_ghz},
              {"channels", channels}};
}

Json pairs_to_json(const std::vector<ChannelNumbers>& pairs) {
  Json out = Json::array();
  for (const auto& [lo, hi] : pairs) out.push_back(Json::array({lo, hi}));
  return out;
}

SwitchSetting setting_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object of switch states");
  SwitchSetting s;
  for (const auto& [id, state] : j.items()) {
    if (!state.is_string()) throw ConfigError(path + "." + id + ": expected \"BAR\" or \"CROSS\"");
    try {
      s[id] = switch_state_from_string(state.get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ConfigError(path + "." + id + ": " + e.what());
    }
  }
  return s;
}

Json setting_to_json(const SwitchSetting& s) {
  Json out = Json::object();
  for (const auto& [id, state] : s) out[id] = to_string(state);
  return out;
}

FabricConfig fabric_config_from_json(const Json& j, const std::string& path) {
  FabricConfig f;
  Reader r(j, path);
  r.get("preset", f.preset);
  if (r.has("custom")) f.custom = fabric_from_json(r.raw("custom"));
  r.get("switch_loss_db", f.switch_loss_db);
  r.get("pairs", f.pairs);
  if (r.has("settings")) {
    const Json& arr = r.raw("settings");
    if (!arr.is_array()) throw ConfigError(r.child("settings") + ": expected an array");
    f.settings.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = r.child("settings") + "." + std::to_string(i);
      Reader s(arr[i], p);
      NamedSetting ns;
      s.get("label", ns.label);
      if (s.has("switches")) ns.setting = setting_from_json(s.raw("switches"), p + ".switches");
      s.finish();
      f.settings.push_back(ns);
    }
  }
  if (r.has("route_requests")) {
    const Json& arr = r.raw("route_requests");
    if (!arr.is_array()) throw ConfigError(r.child("route_requests") + ": expected an array of [user, user]");
    f.route_requests.clear();
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw ConfigError(r.child("route_requests") + ": expected an array of [user, user]");
      }
      f.route_requests.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  r.finish();
  return f;
}

Json fabric_config_to_json(const FabricConfig& f) {
  Json out{{"preset", f.preset}};
  if (f.custom) out["custom"] = fabric_to_json(*f.custom);
  out["switch_loss_db"] = f.switch_loss_db;
  out["pairs"] = pairs_to_json(f.pairs);
  Json settings = Json::array();
  for (const auto& s : f.settings) settings.push_back(Json{{"label", s.label}, {"switches", setting_to_json(s.setting)}});
  out["settings"] = settings;
  Json requests = Json::array();
  for (const auto& [a, b] : f.route_requests) requests.push_back(Json::array({a, b}));
  out["route_requests"] = requests;
  return out;
}

CalibrationRunConfig calibration_from_json(const Json& j, const std::string& path) {
  CalibrationRunConfig c;
  Reader r(j, path);
  r.get("pair_rate", c.pair_rate);
  r.get("transmission1", c.transmission1);
  r.get("transmission2", c.transmission2);
  if (r.has("det1_low")) c.det1_low = detector_from_json(r.raw("det1_low"), r.child("det1_low"));
  if (r.has("det1_high")) c.det1_high = detector_from_json(r.raw("det1_high"), r.child("det1_high"));
  if (r.has("det2")) c.det2 = detector_from_json(r.raw("det2"), r.child("det2"));
  r.get("duration_s", c.duration_s);
  r.finish();
  return c;
}

Json calibration_to_json(const CalibrationRunConfig& c) {
  return Json{{"pair_rate", c.pair_rate},
              {"transmission1", c.transmission1},
              {"transmission2", c.transmission2},
              {"det1_low", detector_to_json(c.det1_low)},
              {"det1_high", detector_to_json(c.det1_high)},
              {"det2", detector_to_json(c.det2)},
              {"duration_s", c.duration_s}};
}

std::uint64_t seed_from_json(const Json& e, const std::string& path) {
  if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long long>() >= 0)) {
    throw ConfigError(path + ": seeds must be non-negative integers");
  }
  return e.get<std::uint64_t>();
}

void merge_into(Json& base, const Json& patch) {
  for (const auto& [key, value] : patch.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      merge_into(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

Json load_recursive(const std::filesystem::path& path, int depth) {
  if (depth > 16) throw ConfigError(path.string() + ": include nesting too deep (cycle?)");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(path.string() + ": top level must be an object");
  if (!doc.contains("include")) return doc;

  std::vector<std::string> includes;
  const Json inc = doc["include"];
  if (inc.is_string()) {
    includes.push_back(inc.get<std::string>());
  } else if (inc.is_array()) {
    for (const auto& e : inc) {
      if (!e.is_string()) throw ConfigError(path.string() + ": include entries must be strings");
      includes.push_back(e.get<std::string>());
    }
  } else {
    throw ConfigError(path.string() + ": include must be a string or an array of strings");
  }
  doc.erase("include");

  Json merged = Json::object();
  for (const auto& name : includes) merge_into(merged, load_recursive(path.parent_path() / name, depth + 1));
  merge_into(merged, doc);
  return merged;
}

}  // namespace

ChannelPlan calibrated_dwdm_plan() {
  ChannelPlan plan = paper_dwdm_plan();
  const std::pair<int, double> losses[] = {{27, 1.302}, {29, 1.035}, {31, 2.218}, {33, 1.605},
                                           {35, 2.366}, {37, 1.637}, {39, 2.840}, {41, 3.098}};
  for (auto& ch : plan.channels) {
    for (const auto& [number, db] : losses) {
      if (ch.number == number) ch.insertion_loss_db = db;
    }
  }
  return plan;
}

double OpticsConfig::fixed_transmission() const {
  return coupling_per_facet * stretcher_pbs_transmission * analyser_transmission;
}

Fabric FabricConfig::build() const {
  Fabric base;
  if (preset == "paper") {
    base = paper_fabric_4user();
  } else if (preset == "clos4") {
    base = clos_fabric(4);
  } else if (preset == "custom") {
    if (!custom) throw ConfigError("fabric.custom: required when preset is \"custom\"");
    base = *custom;
  } else {
    throw ConfigError("fabric.preset: unknown preset '" + preset + "' (expected paper, clos4 or custom)");
  }
  if (switch_loss_db == 0.0) return base;
  std::vector<Switch2x2> switches = base.switches();
  for (auto& sw : switches) sw.insertion_loss_db = switch_loss_db;
  return Fabric(switches, base.inputs(), base.outputs(), base.links());
}

void ScenarioConfig::validate() const {
  auto wrap = [](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string(section) + ": " + e.what());
    }
  };
  wrap("source", [&] { source.validate(); });
  if (crystals < 1) throw ConfigError("crystals: must be at least 1");
  wrap("plan", [&] { plan.validate(); });
  wrap("detectors.det1", [&] { detectors.det1.validate(); });
  wrap("detectors.det2", [&] { detectors.det2.validate(); });
  if (!(detectors.uncorrelated_flux_det2 >= 0.0)) throw ConfigError("detectors.uncorrelated_flux_det2: must be >= 0");
  wrap("brightness.calibration.det1_low", [&] { brightness.calibration.det1_low.validate(); });
  wrap("brightness.calibration.det1_high", [&] { brightness.calibration.det1_high.validate(); });
  wrap("brightness.calibration.det2", [&] { brightness.calibration.det2.validate(); });
  if (!(state.intrinsic_visibility >= 0.0 && state.intrinsic_visibility <= 1.0)) {
    throw ConfigError("state.intrinsic_visibility: must lie in [0, 1]");
  }
  if (!(tomography.time_per_setting_s > 0.0)) throw ConfigError("tomography.time_per_setting_s: must be positive");

  const PairingResult pairing = pair_channels(plan, pump_frequency_thz, pairing_tolerance_ghz);
  auto check_pairs = [&](const std::vector<ChannelNumbers>& pairs, const std::string& where) {
    for (const auto& [lo, hi] : pairs) {
      if (!plan.contains(lo) || !plan.contains(hi)) {
        throw ConfigError(where + ": channel pair " + std::to_string(lo) + "-" + std::to_string(hi) +
                          " references a channel missing from the plan");
      }
      bool matched = false;
      for (const auto& p : pairing.pairs) matched = matched || (p.low.number == lo && p.high.number == hi);
      if (!matched) {
        throw ConfigError(where + ": channels " + std::to_string(lo) + " and " + std::to_string(hi) +
                          " are not energy-matched for the configured pump");
      }
    }
  };
  check_pairs(tomography.pairs, "tomography.pairs");
  check_pairs(fabric.pairs, "fabric.pairs");

  const Fabric f = fabric.build();
  if (fabric.preset == "paper" && fabric.pairs.size() != 2) {
    throw ConfigError("fabric.pairs: the four-user fabric takes exactly two channel pairs");
  }
  for (const auto& s : fabric.settings) {
    for (const auto& [id, state] : s.setting) {
      (void)state;
      bool known = false;
      for (const auto& sw : f.switches()) known = known || sw.id == id;
      if (!known) throw ConfigError("fabric.settings." + s.label + ": unknown switch '" + id + "'");
    }
    if (s.setting.size() != f.switches().size()) {
      throw ConfigError("fabric.settings." + s.label + ": every switch needs a state");
    }
  }
  for (const auto& [a, b] : fabric.route_requests) {
    if (!f.has_output(a) || !f.has_output(b)) {
      throw ConfigError("fabric.route_requests: unknown user in " + a + "-" + b);
    }
  }
  if (!(cwdm.target_visibility > 0.0 && cwdm.target_visibility < 1.0)) {
    throw ConfigError("cwdm.target_visibility: must lie in (0, 1)");
  }
  wrap("phase_lock.drift", [&] { phase_lock.drift.validate(); });
  wrap("phase_lock.gains", [&] { phase_lock.gains.validate(); });
  if (!(phase_lock.duration_s > 0.0)) throw ConfigError("phase_lock.duration_s: must be positive");
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
}

Json fabric_to_json(const Fabric& fabric) {
  Json switches = Json::array();
  for (const auto& sw : fabric.switches()) {
    switches.push_back(Json{{"id", sw.id}, {"state", to_string(sw.state)}, {"insertion_loss_db", sw.insertion_loss_db}});
  }
  Json links = Json::array();
  for (const auto& l : fabric.links()) links.push_back(Json::array({l.from, l.to}));
  return Json{{"switches", switches}, {"inputs", fabric.inputs()}, {"outputs", fabric.outputs()}, {"links", links}};
}

Fabric fabric_from_json(const Json& j) {
  Reader r(j, "fabric.custom");
  std::vector<Switch2x2> switches;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<Link> links;
  try {
    if (r.has("switches")) {
      for (const auto& s : r.raw("switches")) {
        Reader sr(s, "fabric.custom.switches");
        Switch2x2 sw;
        std::string state = "BAR";
        sr.get("id", sw.id);
        sr.get("state", state);
        sr.get("insertion_loss_db", sw.insertion_loss_db);
        sr.finish();
        sw.state = switch_state_from_string(state);
        switches.push_back(sw);
      }
    }
    if (r.has("inputs")) inputs = r.raw("inputs").get<std::vector<std::string>>();
    if (r.has("outputs")) outputs = r.raw("outputs").get<std::vector<std::string>>();
    if (r.has("links")) {
      for (const auto& l : r.raw("links")) {
        if (!l.is_array() || l.size() != 2) throw ConfigError("fabric.custom.links: expected [from, to] pairs");
        links.push_back({l[0].get<std::string>(), l[1].get<std::string>()});
      }
    }
    r.finish();
    return Fabric(switches, inputs, outputs, links);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("fabric.custom: ") + e.what());
  }
}

Json load_config_json(const std::filesystem::path& path) { return load_recursive(path, 0); }

void apply_overrides(Json& doc, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + ov + "': expected key=value");
    const std::string key = ov.substr(0, eq);
    const std::string text = ov.substr(eq + 1);
    Json value;
    try {
      value = Json::parse(text);
    } catch (const Json::parse_error&) {
      value = text;
    }

    Json* node = &doc;
    std::stringstream parts(key);
    std::string part;
    std::vector<std::string> segments;
    while (std::getline(parts, part, '.')) segments.push_back(part);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const std::string& seg = segments[i];
      const bool last = i + 1 == segments.size();
      if (node->is_array()) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(seg);
        } catch (const std::exception&) {
          throw ConfigError("override '" + key + "': '" + seg + "' is not an array index");
        }
        if (idx >= node->size()) throw ConfigError("override '" + key + "': index " + seg + " out of range");
        node = &(*node)[idx];
      } else {
        if (node->is_null()) *node = Json::object();
        if (!node->is_object()) throw ConfigError("override '" + key + "': '" + seg + "' is not inside an object");
        node = &(*node)[seg];
      }
      if (last) *node = value;
    }
  }
}

ScenarioConfig config_from_json(const Json& doc) {
  ScenarioConfig c;
  Reader r(doc, "");
  if (r.has("source")) c.source = source_from_json(r.raw("source"), "source");
  r.get("crystals", c.crystals);
  if (r.has("plan")) c.plan = plan_from_json(r.raw("plan"), "plan");
  r.get("pump_frequency_thz", c.pump_frequency_thz);
  r.get("pairing_tolerance_ghz", c.pairing_tolerance_ghz);

  if (r.has("optics")) {
    Reader o(r.raw("optics"), "optics");
    o.get("coupling_per_facet", c.optics.coupling_per_facet);
    o.get("stretcher_pbs_transmission", c.optics.stretcher_pbs_transmission);
    o.get("analyser_transmission", c.optics.analyser_transmission);
    o.finish();
  }
  if (r.has("detectors")) {
    Reader d(r.raw("detectors"), "detectors");
    if (d.has("det1")) c.detectors.det1 = detector_from_json(d.raw("det1"), "detectors.det1");
    if (d.has("det2")) c.detectors.det2 = detector_from_json(d.raw("det2"), "detectors.det2");
    d.get("uncorrelated_flux_det2", c.detectors.uncorrelated_flux_det2);
    d.finish();
  }
  if (r.has("brightness")) {
    Reader b(r.raw("brightness"), "brightness");
    auto& bc = c.brightness;
    b.get("coincidence_rate", bc.coincidence_rate);
    b.get("eta_det1", bc.eta_det1);
    b.get("eta_det2", bc.eta_det2);
    b.get("duty", bc.duty);
    b.get("pump_mw", bc.pump_mw);
    b.get("bandwidth_ghz", bc.bandwidth_ghz);
    b.get("spdc_output_w", bc.spdc_output_w);
    b.get("pump_input_w", bc.pump_input_w);
    if (b.has("calibration")) bc.calibration = calibration_from_json(b.raw("calibration"), "brightness.calibration");
    b.finish();
  }
  if (r.has("state")) {
    Reader s(r.raw("state"), "state");
    s.get("intrinsic_visibility", c.state.intrinsic_visibility);
    s.get("rotation_slope_rad_per_nm", c.state.rotation_slope_rad_per_nm);
    s.finish();
  }
  if (r.has("tomography")) {
    Reader t(r.raw("tomography"), "tomography");
    t.get("time_per_setting_s", c.tomography.time_per_setting_s);
    t.get("pairs", c.tomography.pairs);
    t.finish();
  }
  if (r.has("fabric")) c.fabric = fabric_config_from_json(r.raw("fabric"), "fabric");
  if (r.has("cwdm")) {
    Reader w(r.raw("cwdm"), "cwdm");
    w.get("calibration_passband_nm", c.cwdm.calibration_passband_nm);
    w.get("target_visibility", c.cwdm.target_visibility);
    w.get("passbands_nm", c.cwdm.passbands_nm);
    w.finish();
  }
  if (r.has("capacity")) {
    Reader k(r.raw("capacity"), "capacity");
    k.get("bandwidth_nm", c.capacity.bandwidth_nm);
    k.get("center_nm", c.capacity.center_nm);
    k.get("spacing_ghz", c.capacity.spacing_ghz);
    k.get("quoted_channels", c.capacity.quoted_channels);
    k.get("quoted_pairs", c.capacity.quoted_pairs);
    k.finish();
  }
  if (r.has("dispersion")) {
    Reader d(r.raw("dispersion"), "dispersion");
    auto& dc = c.dispersion;
    d.get("channel_width_nm", dc.channel_width_nm);
    d.get("length_km", dc.length_km);
    d.get("smf_dispersion", dc.smf_dispersion);
    d.get("nzdsf_dispersion_min", dc.nzdsf_dispersion_min);
    d.get("nzdsf_dispersion_max", dc.nzdsf_dispersion_max);
    d.get("pmd_coefficient", dc.pmd_coefficient);
    d.finish();
  }
  if (r.has("phase_lock")) {
    Reader p(r.raw("phase_lock"), "phase_lock");
    auto& pl = c.phase_lock;
    p.get("drift_rate", pl.drift.rate);
    p.get("time_step_s", pl.drift.time_step);
    p.get("kp", pl.gains.kp);
    p.get("ki", pl.gains.ki);
    p.get("loop_rate_hz", pl.gains.loop_rate_hz);
    p.get("duration_s", pl.duration_s);
    p.get("target_phase", pl.target_phase);
    p.get("loop_rates_hz", pl.loop_rates_hz);
    p.get("series_duration_s", pl.series_duration_s);
    p.get("record_every", pl.record_every);
    p.finish();
  }
  if (r.has("seeds")) {
    const Json& s = r.raw("seeds");
    c.seeds.clear();
    if (s.is_array()) {
      for (const auto& e : s) c.seeds.push_back(seed_from_json(e, "seeds"));
    } else {
      c.seeds.push_back(seed_from_json(s, "seeds"));
    }
  }
  r.get("output_dir", c.output_dir);
  r.finish();
  c.validate();
  return c;
}

Json config_to_json(const ScenarioConfig& c) {
  Json out;
  out["source"] = source_to_json(c.source);
  out["crystals"] = c.crystals;
  out["plan"] = plan_to_json(c.plan);
  out["pump_frequency_thz"] = c.pump_frequency_thz;
  out["pairing_tolerance_ghz"] = c.pairing_tolerance_ghz;
  out["optics"] = Json{{"coupling_per_facet", c.optics.coupling_per_facet},
                       {"stretcher_pbs_transmission", c.optics.stretcher_pbs_transmission},
                       {"analyser_transmission", c.optics.analyser_transmission}};
  out["detectors"] = Json{{"det1", detector_to_json(c.detectors.det1)},
                          {"det2", detector_to_json(c.detectors.det2)},
                          {"uncorrelated_flux_det2", c.detectors.uncorrelated_flux_det2}};
  const auto& b = c.brightness;
  out["brightness"] = Json{{"coincidence_rate", b.coincidence_rate}, {"eta_det1", b.eta_det1},
                           {"eta_det2", b.eta_det2},                 {"duty", b.duty},
                           {"pump_mw", b.pump_mw},                   {"bandwidth_ghz", b.bandwidth_ghz},
                           {"spdc_output_w", b.spdc_output_w},       {"pump_input_w", b.pump_input_w},
                           {"calibration", calibration_to_json(b.calibration)}};
  out["state"] = Json{{"intrinsic_visibility", c.state.intrinsic_visibility},
                      {"rotation_slope_rad_per_nm", c.state.rotation_slope_rad_per_nm}};
  out["tomography"] =
      Json{{"time_per_setting_s", c.tomography.time_per_setting_s}, {"pairs", pairs_to_json(c.tomography.pairs)}};
  out["fabric"] = fabric_config_to_json(c.fabric);
  out["cwdm"] = Json{{"calibration_passband_nm", c.cwdm.calibration_passband_nm},
                     {"target_visibility", c.cwdm.target_visibility},
                     {"passbands_nm", c.cwdm.passbands_nm}};
  out["capacity"] = Json{{"bandwidth_nm", c.capacity.bandwidth_nm},
                         {"center_nm", c.capacity.center_nm},
                         {"spacing_ghz", c.capacity.spacing_ghz},
                         {"quoted_channels", c.capacity.quoted_channels},
                         {"quoted_pairs", c.capacity.quoted_pairs}};
  const auto& d = c.dispersion;
  out["dispersion"] = Json{{"channel_width_nm", d.channel_width_nm},
                           {"length_km", d.length_km},
                           {"smf_dispersion", d.smf_dispersion},
                           {"nzdsf_dispersion_min", d.nzdsf_dispersion_min},
                           {"nzdsf_dispersion_max", d.nzdsf_dispersion_max},
                           {"pmd_coefficient", d.pmd_coefficient}};
  const auto& p = c.phase_lock;
  out["phase_lock"] = Json{{"drift_rate", p.drift.rate},       {"time_step_s", p.drift.time_step},
                           {"kp", p.gains.kp},                 {"ki", p.gains.ki},
                           {"loop_rate_hz", p.gains.loop_rate_hz}, {"duration_s", p.duration_s},
                           {"target_phase", p.target_phase},   {"loop_rates_hz", p.loop_rates_hz},
                           {"series_duration_s", p.series_duration_s}, {"record_every", p.record_every}};
  out["seeds"] = c.seeds;
  out["output_dir"] = c.output_dir;
  return out;
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  Json doc = load_config_json(path);
  apply_overrides(doc, overrides);
  return config_from_json(doc);
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string body = config_to_json(config).dump();
  const std::string blob = "blob " + std::to_string(body.size()) + '\0' + body;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw Error("config_hash: SHA-1 computation failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace entnet
