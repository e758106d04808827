#include "entnet/fabric.hpp"

#include <cctype>
#include <algorithm>
#include <functional>
#include <set>

#include "entnet/errors.hpp"

namespace entnet {

const char* to_string(SwitchState s) { return s == SwitchState::Bar ? "BAR" : "CROSS"; }

SwitchState switch_state_from_string(const std::string& s) {
  std::string up = s;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "BAR") return SwitchState::Bar;
  if (up == "CROSS") return SwitchState::Cross;
  throw InvalidArgument("unknown switch state '" + s + "', expected BAR or CROSS");
}

std::string Endpoint::str() const {
  switch (kind) {
    case Kind::Input:
    case Kind::Output: return name;
    case Kind::SwitchIn: return name + ".in" + std::to_string(port);
    case Kind::SwitchOut: return name + ".out" + std::to_string(port);
  }
  return name;
}

namespace {

// Splits "S1.out0" into ("S1", "out", 0). Returns false for plain port names.
bool split_switch_port(const std::string& s, std::string& id, std::string& dir, int& port) {
  const auto dot = s.rfind('.');
  if (dot == std::string::npos) return false;
  const std::string tail = s.substr(dot + 1);
  id = s.substr(0, dot);
  if (tail == "in0" || tail == "in1") {
    dir = "in";
  } else if (tail == "out0" || tail == "out1") {
    dir = "out";
  } else {
    throw InvalidArgument("bad switch port '" + s + "', expected <id>.in0|in1|out0|out1");
  }
  port = tail.back() - '0';
  return true;
}

}  // namespace

Fabric::Fabric(std::vector<Switch2x2> switches, std::vector<std::string> inputs,
               std::vector<std::string> outputs, std::vector<Link> links)
    : switches_(std::move(switches)),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      links_(std::move(links)) {
  build_index();
}

const Switch2x2& Fabric::find_switch(const std::string& id) const {
  for (const auto& sw : switches_) {
    if (sw.id == id) return sw;
  }
  throw InvalidArgument("fabric has no switch '" + id + "'");
}

bool Fabric::has_output(const std::string& name) const {
  return std::find(outputs_.begin(), outputs_.end(), name) != outputs_.end();
}

bool Fabric::has_input(const std::string& name) const {
  return std::find(inputs_.begin(), inputs_.end(), name) != inputs_.end();
}

Endpoint Fabric::parse_source(const std::string& s) const {
  std::string id, dir;
  int port = 0;
  if (split_switch_port(s, id, dir, port)) {
    find_switch(id);
    if (dir != "out") throw InvalidArgument("link source '" + s + "' must be a switch output");
    return {Endpoint::Kind::SwitchOut, id, port};
  }
  if (!has_input(s)) throw InvalidArgument("link source '" + s + "' is not a fabric input");
  return {Endpoint::Kind::Input, s, 0};
}

Endpoint Fabric::parse_sink(const std::string& s) const {
  std::string id, dir;
  int port = 0;
  if (split_switch_port(s, id, dir, port)) {
    find_switch(id);
    if (dir != "in") throw InvalidArgument("link target '" + s + "' must be a switch input");
    return {Endpoint::Kind::SwitchIn, id, port};
  }
  if (!has_output(s)) throw InvalidArgument("link target '" + s + "' is not a fabric output");
  return {Endpoint::Kind::Output, s, 0};
}

void Fabric::build_index() {
  std::set<std::string> names;
  for (const auto& sw : switches_) {
    if (sw.id.empty()) throw InvalidArgument("switch id must not be empty");
    if (!names.insert(sw.id).second) throw InvalidArgument("duplicate switch id '" + sw.id + "'");
    if (sw.insertion_loss_db < 0.0) throw InvalidArgument("switch '" + sw.id + "' has negative loss");
  }
  for (const auto& port : inputs_) {
    if (!names.insert(port).second) throw InvalidArgument("duplicate port name '" + port + "'");
  }
  for (const auto& port : outputs_) {
    if (!names.insert(port).second) throw InvalidArgument("duplicate port name '" + port + "'");
  }
  if (inputs_.size() != outputs_.size()) {
    throw InvalidArgument("fabric must have as many outputs as inputs");
  }

  next_.clear();
  std::set<Endpoint> sinks;
  for (const auto& link : links_) {
    const Endpoint src = parse_source(link.from);
    const Endpoint dst = parse_sink(link.to);
    if (!next_.emplace(src, dst).second) throw InvalidArgument("port '" + link.from + "' has two links");
    if (!sinks.insert(dst).second) throw InvalidArgument("port '" + link.to + "' has two links");
  }
  const std::size_t expected = inputs_.size() + 2 * switches_.size();
  if (next_.size() != expected) {
    throw InvalidArgument("fabric wiring is incomplete: every input and switch output needs one link");
  }

  // Switch-level DAG check: colour-marking DFS.
  std::map<std::string, int> mark;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    int& m = mark[id];
    if (m == 2) return;
    if (m == 1) throw InvalidArgument("fabric wiring contains a cycle through switch '" + id + "'");
    m = 1;
    for (int p = 0; p < 2; ++p) {
      const Endpoint& dst = next_.at({Endpoint::Kind::SwitchOut, id, p});
      if (dst.kind == Endpoint::Kind::SwitchIn) visit(dst.name);
    }
    mark[id] = 2;
  };
  for (const auto& sw : switches_) visit(sw.id);
}

std::vector<std::string> Fabric::sorted_switch_ids() const {
  std::vector<std::string> ids;
  for (const auto& sw : switches_) ids.push_back(sw.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::uint64_t Fabric::setting_count() const {
  if (switches_.size() >= 63) throw InvalidArgument("fabric too large for exhaustive enumeration");
  return std::uint64_t{1} << switches_.size();
}

SwitchSetting Fabric::setting_from_index(std::uint64_t index) const {
  const auto ids = sorted_switch_ids();
  SwitchSetting out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const std::uint64_t bit = std::uint64_t{1} << (ids.size() - 1 - k);
    out[ids[k]] = (index & bit) ? SwitchState::Cross : SwitchState::Bar;
  }
  return out;
}

SwitchSetting Fabric::current_setting() const {
  SwitchSetting out;
  for (const auto& sw : switches_) out[sw.id] = sw.state;
  return out;
}

Fabric Fabric::with_setting(const SwitchSetting& setting) const {
  Fabric copy = *this;
  for (auto& sw : copy.switches_) {
    const auto it = setting.find(sw.id);
    if (it != setting.end()) sw.state = it->second;
  }
  return copy;
}

SettingRoute apply_setting(const Fabric& fabric, const SwitchSetting& setting) {
  std::map<std::string, const Switch2x2*> by_id;
  for (const auto& sw : fabric.switches()) {
    if (!setting.count(sw.id)) throw InvalidArgument("setting does not cover switch '" + sw.id + "'");
    by_id[sw.id] = &sw;
  }
  for (const auto& [id, state] : setting) {
    if (!by_id.count(id)) throw InvalidArgument("setting names unknown switch '" + id + "'");
  }

  std::map<std::string, std::string> next;
  for (const auto& link : fabric.links()) next[link.from] = link.to;

  SettingRoute route;
  for (const auto& input : fabric.inputs()) {
    PhotonPath path;
    std::string at = next.at(input);
    while (!fabric.has_output(at)) {
      const auto dot = at.rfind('.');
      const std::string id = at.substr(0, dot);
      const int in_port = at.back() - '0';
      const Switch2x2& sw = *by_id.at(id);
      const int out_port = setting.at(id) == SwitchState::Bar ? in_port : 1 - in_port;
      path.switches.push_back(id);
      path.loss_db += sw.insertion_loss_db;
      at = next.at(id + ".out" + std::to_string(out_port));
    }
    path.output = at;
    route.mapping[input] = at;
    route.paths[input] = std::move(path);
  }
  return route;
}

namespace {

RoutingResult make_result(const SettingRoute& route, const SwitchSetting& setting,
                          const PortedPair& pair) {
  const PhotonPath& low = route.paths.at(pair.port_low);
  const PhotonPath& high = route.paths.at(pair.port_high);
  RoutingResult r;
  r.setting = setting;
  r.channel_pair = pair.channels;
  r.user_pair = {low.output, high.output};
  r.per_photon_depth = {static_cast<int>(low.switches.size()), static_cast<int>(high.switches.size())};
  r.per_photon_loss_db = {low.loss_db, high.loss_db};
  return r;
}

void check_pairs(const Fabric& fabric, const std::vector<PortedPair>& pairs) {
  std::set<std::string> used;
  for (const auto& p : pairs) {
    for (const auto* port : {&p.port_low, &p.port_high}) {
      if (!fabric.has_input(*port)) throw InvalidArgument("pair port '" + *port + "' is not a fabric input");
      if (!used.insert(*port).second) throw InvalidArgument("port '" + *port + "' carries two photons");
    }
  }
}

}  // namespace

RoutingResult route_request(const Fabric& fabric, const std::vector<PortedPair>& pairs,
                            const std::string& user_a, const std::string& user_b) {
  if (user_a == user_b) throw InvalidArgument("route_request: users must differ");
  if (!fabric.has_output(user_a) || !fabric.has_output(user_b)) {
    throw InvalidArgument("route_request: both users must be fabric outputs");
  }
  check_pairs(fabric, pairs);

  std::optional<RoutingResult> best;
  int best_depth = 0;
  const std::uint64_t n = fabric.setting_count();
  for (std::uint64_t k = 0; k < n; ++k) {
    const SwitchSetting setting = fabric.setting_from_index(k);
    const SettingRoute route = apply_setting(fabric, setting);
    for (const auto& pair : pairs) {
      const std::string& out_low = route.mapping.at(pair.port_low);
      const std::string& out_high = route.mapping.at(pair.port_high);
      const bool served = (out_low == user_a && out_high == user_b) || (out_low == user_b && out_high == user_a);
      if (!served) continue;
      RoutingResult r = make_result(route, setting, pair);
      const int depth = r.per_photon_depth.first + r.per_photon_depth.second;
      if (!best || depth < best_depth) {
        best = std::move(r);
        best_depth = depth;
      }
    }
  }
  if (!best) throw Blocked("no switch setting delivers an entangled pair to " + user_a + " and " + user_b);
  return *best;
}

std::vector<RoutingResult> setting_pairings(const Fabric& fabric, const std::vector<PortedPair>& pairs,
                                            const SwitchSetting& setting) {
  check_pairs(fabric, pairs);
  const SettingRoute route = apply_setting(fabric, setting);
  std::vector<RoutingResult> out;
  for (const auto& pair : pairs) out.push_back(make_result(route, setting, pair));
  return out;
}

Fabric paper_fabric_4user() {
  std::vector<Switch2x2> switches = {{"S1", SwitchState::Bar, 0.0}, {"S2", SwitchState::Bar, 0.0}};
  std::vector<Link> links = {
      {"a1", "A"},          {"a2", "S1.in0"},     {"b1", "S1.in1"},     {"S1.out0", "B"},
      {"S1.out1", "S2.in0"}, {"b2", "S2.in1"},    {"S2.out0", "C"},     {"S2.out1", "D"},
  };
  return Fabric(std::move(switches), {"a1", "a2", "b1", "b2"}, {"A", "B", "C", "D"}, std::move(links));
}

std::vector<PortedPair> paper_fabric_pairs(const EntangledChannelPair& first,
                                           const EntangledChannelPair& second) {
  return {{first, "a1", "a2"}, {second, "b1", "b2"}};
}

Fabric clos_fabric(int n_users) {
  if (n_users != 4) throw InvalidArgument("clos_fabric: only the 4-user network is supported");
  std::vector<Switch2x2> switches;
  for (const char* id : {"S11", "S12", "S21", "S22", "S31", "S32"}) switches.push_back({id, SwitchState::Bar, 0.0});
  std::vector<Link> links = {
      {"i0", "S11.in0"},      {"i1", "S11.in1"},      {"i2", "S12.in0"},      {"i3", "S12.in1"},
      {"S11.out0", "S21.in0"}, {"S11.out1", "S22.in0"}, {"S12.out0", "S21.in1"}, {"S12.out1", "S22.in1"},
      {"S21.out0", "S31.in0"}, {"S21.out1", "S32.in0"}, {"S22.out0", "S31.in1"}, {"S22.out1", "S32.in1"},
      {"S31.out0", "o0"},     {"S31.out1", "o1"},     {"S32.out0", "o2"},     {"S32.out1", "o3"},
  };
  return Fabric(std::move(switches), {"i0", "i1", "i2", "i3"}, {"o0", "o1", "o2", "o3"}, std::move(links));
}

FabricStats fabric_stats(const Fabric& fabric, double per_switch_loss_db) {
  if (per_switch_loss_db < 0.0) throw InvalidArgument("fabric_stats: loss must be non-negative");
  FabricStats stats;
  stats.switch_count = static_cast<int>(fabric.switches().size());
  const std::uint64_t n = fabric.setting_count();
  for (std::uint64_t k = 0; k < n; ++k) {
    const SettingRoute route = apply_setting(fabric, fabric.setting_from_index(k));
    for (const auto& [input, path] : route.paths) {
      stats.max_depth = std::max(stats.max_depth, static_cast<int>(path.switches.size()));
    }
  }
  stats.max_loss_db = stats.max_depth * per_switch_loss_db;
  return stats;
}

FabricStats mems_crossbar_stats(int ports, double element_loss_db) {
  if (ports <= 0) throw InvalidArgument("mems_crossbar_stats: port count must be positive");
  if (element_loss_db < 0.0) throw InvalidArgument("mems_crossbar_stats: loss must be non-negative");
  return {1, 1, element_loss_db};
}

std::vector<std::map<std::string, std::string>> realizable_permutations(const Fabric& fabric) {
  std::set<std::map<std::string, std::string>> seen;
  const std::uint64_t n = fabric.setting_count();
  for (std::uint64_t k = 0; k < n; ++k) seen.insert(apply_setting(fabric, fabric.setting_from_index(k)).mapping);
  return {seen.begin(), seen.end()};
}

}  // namespace entnet
