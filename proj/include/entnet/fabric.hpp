#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entnet/wdm.hpp"

namespace entnet {

enum class SwitchState { Bar, Cross };

const char* to_string(SwitchState s);
SwitchState switch_state_from_string(const std::string& s);

/// BAR: in0->out0, in1->out1. CROSS: in0->out1, in1->out0.
struct Switch2x2 {
  std::string id;
  SwitchState state = SwitchState::Bar;
  double insertion_loss_db = 0.0;

  int output_for(int input_port) const { return state == SwitchState::Bar ? input_port : 1 - input_port; }
  bool operator==(const Switch2x2&) const = default;
};

/// One end of a fibre link. Input/output ports are named; switch ports are
/// written "<switch>.in0", "<switch>.out1" and so on.
struct Endpoint {
  enum class Kind { Input, Output, SwitchIn, SwitchOut };
  Kind kind = Kind::Input;
  std::string name;
  int port = 0;

  std::string str() const;
  auto operator<=>(const Endpoint&) const = default;
};

struct Link {
  std::string from;
  std::string to;
  bool operator==(const Link&) const = default;
};

using SwitchSetting = std::map<std::string, SwitchState>;

/// Immutable description of a network of 2x2 switches.
///
/// Every source endpoint (fabric input or switch output) feeds exactly one
/// sink endpoint (switch input or fabric output) and the switch graph is
/// acyclic, so any complete setting routes inputs bijectively to outputs.
class Fabric {
 public:
  Fabric() = default;
  /// Throws InvalidArgument when the wiring breaks an invariant.
  Fabric(std::vector<Switch2x2> switches, std::vector<std::string> inputs,
         std::vector<std::string> outputs, std::vector<Link> links);

  const std::vector<Switch2x2>& switches() const { return switches_; }
  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  const std::vector<Link>& links() const { return links_; }

  const Switch2x2& find_switch(const std::string& id) const;
  bool has_output(const std::string& name) const;
  bool has_input(const std::string& name) const;

  /// Switch ids in lexicographic order; the enumeration order of settings.
  std::vector<std::string> sorted_switch_ids() const;
  /// Setting number k over sorted ids; the first id is the most significant bit, CROSS = 1.
  SwitchSetting setting_from_index(std::uint64_t index) const;
  std::uint64_t setting_count() const;

  /// The switch states stored on the fabric itself.
  SwitchSetting current_setting() const;
  /// Returns a copy with updated stored states (single-writer live use).
  Fabric with_setting(const SwitchSetting& setting) const;

  bool operator==(const Fabric&) const = default;

 private:
  Endpoint parse_source(const std::string& s) const;
  Endpoint parse_sink(const std::string& s) const;
  void build_index();

  std::vector<Switch2x2> switches_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<Link> links_;
  std::map<Endpoint, Endpoint> next_;
};

struct PhotonPath {
  std::string output;
  std::vector<std::string> switches;
  double loss_db = 0.0;
};

struct SettingRoute {
  /// Input port -> output port.
  std::map<std::string, std::string> mapping;
  std::map<std::string, PhotonPath> paths;
};

/// Traces every input through the fabric. The setting must cover every switch.
SettingRoute apply_setting(const Fabric& fabric, const SwitchSetting& setting);

/// An entangled channel pair whose photons enter the fabric at two inputs.
struct PortedPair {
  EntangledChannelPair channels;
  std::string port_low;
  std::string port_high;
};

struct RoutingResult {
  SwitchSetting setting;
  EntangledChannelPair channel_pair;
  std::pair<std::string, std::string> user_pair;
  /// Switch counts along the low- and high-channel photon paths.
  std::pair<int, int> per_photon_depth;
  std::pair<double, double> per_photon_loss_db;
};

/// Exhaustive search for a setting that delivers both photons of some pair
/// to {user_a, user_b}. Ties go to the smallest total depth, then to the
/// earliest setting in enumeration order. Throws Blocked if none exists.
RoutingResult route_request(const Fabric& fabric, const std::vector<PortedPair>& pairs,
                            const std::string& user_a, const std::string& user_b);

/// Every pair's delivery under one setting (simultaneous service).
std::vector<RoutingResult> setting_pairings(const Fabric& fabric, const std::vector<PortedPair>& pairs,
                                            const SwitchSetting& setting);

/// Inputs a1, a2 (one entangled pair) and b1, b2 (another), users A-D.
/// a1 is wired straight to A; S1 takes {a2, b1} and feeds {B, S2};
/// S2 takes {S1 link, b2} and feeds {C, D}.
Fabric paper_fabric_4user();
/// Ports a1/a2 carry the first pair, b1/b2 the second.
std::vector<PortedPair> paper_fabric_pairs(const EntangledChannelPair& first,
                                           const EntangledChannelPair& second);

/// Three-stage rearrangeable Clos (Benes) network. Only n_users = 4.
Fabric clos_fabric(int n_users);

struct FabricStats {
  int switch_count = 0;
  int max_depth = 0;
  double max_loss_db = 0.0;
};

/// Depth is the longest input-to-output switch count over all settings.
FabricStats fabric_stats(const Fabric& fabric, double per_switch_loss_db);

/// Mirror-array crossbar: any permutation through a single element.
FabricStats mems_crossbar_stats(int ports, double element_loss_db);

/// Distinct input->output mappings over all settings.
std::vector<std::map<std::string, std::string>> realizable_permutations(const Fabric& fabric);

}  // namespace entnet
