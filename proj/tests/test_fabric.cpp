#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "entnet/errors.hpp"
#include "entnet/fabric.hpp"

using namespace entnet;

namespace {

SwitchSetting paper_setting(SwitchState s1, SwitchState s2) { return {{"S1", s1}, {"S2", s2}}; }

constexpr auto kBar = SwitchState::Bar;
constexpr auto kCross = SwitchState::Cross;

std::vector<PortedPair> paper_pairs() {
  const auto plan = paper_dwdm_plan();
  return paper_fabric_pairs({plan.channel(31), plan.channel(37)}, {plan.channel(33), plan.channel(35)});
}

std::set<std::set<std::string>> user_matching(const std::vector<RoutingResult>& rs) {
  std::set<std::set<std::string>> out;
  for (const auto& r : rs) out.insert({r.user_pair.first, r.user_pair.second});
  return out;
}

// Layered network: `width` inputs, `layers` stages of width/2 switches with
// random inter-stage wiring.
Fabric random_fabric(std::mt19937_64& rng, int width, int layers) {
  std::vector<Switch2x2> switches;
  std::vector<std::string> inputs, outputs;
  std::vector<Link> links;
  std::vector<std::string> sources;
  for (int i = 0; i < width; ++i) {
    inputs.push_back("in" + std::to_string(i));
    outputs.push_back("out" + std::to_string(i));
    sources.push_back(inputs.back());
  }
  for (int l = 0; l < layers; ++l) {
    std::vector<std::string> sinks, next;
    for (int s = 0; s < width / 2; ++s) {
      const std::string id = "L" + std::to_string(l) + "S" + std::to_string(s);
      switches.push_back({id, kBar, 0.5});
      sinks.push_back(id + ".in0");
      sinks.push_back(id + ".in1");
      next.push_back(id + ".out0");
      next.push_back(id + ".out1");
    }
    std::shuffle(sinks.begin(), sinks.end(), rng);
    for (int i = 0; i < width; ++i) links.push_back({sources[i], sinks[i]});
    sources = next;
  }
  std::vector<std::string> sinks = outputs;
  std::shuffle(sinks.begin(), sinks.end(), rng);
  for (int i = 0; i < width; ++i) links.push_back({sources[i], sinks[i]});
  return Fabric(switches, inputs, outputs, links);
}

}  // namespace

TEST_CASE("switch semantics") {
  Switch2x2 s{"X", kBar, 0.0};
  CHECK(s.output_for(0) == 0);
  CHECK(s.output_for(1) == 1);
  s.state = kCross;
  CHECK(s.output_for(0) == 1);
  CHECK(s.output_for(1) == 0);
  CHECK(switch_state_from_string("cross") == kCross);
  CHECK(switch_state_from_string("BAR") == kBar);
  CHECK_THROWS_AS(switch_state_from_string("open"), InvalidArgument);
}

TEST_CASE("four-user fabric wiring traced by hand") {
  const auto f = paper_fabric_4user();
  const auto bar = apply_setting(f, paper_setting(kBar, kBar)).mapping;
  CHECK(bar == std::map<std::string, std::string>{{"a1", "A"}, {"a2", "B"}, {"b1", "C"}, {"b2", "D"}});
  const auto cross = apply_setting(f, paper_setting(kCross, kCross)).mapping;
  CHECK(cross == std::map<std::string, std::string>{{"a1", "A"}, {"b1", "B"}, {"b2", "C"}, {"a2", "D"}});
  const auto route = apply_setting(f, paper_setting(kBar, kBar));
  CHECK(route.paths.at("b1").switches == std::vector<std::string>{"S1", "S2"});
  CHECK(route.paths.at("a1").switches.empty());
  CHECK_THROWS_AS(apply_setting(f, {{"S1", kBar}}), InvalidArgument);
}

TEST_CASE("four-user fabric settings give the three pairings") {
  const auto f = paper_fabric_4user();
  const auto pairs = paper_pairs();
  using M = std::set<std::set<std::string>>;
  CHECK(user_matching(setting_pairings(f, pairs, paper_setting(kCross, kCross))) == M{{"A", "D"}, {"B", "C"}});
  CHECK(user_matching(setting_pairings(f, pairs, paper_setting(kCross, kBar))) == M{{"A", "C"}, {"B", "D"}});
  CHECK(user_matching(setting_pairings(f, pairs, paper_setting(kBar, kBar))) == M{{"A", "B"}, {"C", "D"}});
  CHECK(user_matching(setting_pairings(f, pairs, paper_setting(kBar, kCross))) == M{{"A", "B"}, {"C", "D"}});

  std::set<M> distinct;
  for (std::uint64_t k = 0; k < f.setting_count(); ++k)
    distinct.insert(user_matching(setting_pairings(f, pairs, f.setting_from_index(k))));
  CHECK(f.setting_count() == 4);
  CHECK(distinct.size() == 3);
}

TEST_CASE("route requests") {
  const auto f = paper_fabric_4user();
  const auto pairs = paper_pairs();
  const auto ad = route_request(f, pairs, "A", "D");
  CHECK(ad.setting == paper_setting(kCross, kCross));
  CHECK(ad.channel_pair == pairs[0].channels);
  const auto bc = route_request(f, pairs, "B", "C");
  CHECK(bc.setting == paper_setting(kCross, kCross));
  CHECK(bc.channel_pair == pairs[1].channels);
  const auto ab = route_request(f, pairs, "B", "A");
  CHECK(ab.setting.at("S1") == kBar);
  CHECK(ab.per_photon_depth == std::pair<int, int>{0, 1});

  const auto only_a = std::vector<PortedPair>{pairs[0]};
  CHECK_THROWS_AS(route_request(f, only_a, "C", "D"), Blocked);
}

TEST_CASE("route requests never split a pair") {
  const auto f = paper_fabric_4user();
  const auto pairs = paper_pairs();
  const std::vector<std::string> users{"A", "B", "C", "D"};
  for (const auto& a : users) {
    for (const auto& b : users) {
      if (a >= b) continue;
      const auto r = route_request(f, pairs, a, b);
      const auto mapping = apply_setting(f, r.setting).mapping;
      const auto it = std::find_if(pairs.begin(), pairs.end(),
                                   [&](const PortedPair& p) { return p.channels == r.channel_pair; });
      REQUIRE(it != pairs.end());
      const std::set<std::string> got{mapping.at(it->port_low), mapping.at(it->port_high)};
      CHECK(got == std::set<std::string>{a, b});
    }
  }
}

TEST_CASE("clos fabric") {
  const auto clos = clos_fabric(4);
  const auto stats = fabric_stats(clos, 1.0);
  CHECK(stats.switch_count == 6);
  CHECK(stats.max_depth == 3);
  CHECK(stats.max_loss_db == doctest::Approx(3.0));
  for (std::uint64_t k = 0; k < clos.setting_count(); ++k) {
    for (const auto& [in, path] : apply_setting(clos, clos.setting_from_index(k)).paths) {
      CHECK(path.switches.size() == 3);
    }
  }
  CHECK(clos.setting_count() == 64);
  CHECK(realizable_permutations(clos).size() == 24);
  CHECK_THROWS_AS(clos_fabric(8), InvalidArgument);

  const auto paper = fabric_stats(paper_fabric_4user(), 1.0);
  CHECK(paper.switch_count == 2);
  CHECK(paper.max_depth == 2);
  CHECK(paper.max_depth < stats.max_depth);
  CHECK(paper.switch_count < stats.switch_count);

  const auto mems = mems_crossbar_stats(192, 1.5);
  CHECK(mems.max_depth == 1);
  CHECK(mems.max_loss_db == doctest::Approx(1.5));

  const Fabric direct({}, {"x"}, {"y"}, {{"x", "y"}});
  const auto none = fabric_stats(direct, 1.0);
  CHECK(none.max_depth == 0);
  CHECK(none.max_loss_db == 0.0);
}

TEST_CASE("apply_setting is a bijection on random fabrics") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int width = 2 * (1 + trial % 3);
    const auto f = random_fabric(rng, width, 1 + trial % 3);
    std::uniform_int_distribution<std::uint64_t> pick(0, f.setting_count() - 1);
    for (int k = 0; k < 8; ++k) {
      const auto route = apply_setting(f, f.setting_from_index(pick(rng)));
      std::set<std::string> outs;
      for (const auto& [in, out] : route.mapping) outs.insert(out);
      CHECK(route.mapping.size() == static_cast<std::size_t>(width));
      CHECK(outs.size() == static_cast<std::size_t>(width));
      for (const auto& [in, path] : route.paths)
        CHECK(path.loss_db == doctest::Approx(0.5 * static_cast<double>(path.switches.size())));
    }
  }
}

TEST_CASE("invalid wiring is rejected") {
  std::vector<Switch2x2> sw{{"S", kBar, 0.0}};
  // Output B fed twice.
  CHECK_THROWS_AS(Fabric(sw, {"a", "b"}, {"A", "B"},
                         {{"a", "S.in0"}, {"b", "S.in1"}, {"S.out0", "B"}, {"S.out1", "B"}}),
                  InvalidArgument);
  // Dangling switch input.
  CHECK_THROWS_AS(Fabric(sw, {"a", "b"}, {"A", "B"}, {{"a", "S.in0"}, {"b", "A"}, {"S.out0", "B"}}),
                  InvalidArgument);
  // Cycle through a single switch.
  CHECK_THROWS_AS(Fabric(sw, {"a"}, {"A"}, {{"a", "S.in0"}, {"S.out0", "S.in1"}, {"S.out1", "A"}}),
                  InvalidArgument);
}

TEST_CASE("setting enumeration order") {
  const auto f = paper_fabric_4user();
  CHECK(f.sorted_switch_ids() == std::vector<std::string>{"S1", "S2"});
  CHECK(f.setting_from_index(0) == paper_setting(kBar, kBar));
  CHECK(f.setting_from_index(1) == paper_setting(kBar, kCross));
  CHECK(f.setting_from_index(2) == paper_setting(kCross, kBar));
  const auto g = f.with_setting(paper_setting(kCross, kBar));
  CHECK(g.current_setting() == paper_setting(kCross, kBar));
  CHECK(f.current_setting() == paper_setting(kBar, kBar));
}
