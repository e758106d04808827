#include "doctest.h"

#include <algorithm>
#include <random>

#include "entnet/errors.hpp"
#include "entnet/source.hpp"
#include "entnet/wdm.hpp"
#include "support.hpp"

using namespace entnet;
namespace ts = testsupport;

namespace {

constexpr double kC = 299792.458;  // nm THz

std::vector<std::pair<int, int>> numbers(const PairingResult& r) {
  std::vector<std::pair<int, int>> out;
  for (const auto& p : r.pairs) out.emplace_back(p.low.number, p.high.number);
  return out;
}

// sin(a)/a = v, bisection on (0, pi).
double sinc_inverse(double v) {
  double lo = 1e-9, hi = ts::kPi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::sin(mid) / mid > v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("channel wavelengths") {
  CHECK(channel_wavelength(27) == doctest::Approx(1555.75).epsilon(0.01 / 1555.75));
  CHECK(channel_wavelength(41) == doctest::Approx(1544.53).epsilon(0.01 / 1544.53));
  CHECK(channel_wavelength(35) == doctest::Approx(1549.32).epsilon(0.01 / 1549.32));
  const double table[8] = {1555.75, 1554.13, 1552.52, 1550.92, 1549.32, 1547.72, 1546.12, 1544.53};
  for (int i = 0; i < 8; ++i) CHECK(std::abs(channel_wavelength(27 + 2 * i) - table[i]) < 0.01);
  for (int n = 1; n < 80; ++n) CHECK(channel_wavelength(n + 1) < channel_wavelength(n));
  CHECK(channel_wavelength(30) == doctest::Approx(kC / 193.0));
}

TEST_CASE("ITU channel passband") {
  ItuChannel ch{33, 62.0, 3.0};
  CHECK(ch.center_frequency_thz() == doctest::Approx(193.3));
  CHECK(ch.passband_low_nm() == doctest::Approx(kC / (193.3 + 0.031)));
  CHECK(ch.passband_high_nm() == doctest::Approx(kC / (193.3 - 0.031)));
  CHECK(ch.transmission() == doctest::Approx(std::pow(10.0, -0.3)));
}

TEST_CASE("pairing on the default plan") {
  const auto plan = paper_dwdm_plan();
  CHECK_NOTHROW(plan.validate());
  const auto r = pair_channels(plan, 386.8);
  CHECK(numbers(r) == std::vector<std::pair<int, int>>{{27, 41}, {29, 39}, {31, 37}, {33, 35}});
  CHECK(r.unpaired.empty());
  for (const auto& p : r.pairs) CHECK(p.low.number + p.high.number == 68);

  // Brute-force sum check against every unordered channel pair.
  int matched = 0;
  for (int a = 27; a <= 41; a += 2)
    for (int b = a + 2; b <= 41; b += 2)
      if (std::abs((190.0 + 0.1 * a) + (190.0 + 0.1 * b) - 386.8) < 0.01) ++matched;
  CHECK(matched == 4);

  ChannelPlan two;
  two.channels = {{27, 62.0, 0.0}, {29, 62.0, 0.0}};
  const auto none = pair_channels(two, 386.8);
  CHECK(none.pairs.empty());
  CHECK(none.unpaired == std::vector<int>{27, 29});
}

TEST_CASE("pairing ignores channel order") {
  const auto plan = paper_dwdm_plan();
  const auto ref = numbers(pair_channels(plan, 386.8));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    ChannelPlan shuffled = plan;
    std::shuffle(shuffled.channels.begin(), shuffled.channels.end(), rng);
    CHECK(numbers(pair_channels(shuffled, 386.8)) == ref);
  }
}

TEST_CASE("plan validation") {
  ChannelPlan plan = paper_dwdm_plan();
  plan.channels[3].number = 34;
  CHECK_THROWS_AS(plan.validate(), InvalidArgument);
  CHECK_THROWS_AS(paper_dwdm_plan().channel(28), InvalidArgument);
  CHECK_THROWS_AS(pair_channels(paper_dwdm_plan(), 386.8, 150.0), InvalidArgument);
}

TEST_CASE("demux rates") {
  SourceConfig cfg;
  const SpectralDensity density = [&](double l) { return spectral_density(cfg, l); };
  const double total = 1e9;
  const auto plan = paper_dwdm_plan();
  const auto rates = demux_rates(total, density, plan, 386.8);
  REQUIRE(rates.size() == 4);
  double sum = 0;
  for (const auto& r : rates) {
    const auto& lo = r.pair.low;
    const auto& hi = r.pair.high;
    const double w = spectral_fraction(cfg, lo.passband_low_nm(), lo.passband_high_nm()) +
                     spectral_fraction(cfg, hi.passband_low_nm(), hi.passband_high_nm());
    CHECK(r.rate == doctest::Approx(total * w).epsilon(1e-8));
    sum += r.rate;
  }
  CHECK(sum < total);

  ChannelPlan lossy = plan;
  for (auto& ch : lossy.channels) ch.insertion_loss_db = 1.0 + 0.1 * ch.number;
  const auto attenuated = demux_rates(total, density, lossy, 386.8);
  for (std::size_t i = 0; i < 4; ++i) {
    const double t = std::pow(10.0, -(attenuated[i].pair.low.insertion_loss_db +
                                      attenuated[i].pair.high.insertion_loss_db) / 10.0);
    CHECK(attenuated[i].rate == doctest::Approx(rates[i].rate * t).epsilon(1e-12));
  }

  // A flat density fully covered by two adjacent passbands carries all pairs.
  ChannelPlan wide;
  wide.grid_spacing_ghz = 100.0;
  wide.passband_width_ghz = 100.0;
  wide.channels = {{34, 100.0, 0.0}, {35, 100.0, 0.0}};
  const double lo = wide.channels[1].passband_low_nm();
  const double hi = wide.channels[0].passband_high_nm();
  const SpectralDensity flat = [&](double l) { return (l >= lo && l <= hi) ? 1.0 / (hi - lo) : 0.0; };
  const auto full = demux_rates(1000.0, flat, wide, 190.0 * 2 + 6.9);
  REQUIRE(full.size() == 1);
  CHECK(full[0].rate == doctest::Approx(1000.0).epsilon(1e-3));
}

TEST_CASE("dispersion and coherence calculators") {
  CHECK(coherence_time(62.0) == doctest::Approx(16.13).epsilon(1e-3));
  CHECK(coherence_time(31.0) == doctest::Approx(32.26).epsilon(1e-3));
  CHECK(chromatic_spread(17, 100, 0.5) == doctest::Approx(850.0));
  CHECK(chromatic_spread(5.5, 100, 0.5) == doctest::Approx(275.0));
  CHECK(chromatic_spread(10, 100, 0.5) == doctest::Approx(500.0));
  CHECK(pmd_delay(0.04, 100) == doctest::Approx(0.4));
  CHECK(pmd_delay(0.04, 400) == doctest::Approx(0.8));
  CHECK_THROWS_AS(coherence_time(0.0), InvalidArgument);
}

TEST_CASE("cwdm rotation follows the sinc law") {
  const auto phi = phi_plus();
  const double slope = calibrate_cwdm_slope(0.87, 13.0);
  const double a13 = sinc_inverse(0.87);
  CHECK(slope == doctest::Approx(2 * a13 / 13.0).epsilon(1e-6));

  const double v13 = correlation_visibility(cwdm_depolarize(phi, 13.0, slope));
  CHECK(v13 == doctest::Approx(0.87).epsilon(1e-6));
  const double v05 = correlation_visibility(cwdm_depolarize(phi, 0.5, slope));
  const double a05 = a13 * 0.5 / 13.0;
  CHECK(v05 == doctest::Approx(std::sin(a05) / a05).epsilon(1e-9));
  CHECK(v05 >= 0.999);
}

TEST_CASE("cwdm depolarization never raises purity") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 30; ++i) {
    const auto rho = TwoQubitState::from_matrix(ts::random_density(rng, 1 + i % 4));
    CHECK(cwdm_depolarize(rho, 10.0, 0.0) == rho);
    const auto out = cwdm_depolarize(rho, 13.0, 0.05 + 0.01 * i);
    CHECK(out.purity() <= rho.purity() + 1e-12);
    CHECK(out.physical());
  }
}

TEST_CASE("channel capacity") {
  const auto c = channel_capacity(70, 1550, 100);
  CHECK(c.channels == 87);
  CHECK(c.pairs == 43);
  CHECK(c.exact_ratio == doctest::Approx(kC * 70 / (1550.0 * 1550.0) * 10.0));
  CHECK(std::abs(c.channels - 90) / 90.0 < 0.05);
  CHECK(std::abs(c.pairs - 45) / 45.0 < 0.05);
  CHECK(channel_capacity(70, 1550, 200).channels == 43);
  CHECK(channel_capacity(0.1, 1550, 100).channels == 0);
}
