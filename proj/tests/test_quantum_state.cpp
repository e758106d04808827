#include "doctest.h"

#include <random>

#include "entnet/errors.hpp"
#include "entnet/quantum_state.hpp"
#include "support.hpp"

using namespace entnet;
namespace ts = testsupport;

namespace {

double max_abs(const Matrix4c& a, const Matrix4c& b) { return (a - b).cwiseAbs().maxCoeff(); }

PolarizationSetting setting(char a, char b) {
  return {polarization_from_char(a), polarization_from_char(b)};
}

}  // namespace

TEST_CASE("construction checks hermiticity, trace and positivity") {
  Matrix4c m = Matrix4c::Identity() / 4.0;
  CHECK_NOTHROW(TwoQubitState::from_matrix(m));

  Matrix4c skew = m;
  skew(0, 1) = Complex(0.1, 0);
  CHECK_THROWS_AS(TwoQubitState::from_matrix(skew), UnphysicalState);

  CHECK_THROWS_AS(TwoQubitState::from_matrix(2.0 * m), UnphysicalState);

  Matrix4c neg = Matrix4c::Zero();
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  CHECK_THROWS_AS(TwoQubitState::from_matrix(neg), UnphysicalState);
  const auto flagged = TwoQubitState::allow_unphysical(neg);
  CHECK_FALSE(flagged.physical());
  CHECK(flagged.min_eigenvalue() == doctest::Approx(-0.2));
  CHECK_THROWS_AS(measurement_probability(flagged, setting('H', 'H')), UnphysicalState);
  CHECK_THROWS_AS(TwoQubitState::allow_unphysical(skew), UnphysicalState);
}

TEST_CASE("bell_state fidelity examples") {
  CHECK(fidelity_phi_plus(bell_state(0.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity_phi_plus(bell_state(ts::kPi)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fidelity_phi_plus(bell_state(ts::kPi / 2)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bell_state(1.3).purity() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(bell_state(std::nan("")), InvalidArgument);
}

TEST_CASE("bell phase fidelity law over random angles") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng);
    const double c = std::cos(t / 2);
    CHECK(std::abs(fidelity_phi_plus(bell_state(t)) - c * c) < 1e-10);
  }
}

TEST_CASE("projectors match outer products") {
  for (char p : {'H', 'V', 'P', 'R'}) {
    const auto k = ts::ket(p);
    const Matrix2c expected = k * k.adjoint();
    CHECK((projector(polarization_from_char(p)) - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  const Matrix2c r = projector(Polarization::R);
  CHECK(r(0, 1).imag() == doctest::Approx(0.5));
  CHECK(r(1, 0).imag() == doctest::Approx(-0.5));
  const Matrix2c p = projector(Polarization::P);
  CHECK(p.real().cwiseAbs().minCoeff() == doctest::Approx(0.5));
  const auto m = ts::ket('M');
  CHECK((minus_diagonal_projector() - m * m.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("measurement probabilities of phi plus") {
  const auto phi = phi_plus();
  CHECK(measurement_probability(phi, setting('H', 'H')) == doctest::Approx(0.5));
  CHECK(measurement_probability(phi, setting('H', 'V')) == doctest::Approx(0.0));
  CHECK(std::abs(measurement_probability(phi, setting('R', 'R'))) < 1e-15);
  const ts::M4 rho = ts::phi_plus() * ts::phi_plus().adjoint();
  CHECK(std::abs(ts::prob(rho, 'R', 'R')) < 1e-15);
  CHECK(ts::prob(rho, 'R', 'L') == doctest::Approx(0.5));
}

TEST_CASE("born rule agrees with direct evaluation and sums to one per basis pair") {
  std::mt19937_64 rng(5);
  const std::array<std::array<char, 2>, 3> bases{{{'H', 'V'}, {'P', 'M'}, {'R', 'L'}}};
  for (int n = 0; n < 50; ++n) {
    const ts::M4 m = ts::random_density(rng);
    const auto rho = TwoQubitState::from_matrix(m);
    for (const auto& s : tomography_settings()) {
      CHECK(measurement_probability(rho, s) ==
            doctest::Approx(ts::prob(m, to_char(s.alice), to_char(s.bob))).epsilon(1e-12));
    }
    for (const auto& ba : bases) {
      for (const auto& bb : bases) {
        double total = 0;
        for (char a : ba)
          for (char b : bb) total += ts::prob(m, a, b);
        CHECK(std::abs(total - 1.0) < 1e-10);
      }
    }
    double hv = 0;
    for (char a : {'H', 'V'})
      for (char b : {'H', 'V'}) hv += measurement_probability(rho, setting(a, b));
    CHECK(std::abs(hv - 1.0) < 1e-10);
  }
}

TEST_CASE("tomography settings order and labels") {
  const auto& s = tomography_settings();
  const char* expected[16] = {"HH", "HV", "HP", "HR", "VH", "VV", "VP", "VR",
                              "PH", "PV", "PP", "PR", "RH", "RV", "RP", "RR"};
  for (int i = 0; i < 16; ++i) {
    CHECK(s[i].label() == expected[i]);
    CHECK(setting_from_label(expected[i]) == s[i]);
  }
  CHECK(setting_from_label("hr") == setting('H', 'R'));
  CHECK_THROWS_AS(setting_from_label("HX"), InvalidArgument);
  CHECK_THROWS_AS(setting_from_label("H"), InvalidArgument);
}

TEST_CASE("local unitaries") {
  const auto phi = phi_plus();
  const Matrix2c id = Matrix2c::Identity();
  CHECK(max_abs(apply_local_unitary(phi, id, id).matrix(), phi.matrix()) < 1e-15);
  CHECK(max_abs(apply_local_unitary(phi, pauli_x(), pauli_x()).matrix(), phi.matrix()) < 1e-12);
  const auto minus = apply_local_unitary(phi, rotation_z(ts::kPi), id);
  CHECK(std::abs(fidelity_phi_plus(minus)) < 1e-12);
  CHECK(fidelity_phi_plus(apply_local_unitary(minus, pauli_z(), id)) == doctest::Approx(1.0));

  Matrix2c bad = id;
  bad(0, 0) = 1.01;
  CHECK_THROWS_AS(apply_local_unitary(phi, bad, id), InvalidArgument);
}

TEST_CASE("local unitaries preserve purity and spectrum") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 100; ++n) {
    const ts::M4 m = ts::random_density(rng, 1 + n % 4);
    const auto rho = TwoQubitState::from_matrix(m);
    const ts::M2 ua = ts::random_unitary(rng), ub = ts::random_unitary(rng);
    REQUIRE(is_unitary(ua));
    const auto out = apply_local_unitary(rho, ua, ub);
    const ts::M4 u = ts::kron2(ua, ub);
    CHECK(max_abs(out.matrix(), u * m * u.adjoint()) < 1e-12);
    CHECK(std::abs(out.purity() - (m * m).trace().real()) < 1e-10);
    CHECK((out.eigenvalues() - rho.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("werner state fidelity and purity laws") {
  for (int i = 0; i <= 20; ++i) {
    const double v = i / 20.0;
    const auto w = werner_state(v);
    CHECK(max_abs(w.matrix(), ts::werner(v)) < 1e-15);
    CHECK(std::abs(fidelity_phi_plus(w) - (1 + 3 * v) / 4) < 1e-12);
    CHECK(std::abs(w.purity() - (1 + 3 * v * v) / 4) < 1e-12);
  }
  CHECK(fidelity_phi_plus(werner_state(0.9067)) == doctest::Approx(0.930).epsilon(1e-3));
  CHECK_THROWS_AS(werner_state(1.1), InvalidArgument);
  CHECK_THROWS_AS(werner_state(-0.1), InvalidArgument);
}

TEST_CASE("metrics") {
  const auto m1 = metrics(phi_plus());
  CHECK(m1.fidelity == doctest::Approx(1.0));
  CHECK(m1.purity == doctest::Approx(1.0));
  CHECK(std::abs(m1.qber_mean) < 1e-12);

  const double v = 0.9067;
  const auto m = metrics(werner_state(v));
  CHECK(m.purity == doctest::Approx(0.8665).epsilon(1e-3));
  CHECK(m.qber_mean == doctest::Approx(0.0467).epsilon(2e-3));

  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const ts::M4 r = ts::random_density(rng);
    const auto mm = metrics(TwoQubitState::from_matrix(r));
    const double ez = ts::prob(r, 'H', 'H') + ts::prob(r, 'V', 'V') - ts::prob(r, 'H', 'V') - ts::prob(r, 'V', 'H');
    const double ex = ts::prob(r, 'P', 'P') + ts::prob(r, 'M', 'M') - ts::prob(r, 'P', 'M') - ts::prob(r, 'M', 'P');
    CHECK(mm.correlation_z == doctest::Approx(ez).epsilon(1e-12));
    CHECK(mm.correlation_x == doctest::Approx(ex).epsilon(1e-12));
    CHECK(mm.qber_z == doctest::Approx((1 - ez) / 2).epsilon(1e-12));
    CHECK(mm.qber_mean == doctest::Approx((mm.qber_z + mm.qber_x) / 2).epsilon(1e-12));
    CHECK(mm.fidelity == doctest::Approx((ts::phi_plus().adjoint() * r * ts::phi_plus())(0, 0).real()));
  }
}

TEST_CASE("mix and trace distance") {
  const auto a = phi_plus();
  const auto b = TwoQubitState();
  const auto m = mix(a, b, 0.3);
  CHECK(max_abs(m.matrix(), ts::werner(0.3)) < 1e-15);
  CHECK(a.trace_distance(b) == doctest::Approx(ts::trace_distance(a.matrix(), b.matrix())));
  CHECK_THROWS_AS(mix(a, b, 1.5), InvalidArgument);
}
