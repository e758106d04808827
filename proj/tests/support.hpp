#pragma once

// Independent numerics used as oracles by the unit tests.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace testsupport {

using C = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;
using V4 = Eigen::Vector4cd;

inline constexpr double kPi = 3.14159265358979323846;

// Ginibre-ensemble mixed state of the given rank.
inline M4 random_density(std::mt19937_64& rng, int rank = 4) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = C(g(rng), g(rng));
  M4 rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Haar unitary via QR with phase correction.
inline M2 random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  M2 z;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) z(i, j) = C(g(rng), g(rng));
  Eigen::HouseholderQR<M2> qr(z);
  M2 q = qr.householderQ();
  M2 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

inline M4 kron2(const M2& a, const M2& b) {
  M4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

inline Eigen::Vector2cd ket(char p) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (p) {
    case 'H': return {1, 0};
    case 'V': return {0, 1};
    case 'P': return {s, s};
    case 'M': return {s, -s};
    case 'R': return {C(s), C(0, -s)};
    default: return {C(s), C(0, s)};  // L
  }
}

inline V4 ket2(char a, char b) {
  const auto x = ket(a), y = ket(b);
  return V4(x(0) * y(0), x(0) * y(1), x(1) * y(0), x(1) * y(1));
}

inline double prob(const M4& rho, char a, char b) {
  const V4 v = ket2(a, b);
  return (v.adjoint() * rho * v)(0, 0).real();
}

inline V4 phi_plus() { return V4(1, 0, 0, 1) / std::sqrt(2.0); }

inline M4 werner(double v) { return v * phi_plus() * phi_plus().adjoint() + (1 - v) * M4::Identity() / 4.0; }

inline M4 psd_sqrt(const M4& m) {
  Eigen::SelfAdjointEigenSolver<M4> es(m);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
inline double uhlmann(const M4& a, const M4& b) {
  const M4 s = psd_sqrt(a);
  const M4 inner = s * b * s;
  Eigen::SelfAdjointEigenSolver<M4> es(0.5 * (inner + inner.adjoint()));
  double t = 0;
  for (int i = 0; i < 4; ++i) t += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return t * t;
}

inline double trace_distance(const M4& a, const M4& b) {
  Eigen::SelfAdjointEigenSolver<M4> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace testsupport
