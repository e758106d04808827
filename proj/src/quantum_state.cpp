#include "entnet/quantum_state.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "entnet/errors.hpp"

namespace entnet {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};

double min_eigen(const Matrix4c& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

TwoQubitState::TwoQubitState() : rho_(Matrix4c::Identity() * 0.25) {}

TwoQubitState::TwoQubitState(const Matrix4c& rho, bool allow_unphysical) {
  if (!rho.allFinite()) {
    throw UnphysicalState("density matrix has non-finite entries");
  }
  const double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > kHermitianTolerance) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (max deviation " << herm_err << ")";
    throw UnphysicalState(os.str());
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTolerance) {
    std::ostringstream os;
    os << "density matrix trace is " << tr.real() << ", expected 1";
    throw UnphysicalState(os.str());
  }
  rho_ = 0.5 * (rho + rho.adjoint());
  min_eigenvalue_ = min_eigen(rho_);
  physical_ = min_eigenvalue_ >= -kEigenvalueTolerance;
  if (!physical_ && !allow_unphysical) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << min_eigenvalue_;
    throw UnphysicalState(os.str());
  }
}

TwoQubitState TwoQubitState::from_matrix(const Matrix4c& rho) { return TwoQubitState(rho, false); }

TwoQubitState TwoQubitState::allow_unphysical(const Matrix4c& rho) {
  return TwoQubitState(rho, true);
}

TwoQubitState TwoQubitState::from_pure(const Eigen::Vector4cd& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("pure state vector must have finite non-zero norm");
  }
  const Eigen::Vector4cd unit = psi / norm;
  return TwoQubitState(unit * unit.adjoint(), false);
}

Eigen::Vector4d TwoQubitState::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double TwoQubitState::purity() const { return (rho_ * rho_).trace().real(); }

double TwoQubitState::trace_distance(const TwoQubitState& other) const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho_ - other.rho_, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

void TwoQubitState::require_physical(const char* what) const {
  if (!physical_) {
    std::ostringstream os;
    os << what << ": state is flagged unphysical (min eigenvalue " << min_eigenvalue_ << ")";
    throw UnphysicalState(os.str());
  }
}

char to_char(Polarization p) {
  switch (p) {
    case Polarization::H: return 'H';
    case Polarization::V: return 'V';
    case Polarization::P: return 'P';
    case Polarization::R: return 'R';
  }
  return '?';
}

Polarization polarization_from_char(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'H': return Polarization::H;
    case 'V': return Polarization::V;
    case 'P': return Polarization::P;
    case 'R': return Polarization::R;
    default: break;
  }
  throw InvalidArgument(std::string("unknown polarization '") + c + "', expected H, V, P or R");
}

std::string PolarizationSetting::label() const { return {to_char(alice), to_char(bob)}; }

const std::array<PolarizationSetting, 16>& tomography_settings() {
  static const std::array<PolarizationSetting, 16> settings = [] {
    std::array<PolarizationSetting, 16> out{};
    std::size_t k = 0;
    for (auto a : kAllPolarizations) {
      for (auto b : kAllPolarizations) out[k++] = {a, b};
    }
    return out;
  }();
  return settings;
}

PolarizationSetting setting_from_label(const std::string& label) {
  if (label.size() != 2) {
    throw InvalidArgument("polarization setting label must have two letters, got '" + label + "'");
  }
  return {polarization_from_char(label[0]), polarization_from_char(label[1])};
}

Eigen::Vector4cd phi_plus_vector() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(0) = kInvSqrt2;
  v(3) = kInvSqrt2;
  return v;
}

TwoQubitState bell_state(double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("bell_state: theta must be finite");
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(0) = kInvSqrt2;
  v(3) = kInvSqrt2 * std::exp(kI * theta);
  return TwoQubitState::from_pure(v);
}

TwoQubitState phi_plus() { return bell_state(0.0); }

Matrix2c projector(Polarization p) {
  Eigen::Vector2cd v;
  switch (p) {
    case Polarization::H: v << 1.0, 0.0; break;
    case Polarization::V: v << 0.0, 1.0; break;
    case Polarization::P: v << kInvSqrt2, kInvSqrt2; break;
    case Polarization::R: v << kInvSqrt2, -kI * kInvSqrt2; break;
  }
  return v * v.adjoint();
}

Matrix2c minus_diagonal_projector() {
  Matrix2c m;
  m << 0.5, -0.5, -0.5, 0.5;
  return m;
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return out;
}

double measurement_probability_unchecked(const Matrix4c& rho, const PolarizationSetting& s) {
  const Matrix4c m = kron(projector(s.alice), projector(s.bob));
  return (rho * m).trace().real();
}

double measurement_probability(const TwoQubitState& rho, const PolarizationSetting& s) {
  rho.require_physical("measurement_probability");
  return measurement_probability_unchecked(rho.matrix(), s);
}

bool is_unitary(const Matrix2c& u, double tol) {
  return u.allFinite() && ((u.adjoint() * u) - Matrix2c::Identity()).cwiseAbs().maxCoeff() <= tol;
}

TwoQubitState apply_local_unitary(const TwoQubitState& rho, const Matrix2c& u_alice,
                                  const Matrix2c& u_bob) {
  if (!is_unitary(u_alice) || !is_unitary(u_bob)) {
    throw InvalidArgument("apply_local_unitary: both operators must be unitary within 1e-10");
  }
  const Matrix4c u = kron(u_alice, u_bob);
  Matrix4c out = u * rho.matrix() * u.adjoint();
  // Unitary conjugation preserves the spectrum; keep the caller's flag.
  return rho.physical() ? TwoQubitState::from_matrix(out) : TwoQubitState::allow_unphysical(out);
}

TwoQubitState werner_state(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("werner_state: visibility must lie in [0, 1]");
  const Eigen::Vector4cd phi = phi_plus_vector();
  const Matrix4c rho = v * (phi * phi.adjoint()) + (1.0 - v) * 0.25 * Matrix4c::Identity();
  return TwoQubitState::from_matrix(rho);
}

TwoQubitState mix(const TwoQubitState& a, const TwoQubitState& b, double weight_a) {
  if (!(weight_a >= 0.0 && weight_a <= 1.0)) throw InvalidArgument("mix: weight must lie in [0, 1]");
  return TwoQubitState::from_matrix(weight_a * a.matrix() + (1.0 - weight_a) * b.matrix());
}

double fidelity_phi_plus(const TwoQubitState& rho) {
  const Eigen::Vector4cd phi = phi_plus_vector();
  return (phi.adjoint() * rho.matrix() * phi)(0, 0).real();
}

MetricsReport metrics(const TwoQubitState& rho) {
  const Matrix4c& m = rho.matrix();
  MetricsReport r;
  r.fidelity = fidelity_phi_plus(rho);
  r.purity = rho.purity();

  const Matrix2c h = projector(Polarization::H);
  const Matrix2c v = projector(Polarization::V);
  const Matrix2c p = projector(Polarization::P);
  const Matrix2c mm = minus_diagonal_projector();
  auto joint = [&m](const Matrix2c& a, const Matrix2c& b) { return (m * kron(a, b)).trace().real(); };

  r.correlation_z = joint(h, h) + joint(v, v) - joint(h, v) - joint(v, h);
  r.correlation_x = joint(p, p) + joint(mm, mm) - joint(p, mm) - joint(mm, p);
  r.qber_z = 0.5 * (1.0 - r.correlation_z);
  r.qber_x = 0.5 * (1.0 - r.correlation_x);
  r.qber_mean = 0.5 * (r.qber_z + r.qber_x);
  return r;
}

Matrix2c pauli_x() {
  Matrix2c m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix2c pauli_y() {
  Matrix2c m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}

Matrix2c pauli_z() {
  Matrix2c m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix2c rotation_z(double angle) {
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = std::exp(-kI * (angle / 2.0));
  m(1, 1) = std::exp(kI * (angle / 2.0));
  return m;
}

Matrix2c rotation_y(double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  Matrix2c m;
  m << c, -s, s, c;
  return m;
}

}  // namespace entnet
