#pragma once

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>

namespace entnet {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kEigenvalueTolerance = 1e-10;

/// Two-qubit polarization density matrix, basis order HH, HV, VH, VV.
///
/// Construction always checks hermiticity and unit trace. Positivity is
/// checked too, but a state built with `allow_unphysical()` keeps negative
/// eigenvalues and reports `physical() == false` instead of throwing. That
/// path exists for linear-inversion tomography output.
class TwoQubitState {
 public:
  /// Maximally mixed state.
  TwoQubitState();

  /// Throws UnphysicalState on any violated invariant.
  static TwoQubitState from_matrix(const Matrix4c& rho);
  /// Hermiticity and trace are still enforced; positivity becomes a flag.
  static TwoQubitState allow_unphysical(const Matrix4c& rho);
  /// Projects onto |psi><psi| after normalizing psi.
  static TwoQubitState from_pure(const Eigen::Vector4cd& psi);

  const Matrix4c& matrix() const { return rho_; }
  Complex operator()(int row, int col) const { return rho_(row, col); }

  bool physical() const { return physical_; }
  double min_eigenvalue() const { return min_eigenvalue_; }
  Eigen::Vector4d eigenvalues() const;

  double purity() const;
  double trace_distance(const TwoQubitState& other) const;

  /// Throws UnphysicalState unless physical().
  void require_physical(const char* what) const;

  bool operator==(const TwoQubitState& other) const { return rho_ == other.rho_; }

 private:
  explicit TwoQubitState(const Matrix4c& rho, bool allow_unphysical);

  Matrix4c rho_;
  double min_eigenvalue_ = 0.25;
  bool physical_ = true;
};

enum class Polarization { H, V, P, R };

inline constexpr std::array<Polarization, 4> kAllPolarizations = {
    Polarization::H, Polarization::V, Polarization::P, Polarization::R};

char to_char(Polarization p);
/// Accepts one of "H", "V", "P", "R" (case-insensitive).
Polarization polarization_from_char(char c);

struct PolarizationSetting {
  Polarization alice = Polarization::H;
  Polarization bob = Polarization::H;

  std::string label() const;
  bool operator==(const PolarizationSetting&) const = default;
};

/// The 16 analyser settings in acquisition order HH, HV, HP, HR, VH, ... RR.
const std::array<PolarizationSetting, 16>& tomography_settings();
/// Parses a two-letter label such as "HR".
PolarizationSetting setting_from_label(const std::string& label);

struct MetricsReport {
  double fidelity = 0.0;
  double purity = 0.0;
  double correlation_z = 0.0;
  double correlation_x = 0.0;
  double qber_z = 0.0;
  double qber_x = 0.0;
  double qber_mean = 0.0;
};

/// (|HH> + e^{i theta}|VV>)/sqrt(2).
TwoQubitState bell_state(double theta);
/// |Phi+> = (|HH> + |VV>)/sqrt(2).
TwoQubitState phi_plus();
Eigen::Vector4cd phi_plus_vector();

/// Rank-1 projector. R is taken as (1, -i)/sqrt(2).
Matrix2c projector(Polarization p);
/// Projector onto the -45 degree linear state, the partner of P.
Matrix2c minus_diagonal_projector();

Matrix4c kron(const Matrix2c& a, const Matrix2c& b);

/// Born rule Tr(rho Pa (x) Pb). Requires a physical state.
double measurement_probability(const TwoQubitState& rho, const PolarizationSetting& s);
/// Same as above but also accepts flagged states; used inside tomography.
double measurement_probability_unchecked(const Matrix4c& rho, const PolarizationSetting& s);

/// (Ua (x) Ub) rho (Ua (x) Ub)^dagger. Both inputs must be unitary to 1e-10.
TwoQubitState apply_local_unitary(const TwoQubitState& rho, const Matrix2c& u_alice,
                                  const Matrix2c& u_bob);

/// v |Phi+><Phi+| + (1 - v) I/4 for v in [0, 1].
TwoQubitState werner_state(double v);

/// Convex combination w a + (1 - w) b.
TwoQubitState mix(const TwoQubitState& a, const TwoQubitState& b, double weight_a);

double fidelity_phi_plus(const TwoQubitState& rho);
MetricsReport metrics(const TwoQubitState& rho);

// Standard single-qubit gates.
Matrix2c pauli_x();
Matrix2c pauli_y();
Matrix2c pauli_z();
/// exp(-i angle sigma_z / 2).
Matrix2c rotation_z(double angle);
/// exp(-i angle sigma_y / 2), a real rotation about the circular axis.
Matrix2c rotation_y(double angle);

bool is_unitary(const Matrix2c& u, double tol = 1e-10);

}  // namespace entnet
