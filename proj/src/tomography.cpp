#include "entnet/tomography.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "entnet/errors.hpp"

namespace entnet {

namespace {

using Vector16 = Eigen::Matrix<double, 16, 1>;
using Matrix16 = Eigen::Matrix<double, 16, 16>;

std::size_t setting_index(const PolarizationSetting& s) {
  return static_cast<std::size_t>(s.alice) * 4 + static_cast<std::size_t>(s.bob);
}

const std::array<Matrix4c, 16>& measurement_operators() {
  static const std::array<Matrix4c, 16> ops = [] {
    std::array<Matrix4c, 16> out;
    const auto& settings = tomography_settings();
    for (std::size_t k = 0; k < 16; ++k) out[k] = kron(projector(settings[k].alice), projector(settings[k].bob));
    return out;
  }();
  return ops;
}

std::array<Matrix2c, 4> paulis() { return {Matrix2c::Identity(), pauli_x(), pauli_y(), pauli_z()}; }

// B(k, 4i+j) = Tr(sigma_i Pa) Tr(sigma_j Pb) / 4 for setting k = (a, b).
const Matrix16& design_matrix_inverse() {
  static const Matrix16 inv = [] {
    const auto sig = paulis();
    Eigen::Matrix4d single;
    for (int a = 0; a < 4; ++a) {
      for (int i = 0; i < 4; ++i) {
        single(a, i) = (sig[i] * projector(kAllPolarizations[a])).trace().real();
      }
    }
    Matrix16 design;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) design(4 * a + b, 4 * i + j) = single(a, i) * single(b, j) / 4.0;
    Eigen::FullPivLU<Matrix16> lu(design);
    assert(lu.isInvertible() && "16-setting design matrix must be invertible");
    return Matrix16(lu.inverse());
  }();
  return inv;
}

// 16 reals -> lower-triangular T: 4 real diagonal entries, then the six
// strictly-lower entries as (re, im) pairs in row-major order.
Matrix4c unpack(const Vector16& x) {
  Matrix4c t = Matrix4c::Zero();
  int k = 0;
  for (int i = 0; i < 4; ++i) t(i, i) = x(k++);
  for (int i = 1; i < 4; ++i) {
    for (int j = 0; j < i; ++j) {
      t(i, j) = Complex(x(k), x(k + 1));
      k += 2;
    }
  }
  return t;
}

Vector16 pack_gradient(const Matrix4c& tw) {
  Vector16 g;
  int k = 0;
  for (int i = 0; i < 4; ++i) g(k++) = 2.0 * tw(i, i).real();
  for (int i = 1; i < 4; ++i) {
    for (int j = 0; j < i; ++j) {
      g(k++) = 2.0 * tw(i, j).real();
      g(k++) = 2.0 * tw(i, j).imag();
    }
  }
  return g;
}

// Lower-triangular T with T^dagger T = g, for positive-definite g.
Matrix4c factor(const Matrix4c& g) {
  Matrix4c exchange = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) exchange(i, 3 - i) = 1.0;
  Eigen::LLT<Matrix4c> llt(exchange * g * exchange);
  if (llt.info() != Eigen::Success) throw Error("mle_reconstruct: initial state is not positive definite");
  const Matrix4c lower = llt.matrixL();
  return exchange * lower.adjoint() * exchange;
}

Vector16 pack(const Matrix4c& t) {
  Vector16 x;
  int k = 0;
  for (int i = 0; i < 4; ++i) x(k++) = t(i, i).real();
  for (int i = 1; i < 4; ++i) {
    for (int j = 0; j < i; ++j) {
      x(k++) = t(i, j).real();
      x(k++) = t(i, j).imag();
    }
  }
  return x;
}

// Negative log-likelihood with counts pre-divided by their total, plus gradient.
struct Objective {
  std::array<double, 16> freq{};

  double value(const Vector16& x, Vector16* grad) const {
    const Matrix4c t = unpack(x);
    const Matrix4c g = t.adjoint() * t;
    const auto& ops = measurement_operators();
    double nll = 0.0;
    Matrix4c w = Matrix4c::Zero();
    for (std::size_t k = 0; k < 16; ++k) {
      const double mu = (g * ops[k]).trace().real();
      if (freq[k] > 0.0) {
        if (!(mu > 0.0)) return std::numeric_limits<double>::infinity();
        nll -= freq[k] * std::log(mu);
      }
      nll += mu;
      if (grad) w += (freq[k] > 0.0 ? freq[k] / mu - 1.0 : -1.0) * ops[k];
    }
    if (grad) *grad = -pack_gradient(t * w);
    return nll;
  }
};

}  // namespace

double TomographyRecord::count(const PolarizationSetting& s) const { return counts[setting_index(s)]; }

double TomographyRecord::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

void TomographyRecord::validate() const {
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("tomography record: counts must be non-negative");
  }
  if (!(acquisition_time_per_setting > 0.0)) throw InvalidArgument("tomography record: time must be positive");
  if (!(background_rate >= 0.0)) throw InvalidArgument("tomography record: background must be non-negative");
}

const char* to_string(ReconstructionMethod m) { return m == ReconstructionMethod::Linear ? "LINEAR" : "MLE"; }

TomographyRecord simulate_tomography(const TwoQubitState& rho, double coincidence_rate_at_max,
                                     double time_per_setting, double background, std::uint64_t seed) {
  if (!(coincidence_rate_at_max > 0.0) || !(time_per_setting > 0.0)) {
    throw InvalidArgument("simulate_tomography: rate and time must be positive");
  }
  if (!(background >= 0.0)) throw InvalidArgument("simulate_tomography: background must be non-negative");
  std::mt19937_64 rng(seed);
  TomographyRecord rec;
  rec.acquisition_time_per_setting = time_per_setting;
  rec.background_rate = background;
  const auto& settings = tomography_settings();
  for (std::size_t k = 0; k < 16; ++k) {
    const double p = std::max(0.0, measurement_probability(rho, settings[k]));
    const double mean = (coincidence_rate_at_max * p / 0.5 + background) * time_per_setting;
    if (mean > 0.0) {
      std::poisson_distribution<long long> draw(mean);
      rec.counts[k] = static_cast<double>(draw(rng));
    }
  }
  return rec;
}

TomographyRecord expected_counts(const TwoQubitState& rho, double scale, double time_per_setting) {
  TomographyRecord rec;
  rec.acquisition_time_per_setting = time_per_setting;
  const auto& settings = tomography_settings();
  for (std::size_t k = 0; k < 16; ++k) {
    rec.counts[k] = scale * std::max(0.0, measurement_probability_unchecked(rho.matrix(), settings[k]));
  }
  return rec;
}

TomographyRecord subtract_background(const TomographyRecord& record) {
  record.validate();
  TomographyRecord out = record;
  const double per_setting = record.background_rate * record.acquisition_time_per_setting;
  for (double& c : out.counts) c = std::max(0.0, c - per_setting);
  out.background_rate = 0.0;
  return out;
}

ReconstructionResult linear_inversion(const TomographyRecord& record) {
  record.validate();
  Vector16 n;
  for (std::size_t k = 0; k < 16; ++k) n(static_cast<int>(k)) = record.counts[k];
  const Vector16 c = design_matrix_inverse() * n;
  const auto sig = paulis();
  Matrix4c rho = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho += c(4 * i + j) * kron(sig[i], sig[j]) / 4.0;
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw InvalidArgument("linear_inversion: record carries no counts");
  rho /= tr;
  rho = 0.5 * (rho + rho.adjoint());

  ReconstructionResult out{TwoQubitState::allow_unphysical(rho)};
  out.method = ReconstructionMethod::Linear;
  out.physical = out.rho.physical();
  return out;
}

TwoQubitState project_to_physical(const TwoQubitState& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho.matrix());
  Eigen::Vector4d ev = solver.eigenvalues().cwiseMax(0.0);
  const double sum = ev.sum();
  if (!(sum > 0.0)) return TwoQubitState();
  ev /= sum;
  const Matrix4c& v = solver.eigenvectors();
  Matrix4c out = v * ev.cast<Complex>().asDiagonal() * v.adjoint();
  out /= out.trace().real();
  return TwoQubitState::from_matrix(0.5 * (out + out.adjoint()));
}

double log_likelihood(const TomographyRecord& record, const TwoQubitState& rho) {
  const auto& ops = measurement_operators();
  std::array<double, 16> p{};
  double psum = 0.0;
  for (std::size_t k = 0; k < 16; ++k) {
    p[k] = std::max(0.0, (rho.matrix() * ops[k]).trace().real());
    psum += p[k];
  }
  const double scale = record.total() / psum;
  double ll = 0.0;
  for (std::size_t k = 0; k < 16; ++k) {
    const double mu = scale * p[k];
    if (record.counts[k] > 0.0) {
      if (!(mu > 0.0)) return -std::numeric_limits<double>::infinity();
      ll += record.counts[k] * std::log(mu);
    }
    ll -= mu;
  }
  return ll;
}

ReconstructionResult mle_reconstruct(const TomographyRecord& record, const std::optional<TwoQubitState>& init,
                                     const MleOptions& options) {
  record.validate();
  const double total = record.total();
  if (!(total > 0.0)) throw InvalidArgument("mle_reconstruct: record carries no counts");

  Objective objective;
  for (std::size_t k = 0; k < 16; ++k) objective.freq[k] = record.counts[k] / total;

  TwoQubitState start = init ? project_to_physical(*init) : project_to_physical(linear_inversion(record).rho);
  // Keep the start strictly inside the cone so T is well defined.
  start = mix(start, TwoQubitState(), 1.0 - 1e-6);

  // Scale the start so that the fitted total matches the counts.
  const auto& ops = measurement_operators();
  double psum = 0.0;
  for (const auto& op : ops) psum += (start.matrix() * op).trace().real();
  Vector16 x = pack(factor(start.matrix() / psum));

  Vector16 grad;
  double f = objective.value(x, &grad);
  const double f_start = f;
  Matrix16 hinv = Matrix16::Identity();

  ReconstructionResult out;
  out.method = ReconstructionMethod::Mle;
  out.converged = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (grad.norm() < options.gradient_tolerance) {
      out.converged = true;
      break;
    }
    Vector16 dir = -hinv * grad;
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
    }
    double step = 1.0;
    Vector16 x_new;
    Vector16 grad_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * dir;
      f_new = objective.value(x_new, &grad_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      // Near the optimum the decrease drops below rounding; accept a step
      // that is flat to rounding and shrinks the gradient.
      if (std::isfinite(f_new) && f_new <= f + 1e-14 * std::abs(f) && grad_new.norm() < grad.norm()) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (hinv.isIdentity()) break;  // steepest descent cannot progress either
      hinv.setIdentity();
      continue;
    }
    const Vector16 s = x_new - x;
    const Vector16 y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho_k = 1.0 / sy;
      const Matrix16 i16 = Matrix16::Identity();
      hinv = (i16 - rho_k * s * y.transpose()) * hinv * (i16 - rho_k * y * s.transpose()) +
             rho_k * s * s.transpose();
    }
    x = x_new;
    grad = grad_new;
    f = f_new;
  }
  out.iterations = iter;
  out.gradient_norm = grad.norm();

  const Matrix4c t = unpack(x);
  Matrix4c g = t.adjoint() * t;
  g /= g.trace().real();
  out.rho = TwoQubitState::from_matrix(0.5 * (g + g.adjoint()));
  out.physical = true;
  // Convert normalized objective back to raw-count log-likelihood:
  // sum n log(N mu') - N mu' = -N f + N log N ... up to a constant shared by both points.
  const double offset = total * std::log(total);
  out.log_likelihood = -total * f + offset;
  out.initial_log_likelihood = -total * f_start + offset;
  return out;
}

}  // namespace entnet
