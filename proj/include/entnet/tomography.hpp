#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "entnet/quantum_state.hpp"

namespace entnet {

/// Coincidence counts for the 16 analyser settings, in tomography_settings() order.
/// Raw records hold integers; background subtraction may leave fractions.
struct TomographyRecord {
  std::array<double, 16> counts{};
  double acquisition_time_per_setting = 1.0;  // s
  double background_rate = 0.0;               // c/s, flat over settings

  double count(const PolarizationSetting& s) const;
  double total() const;
  void validate() const;
  bool operator==(const TomographyRecord&) const = default;
};

enum class ReconstructionMethod { Linear, Mle };
const char* to_string(ReconstructionMethod m);

struct ReconstructionResult {
  TwoQubitState rho;
  ReconstructionMethod method = ReconstructionMethod::Linear;
  bool physical = true;
  /// Poisson log-likelihood sum(n log mu - mu) of the fitted counts (MLE only).
  double log_likelihood = 0.0;
  /// Log-likelihood at the starting point (MLE only).
  double initial_log_likelihood = 0.0;
  int iterations = 0;
  bool converged = true;
  double gradient_norm = 0.0;
};

/// Poisson draw per setting with mean (rate_at_max * P(setting) / 0.5 + background) * time.
/// The 0.5 makes rate_at_max the rate in a maximal Bell-state setting.
TomographyRecord simulate_tomography(const TwoQubitState& rho, double coincidence_rate_at_max,
                                     double time_per_setting, double background, std::uint64_t seed);

/// Noise-free counts: N * Tr(rho Pa (x) Pb) for each setting.
TomographyRecord expected_counts(const TwoQubitState& rho, double scale, double time_per_setting = 1.0);

/// Removes background_rate * time from every count, clamped at zero.
TomographyRecord subtract_background(const TomographyRecord& record);

/// Solves the 16x16 linear system in the Pauli-product basis; exact on
/// noise-free data. The result may be flagged unphysical.
ReconstructionResult linear_inversion(const TomographyRecord& record);

/// Eigenvalues clipped at zero, then renormalized.
TwoQubitState project_to_physical(const TwoQubitState& rho);

struct MleOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 10000;
};

/// Maximum-likelihood reconstruction over rho = T^dagger T / Tr(T^dagger T)
/// with T lower triangular (16 real parameters), by BFGS ascent on the
/// count-normalized Poisson log-likelihood. The default start is the
/// physical projection of linear inversion.
ReconstructionResult mle_reconstruct(const TomographyRecord& record,
                                     const std::optional<TwoQubitState>& init = std::nullopt,
                                     const MleOptions& options = {});

/// Poisson log-likelihood of a normalized state with the best-fitting
/// overall count scale.
double log_likelihood(const TomographyRecord& record, const TwoQubitState& rho);

}  // namespace entnet
