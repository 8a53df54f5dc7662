// ============================================================================
// noise_models.hpp -- dark-count and afterpulse density hypotheses
//
//   Poisson      rho(x) = lambda * exp(-lambda * x)
//                x_n    = ln(N / (n - 1)) / lambda
//   Power law    P(t)   = C * t^(-alpha),  t >= x_min
//                x_n    = x_min * (N / (n - 1))^(1 / (alpha - 1))
//   Saturating   P(t)   = A / (1 - exp(-B * t)),  t > 0
//                solves dP/dt = a P + b P^2 with a = B, b = -B / A
//
// The power law is the decaying form: the growing t^alpha reading cannot
// produce the closed-form SRA above. Rank n = 1 diverges in both closed
// forms and is rejected.
// ============================================================================
#pragma once

#include <cstddef>
#include <string>
#include <variant>

namespace sradiag {

struct PoissonParams {
  double lambda;  // events per ns

  void validate() const;
  bool operator==(const PoissonParams&) const = default;
};

/// alpha > 0 suffices for the density on a finite window; the closed-form
/// SRA additionally needs alpha > 1.
struct PowerLawParams {
  double C;
  double alpha;
  double x_min;  // ns

  void validate() const;
  bool operator==(const PowerLawParams&) const = default;
};

struct SaturatingParams {
  double A;
  double B;  // per ns

  void validate() const;
  /// Coefficients of dP/dt = a P + b P^2.
  [[nodiscard]] double ode_a() const noexcept { return B; }
  [[nodiscard]] double ode_b() const noexcept { return -B / A; }
  bool operator==(const SaturatingParams&) const = default;
};

enum class ModelKind { poisson, powerlaw, saturating };

const char* to_string(ModelKind kind) noexcept;
/// Throws Error(config) for an unknown name.
ModelKind model_kind_from_string(const std::string& name);

using ModelParams = std::variant<PoissonParams, PowerLawParams, SaturatingParams>;

ModelKind kind_of(const ModelParams& params) noexcept;

/// A density hypothesis together with the multiplicative flexibility factor
/// applied to its curve during fitting.
struct NoiseModel {
  ModelParams params;
  double scale = 1.0;

  [[nodiscard]] ModelKind kind() const noexcept { return kind_of(params); }
  /// scale * density(t).
  [[nodiscard]] double density(double t) const;

  bool operator==(const NoiseModel&) const = default;
};

double poisson_density(const PoissonParams& p, double x);
double poisson_sra(const PoissonParams& p, std::size_t N, std::size_t n);

double powerlaw_density(const PowerLawParams& p, double t);
double powerlaw_sra(const PowerLawParams& p, std::size_t N, std::size_t n);

double saturating_density(const SaturatingParams& p, double t);

/// Central-difference dP/dt at t minus (B P - (B / A) P^2). Vanishes to
/// O(h^2) for the exact solution.
double saturating_ode_residual(const SaturatingParams& p, double t, double h);

}  // namespace sradiag
