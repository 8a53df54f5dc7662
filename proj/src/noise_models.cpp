#include "sradiag/noise_models.hpp"

#include <cmath>

#include "sradiag/error.hpp"

namespace sradiag {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void check_sra_rank(std::size_t N, std::size_t n) {
  if (n < 1 || n > N) {
    throw Error(ErrorKind::bounds,
                "rank " + std::to_string(n) + " outside [1, " + std::to_string(N) + "]");
  }
  if (n == 1) throw Error(ErrorKind::divergence, "closed-form SRA diverges at rank 1");
}

}  // namespace

void PoissonParams::validate() const {
  if (!positive_finite(lambda)) throw Error(ErrorKind::parameter, "lambda must be > 0");
}

void PowerLawParams::validate() const {
  if (!positive_finite(C)) throw Error(ErrorKind::parameter, "C must be > 0");
  if (!positive_finite(alpha)) throw Error(ErrorKind::parameter, "alpha must be > 0");
  if (!positive_finite(x_min)) throw Error(ErrorKind::parameter, "x_min must be > 0");
}

void SaturatingParams::validate() const {
  if (!positive_finite(A)) throw Error(ErrorKind::parameter, "A must be > 0");
  if (!positive_finite(B)) throw Error(ErrorKind::parameter, "B must be > 0");
}

const char* to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::poisson: return "poisson";
    case ModelKind::powerlaw: return "powerlaw";
    case ModelKind::saturating: return "saturating";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "poisson") return ModelKind::poisson;
  if (name == "powerlaw") return ModelKind::powerlaw;
  if (name == "saturating") return ModelKind::saturating;
  throw Error(ErrorKind::config, "unknown model '" + name + "'");
}

ModelKind kind_of(const ModelParams& params) noexcept {
  return static_cast<ModelKind>(params.index());
}

double NoiseModel::density(double t) const {
  return scale * std::visit(
                     [t](const auto& p) -> double {
                       using P = std::decay_t<decltype(p)>;
                       if constexpr (std::is_same_v<P, PoissonParams>) {
                         return poisson_density(p, t);
                       } else if constexpr (std::is_same_v<P, PowerLawParams>) {
                         return powerlaw_density(p, t);
                       } else {
                         return saturating_density(p, t);
                       }
                     },
                     params);
}

double poisson_density(const PoissonParams& p, double x) {
  p.validate();
  if (!(x >= 0.0)) throw Error(ErrorKind::domain, "poisson_density: x must be >= 0");
  return p.lambda * std::exp(-p.lambda * x);
}

double poisson_sra(const PoissonParams& p, std::size_t N, std::size_t n) {
  p.validate();
  check_sra_rank(N, n);
  return std::log(static_cast<double>(N) / static_cast<double>(n - 1)) / p.lambda;
}

double powerlaw_density(const PowerLawParams& p, double t) {
  p.validate();
  if (!(t >= p.x_min)) throw Error(ErrorKind::domain, "powerlaw_density: t below x_min");
  return p.C * std::pow(t, -p.alpha);
}

double powerlaw_sra(const PowerLawParams& p, std::size_t N, std::size_t n) {
  p.validate();
  if (!(p.alpha > 1.0)) {
    throw Error(ErrorKind::parameter, "closed-form SRA needs alpha > 1 (normalizable tail)");
  }
  check_sra_rank(N, n);
  const double ratio = static_cast<double>(N) / static_cast<double>(n - 1);
  return p.x_min * std::pow(ratio, 1.0 / (p.alpha - 1.0));
}

double saturating_density(const SaturatingParams& p, double t) {
  p.validate();
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "saturating_density: t must be > 0");
  // -expm1(-Bt) = 1 - exp(-Bt) without cancellation at small Bt.
  return p.A / -std::expm1(-p.B * t);
}

double saturating_ode_residual(const SaturatingParams& p, double t, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::domain, "step h must be > 0");
  if (!(t - h > 0.0)) throw Error(ErrorKind::domain, "need t - h > 0");
  const double dP = (saturating_density(p, t + h) - saturating_density(p, t - h)) / (2.0 * h);
  const double P = saturating_density(p, t);
  return dP - (p.ode_a() * P + p.ode_b() * P * P);
}

}  // namespace sradiag
