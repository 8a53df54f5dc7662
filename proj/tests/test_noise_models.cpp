#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "oracles.hpp"
#include "sradiag/error.hpp"
#include "sradiag/noise_models.hpp"
#include "sradiag/sra.hpp"

using namespace sradiag;
using doctest::Approx;

namespace {

ErrorKind kind_thrown(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::config;
}

}  // namespace

TEST_CASE("poisson density and SRA") {
  CHECK(poisson_density({1.0}, 0.0) == 1.0);
  CHECK(poisson_density({2.0}, 0.0) == 2.0);
  CHECK(poisson_density({1.0}, 1.0) == Approx(0.367879).epsilon(1e-6));
  CHECK(kind_thrown([] { poisson_density({1.0}, -1.0); }) == ErrorKind::domain);

  CHECK(poisson_sra({1.0}, 100, 2) == Approx(4.60517).epsilon(1e-6));
  CHECK(poisson_sra({1.0}, 100, 100) == Approx(std::log(100.0 / 99.0)));
  CHECK(poisson_sra({1.0}, 100, 100) > 0.0);
  CHECK(kind_thrown([] { poisson_sra({1.0}, 100, 101); }) == ErrorKind::bounds);
  CHECK(kind_thrown([] { poisson_sra({1.0}, 100, 1); }) == ErrorKind::divergence);
  CHECK(kind_thrown([] { poisson_density({0.0}, 1.0); }) == ErrorKind::parameter);
}

TEST_CASE("power-law density and SRA") {
  CHECK(powerlaw_density({1, 2, 1}, 1.0) == 1.0);
  CHECK(powerlaw_density({1, 2, 1}, 10.0) == Approx(0.01));
  CHECK(powerlaw_density({3, 1.2, 1}, 2.0) == Approx(1.30583).epsilon(1e-5));
  CHECK(kind_thrown([] { powerlaw_density({1, 2, 1}, 0.5); }) == ErrorKind::domain);

  CHECK(powerlaw_sra({1, 2, 1}, 100, 2) == Approx(100.0));
  CHECK(powerlaw_sra({1, 2, 1}, 100, 100) == Approx(100.0 / 99.0));
  CHECK(powerlaw_sra({1, 1.2, 2}, 1000, 11) == Approx(2e10));
  CHECK(kind_thrown([] { powerlaw_sra({1, 2, 1}, 100, 1); }) == ErrorKind::divergence);
  CHECK(kind_thrown([] { powerlaw_sra({1, 0.9, 1}, 100, 5); }) == ErrorKind::parameter);
}

TEST_CASE("saturating density") {
  CHECK(saturating_density({1, 1}, 1e3) == 1.0);
  CHECK(saturating_density({2, 1}, std::log(2.0)) == Approx(4.0));
  CHECK(saturating_density({1, 1}, 1.0) == Approx(1.58198).epsilon(1e-5));
  CHECK(kind_thrown([] { saturating_density({1, 1}, 0.0); }) == ErrorKind::domain);
  const SaturatingParams p{3, 0.5};
  CHECK(p.ode_a() == 0.5);
  CHECK(p.ode_b() == Approx(-0.5 / 3));
  for (double t = 0.1; t < 20; t *= 1.5) {
    CHECK(saturating_density(p, t) > saturating_density(p, t * 1.5));
  }
}

TEST_CASE("saturating ODE residual") {
  // dP/dt = -A B e^{-Bt} / (1 - e^{-Bt})^2 equals aP + bP^2 with a = B, b = -B/A.
  CHECK(std::abs(saturating_ode_residual({1, 1}, 1, 1e-4)) < 1e-6);
  CHECK(std::abs(saturating_ode_residual({3, 0.5}, 2, 1e-4)) < 1e-6);

  const SaturatingParams p{2.5, 0.7};
  const double r1 = std::abs(saturating_ode_residual(p, 1.3, 1e-2));
  const double r2 = std::abs(saturating_ode_residual(p, 1.3, 5e-3));
  CHECK(r1 / r2 == Approx(4.0).epsilon(0.01));

  CHECK(kind_thrown([] { saturating_ode_residual({1, 1}, 1, 0); }) == ErrorKind::domain);
}

TEST_CASE("densities integrate as expected") {
  boost::math::quadrature::exp_sinh<double> half_line;
  for (double lambda : {1e-3, 0.5, 2.0}) {
    const double I = half_line.integrate([&](double x) { return poisson_density({lambda}, x); },
                                         0.0, std::numeric_limits<double>::infinity());
    CHECK(I == Approx(1.0).epsilon(1e-6));
  }
  for (const PowerLawParams p : {PowerLawParams{1, 2, 1}, PowerLawParams{3, 1.2, 50},
                                 PowerLawParams{0.4, 3.5, 1000}}) {
    const double I = half_line.integrate([&](double t) { return powerlaw_density(p, t); }, p.x_min,
                                         std::numeric_limits<double>::infinity());
    const double closed = p.C * std::pow(p.x_min, 1 - p.alpha) / (p.alpha - 1);
    CHECK(I == Approx(closed).epsilon(1e-6));
  }
}

TEST_CASE("closed-form SRA curves are strictly decreasing") {
  const std::size_t N = 500;
  for (std::size_t n = 2; n < N; ++n) {
    CHECK(poisson_sra({0.3}, N, n) > poisson_sra({0.3}, N, n + 1));
    CHECK(powerlaw_sra({1, 1.7, 4}, N, n) > powerlaw_sra({1, 1.7, 4}, N, n + 1));
  }
}

TEST_CASE("Monte Carlo SRA converges to the closed form") {
  auto mean_dev = [](auto sampler, auto expected, std::size_t N) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto c = build_sra(sampler(N, seed));
      const std::vector<double> x(c.values().begin(), c.values().end());
      sum += oracle::max_rel_dev_central(x, [&](std::size_t n) { return expected(N, n); });
    }
    return sum / 10;
  };
  const auto exp_sampler = [](std::size_t N, std::uint64_t s) {
    return oracle::exponential_samples(1e-3, N, s);
  };
  const auto exp_expected = [](std::size_t N, std::size_t n) { return poisson_sra({1e-3}, N, n); };
  CHECK(mean_dev(exp_sampler, exp_expected, 10000) < mean_dev(exp_sampler, exp_expected, 1000));

  const auto par_sampler = [](std::size_t N, std::uint64_t s) {
    return oracle::pareto_samples(2.0, 100.0, N, s);
  };
  const auto par_expected = [](std::size_t N, std::size_t n) {
    return powerlaw_sra({1, 2.0, 100.0}, N, n);
  };
  CHECK(mean_dev(par_sampler, par_expected, 10000) < mean_dev(par_sampler, par_expected, 1000));
}

TEST_CASE("model plumbing") {
  CHECK(model_kind_from_string("poisson") == ModelKind::poisson);
  CHECK(model_kind_from_string("powerlaw") == ModelKind::powerlaw);
  CHECK(model_kind_from_string("saturating") == ModelKind::saturating);
  CHECK(std::string(to_string(ModelKind::saturating)) == "saturating");
  CHECK(kind_thrown([] { model_kind_from_string("itzler"); }) == ErrorKind::config);

  NoiseModel m{PoissonParams{2.0}, 3.0};
  CHECK(m.kind() == ModelKind::poisson);
  CHECK(m.density(0.0) == 6.0);
}
