#include "sradiag/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace sradiag {

namespace {

double half_sq_norm(const Eigen::VectorXd& r) {
  return r.allFinite() ? 0.5 * r.squaredNorm() : std::numeric_limits<double>::infinity();
}

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFunction& residual_fn,
                                       std::size_t residual_count,
                                       std::vector<double> initial,
                                       const LeastSquaresOptions& options) {
  const auto k = static_cast<Eigen::Index>(initial.size());
  const auto m = static_cast<Eigen::Index>(residual_count);

  Eigen::VectorXd p = Eigen::Map<Eigen::VectorXd>(initial.data(), k);
  Eigen::VectorXd r(m);
  auto eval = [&](const Eigen::VectorXd& at, Eigen::VectorXd& out) {
    residual_fn(std::span<const double>(at.data(), static_cast<std::size_t>(k)),
                std::span<double>(out.data(), static_cast<std::size_t>(m)));
  };

  eval(p, r);
  double cost = half_sq_norm(r);

  LeastSquaresResult result;
  double mu = -1.0;
  Eigen::MatrixXd J(m, k);
  Eigen::VectorXd r_plus(m), r_minus(m), r_trial(m);

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;

    for (Eigen::Index j = 0; j < k; ++j) {
      const double step = 1e-6 * std::max(1.0, std::abs(p[j]));
      Eigen::VectorXd pp = p, pm = p;
      pp[j] += step;
      pm[j] -= step;
      eval(pp, r_plus);
      eval(pm, r_minus);
      J.col(j) = (r_plus - r_minus) / (2.0 * step);
    }

    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    if (!g.allFinite()) break;
    if (g.lpNorm<Eigen::Infinity>() <= options.g_tol) {
      result.converged = true;
      break;
    }
    if (mu < 0.0) mu = 1e-3 * JtJ.diagonal().maxCoeff();

    // Inner loop: raise damping until the step lowers the cost.
    bool accepted = false;
    bool small_step = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += mu * (1.0 + JtJ.diagonal().array());
      const Eigen::VectorXd dp = A.ldlt().solve(-g);
      if (!dp.allFinite()) {
        mu *= 10.0;
        continue;
      }
      const Eigen::VectorXd trial = p + dp;
      eval(trial, r_trial);
      const double trial_cost = half_sq_norm(r_trial);
      small_step = dp.norm() <= options.x_tol * (p.norm() + options.x_tol);
      if (trial_cost < cost) {
        const double reduction = (cost - trial_cost) / std::max(cost, 1e-300);
        p = trial;
        r = r_trial;
        cost = trial_cost;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        if (reduction <= options.f_tol) small_step = true;
        break;
      }
      if (small_step) break;
      mu *= 4.0;
    }
    if (small_step || (!accepted && cost == 0.0)) {
      result.converged = true;
      break;
    }
    if (!accepted) break;
  }

  result.params.assign(p.data(), p.data() + k);
  result.cost = cost;
  return result;
}

}  // namespace sradiag
