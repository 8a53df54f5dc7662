// ============================================================================
// least_squares.hpp -- small dense Levenberg-Marquardt solver
//
// Sized for the 1-3 parameter curve fits in this library; the Jacobian is
// taken by central differences.
// ============================================================================
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sradiag {

struct LeastSquaresOptions {
  std::size_t max_iterations = 500;
  double x_tol = 1e-8;   // relative parameter step
  double f_tol = 1e-15;  // relative reduction of the cost
  double g_tol = 1e-14;  // infinity norm of J^T r
};

struct LeastSquaresResult {
  std::vector<double> params;
  double cost = 0.0;  // 0.5 * sum r_i^2
  std::size_t iterations = 0;
  bool converged = false;
};

/// Fills `residuals` (pre-sized to the residual count) for `params`.
using ResidualFunction =
    std::function<void(std::span<const double> params, std::span<double> residuals)>;

/// Minimizes 0.5 * ||r(p)||^2 from `initial`. Never throws on non-convergence:
/// the best iterate is returned with converged == false.
LeastSquaresResult levenberg_marquardt(const ResidualFunction& residual_fn,
                                       std::size_t residual_count,
                                       std::vector<double> initial,
                                       const LeastSquaresOptions& options = {});

}  // namespace sradiag
