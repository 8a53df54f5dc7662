// ============================================================================
// fitting.hpp -- parameter estimation for the noise models
//
// Two routes: least squares on a histogram density, and regression on the
// SRA curve. Both work in log space. Each fit also reports where the fitted
// model stops tracking the data.
// ============================================================================
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sradiag/error.hpp"
#include "sradiag/least_squares.hpp"
#include "sradiag/noise_models.hpp"
#include "sradiag/sra.hpp"
#include "sradiag/timestamps.hpp"

namespace sradiag {

enum class Binning { linear, log };

struct HistogramDensity {
  std::vector<double> bin_edges;       // strictly increasing, size = bins + 1
  std::vector<double> densities;       // count / (total_count * width)
  std::vector<std::uint64_t> counts;
  std::uint64_t total_count = 0;
  Binning binning = Binning::linear;

  [[nodiscard]] std::size_t bins() const noexcept { return densities.size(); }
  [[nodiscard]] double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
  /// Arithmetic midpoint for linear bins, geometric midpoint for log bins.
  [[nodiscard]] double center(std::size_t i) const;
};

struct ApplicabilityRange {
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool break_detected = false;
  std::optional<double> break_point;
};

struct ApplicabilityOptions {
  double rel_tol = 0.25;
  std::size_t run_len = 5;
};

struct FitResult {
  NoiseModel model;
  double residual_rms_log = 0.0;
  double max_rel_dev = 0.0;
  ApplicabilityRange applicability;
  std::size_t n_points_used = 0;
};

/// Least squares did not meet its tolerance within the iteration cap.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& msg, FitResult best)
  : Error(ErrorKind::convergence, msg), best_(std::move(best)) {}

  [[nodiscard]] const FitResult& best() const noexcept { return best_; }

private:
  FitResult best_;
};

struct DensityFitOptions {
  /// Only bins whose center lies in [t_min, t_max] enter the fit.
  std::optional<double> t_min;
  std::optional<double> t_max;
  LeastSquaresOptions solver;
  ApplicabilityOptions applicability;
};

// --- histogram route ---------------------------------------------------------

/// Bins span [min sample, max sample]; bin_count >= 4 and at least bin_count
/// samples are required.
HistogramDensity histogram_density(std::span<const double> samples, std::size_t bin_count,
                                   Binning binning);
HistogramDensity histogram_density(const InterArrivalSeries& samples, std::size_t bin_count,
                                   Binning binning);

/// Maximum-likelihood rate of the exponential model, 1 / mean interval.
PoissonParams estimate_lambda(const InterArrivalSeries& samples);
PoissonParams estimate_lambda(std::span<const double> intervals);

/// Log-density least squares over non-empty bins.
///
/// The flexibility scale is free for the Poisson model. For the power law and
/// the saturating model it is degenerate with C and A respectively, so it is
/// pinned to 1 and the amplitude carries it. The power-law x_min is set to
/// the first fitted bin center.
FitResult fit_density(const HistogramDensity& hist, ModelKind model,
                      const std::optional<NoiseModel>& init = std::nullopt,
                      const DensityFitOptions& options = {});

/// RMS log residual of `model` against the non-empty bins with center in
/// [t_lo, t_hi]. Throws Error(insufficient_data) when no bin qualifies.
double region_rms_log(const HistogramDensity& hist, const NoiseModel& model, double t_lo,
                      double t_hi);

// --- SRA route ---------------------------------------------------------------

/// Regresses ln x_n on ln(N / (n - 1)) over ranks n >= 2 with x_n >= x_min.
/// Slope s gives alpha = 1 + 1/s; the intercept becomes the scale factor
/// relative to x_min. Reported C is the normalizing constant for (alpha, x_min).
FitResult fit_powerlaw_sra(const SRACurve& curve, double x_min,
                           const ApplicabilityOptions& applicability = {});

/// lambda from the curve mean; the scale factor from the mean log residual
/// against ln(N / (n - 1)) / lambda.
FitResult fit_poisson_sra(const SRACurve& curve,
                          const ApplicabilityOptions& applicability = {});

/// Expected x_n for n = 1..N under `model` (times its scale). Rank 1 is +inf.
/// Throws Error(config) for the saturating model, which has no closed form.
std::vector<double> model_sra_curve(const NoiseModel& model, std::size_t N);

/// Scans ranks from the smallest value upward. The break point is the
/// smallest x from which |data - model| / model > rel_tol holds for run_len
/// consecutive ranks. Ranks with a non-finite model value are skipped. When
/// a break is found the compliant region is [t_lo, break_point).
ApplicabilityRange applicability_range(const SRACurve& curve,
                                       std::span<const double> model_curve,
                                       double rel_tol = 0.25, std::size_t run_len = 5);

}  // namespace sradiag
