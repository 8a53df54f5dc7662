#include "sradiag/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sradiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
  double slope;
  double intercept;
};

LineFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorKind::insufficient_data, "regression abscissae are all equal");
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

// Generic break scan over points ordered by ascending abscissa.
ApplicabilityRange scan_break(std::span<const double> xs, std::span<const double> data,
                              std::span<const double> model, double rel_tol,
                              std::size_t run_len) {
  ApplicabilityRange out;
  std::size_t run = 0;
  std::size_t run_start = 0;
  bool any = false;
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(model[i]) || !(model[i] > 0.0)) continue;
    if (!any) {
      lo = xs[i];
      any = true;
    }
    const double dev = std::abs(data[i] - model[i]) / model[i];
    if (dev > rel_tol) {
      if (run == 0) run_start = i;
      if (++run == run_len) {
        out.break_detected = true;
        out.break_point = xs[run_start];
        out.t_lo = lo;
        out.t_hi = xs[run_start];
        return out;
      }
    } else {
      run = 0;
    }
    hi = xs[i];
  }
  if (!any) throw Error(ErrorKind::insufficient_data, "no rank with a finite model value");
  out.t_lo = lo;
  out.t_hi = std::max(hi, lo);
  return out;
}

void check_applicability_options(double rel_tol, std::size_t run_len) {
  if (!(rel_tol > 0.0)) throw Error(ErrorKind::parameter, "rel_tol must be > 0");
  if (run_len < 3) throw Error(ErrorKind::parameter, "run_len must be >= 3");
}

// Log of the unscaled model density; no parameter validation so that the
// solver can pass through any trial point.
double log_density(ModelKind kind, std::span<const double> q, double t) {
  switch (kind) {
    case ModelKind::poisson: return q[0] + q[1] - std::exp(q[1]) * t;
    case ModelKind::powerlaw: return q[0] - q[1] * std::log(t);
    case ModelKind::saturating: return q[0] - std::log(-std::expm1(-std::exp(q[1]) * t));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

NoiseModel model_from_solver(ModelKind kind, std::span<const double> q, double x_min) {
  switch (kind) {
    case ModelKind::poisson: return {PoissonParams{std::exp(q[1])}, std::exp(q[0])};
    case ModelKind::powerlaw: return {PowerLawParams{std::exp(q[0]), q[1], x_min}, 1.0};
    case ModelKind::saturating:
      return {SaturatingParams{std::exp(q[0]), std::exp(q[1])}, 1.0};
  }
  return {};
}

std::vector<double> solver_from_model(const NoiseModel& m) {
  return std::visit(
      [&](const auto& p) -> std::vector<double> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, PoissonParams>) {
          return {std::log(m.scale), std::log(p.lambda)};
        } else if constexpr (std::is_same_v<P, PowerLawParams>) {
          return {std::log(m.scale * p.C), p.alpha};
        } else {
          return {std::log(m.scale * p.A), std::log(p.B)};
        }
      },
      m.params);
}

struct UsedBins {
  std::vector<double> t;
  std::vector<double> log_d;
  std::vector<double> d;
  std::vector<double> counts;
};

UsedBins collect_bins(const HistogramDensity& hist, std::optional<double> t_min,
                      std::optional<double> t_max) {
  UsedBins used;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    if (!(hist.densities[i] > 0.0)) continue;
    const double t = hist.center(i);
    if (t_min && t < *t_min) continue;
    if (t_max && t > *t_max) continue;
    if (!(t > 0.0)) continue;  // every model is singular or undefined at t <= 0
    used.t.push_back(t);
    used.d.push_back(hist.densities[i]);
    used.log_d.push_back(std::log(hist.densities[i]));
    used.counts.push_back(i < hist.counts.size() ? static_cast<double>(hist.counts[i]) : 1.0);
  }
  return used;
}

std::vector<double> initial_guess(ModelKind kind, const UsedBins& used) {
  switch (kind) {
    case ModelKind::poisson: {
      // Count-weighted mean of the bin centers.
      double wsum = 0.0, tsum = 0.0;
      for (std::size_t i = 0; i < used.t.size(); ++i) {
        wsum += used.counts[i];
        tsum += used.counts[i] * used.t[i];
      }
      const double mean = tsum / wsum;
      return {0.0, -std::log(mean)};
    }
    case ModelKind::powerlaw: {
      std::vector<double> lt(used.t.size());
      std::ranges::transform(used.t, lt.begin(), [](double t) { return std::log(t); });
      const auto line = ordinary_least_squares(lt, used.log_d);
      return {line.intercept, -line.slope};
    }
    case ModelKind::saturating: {
      const std::size_t tail = std::max<std::size_t>(1, used.d.size() / 10);
      const double tail_mean =
          std::accumulate(used.d.end() - static_cast<std::ptrdiff_t>(tail), used.d.end(), 0.0) /
          static_cast<double>(tail);
      return {std::log(tail_mean), -std::log(used.t.front())};
    }
  }
  return {};
}

}  // namespace

double HistogramDensity::center(std::size_t i) const {
  if (binning == Binning::log && bin_edges[i] > 0.0) {
    return std::sqrt(bin_edges[i] * bin_edges[i + 1]);
  }
  return 0.5 * (bin_edges[i] + bin_edges[i + 1]);
}

HistogramDensity histogram_density(std::span<const double> samples, std::size_t bin_count,
                                   Binning binning) {
  if (bin_count < 4) throw Error(ErrorKind::insufficient_data, "need at least 4 bins");
  if (samples.size() < bin_count) {
    throw Error(ErrorKind::insufficient_data,
                "need at least as many samples as bins (" + std::to_string(samples.size()) +
                    " < " + std::to_string(bin_count) + ")");
  }
  const auto [min_it, max_it] = std::ranges::minmax_element(samples);
  const double lo = *min_it, hi = *max_it;
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::insufficient_data, "samples span no range");
  }
  if (binning == Binning::log && !(lo > 0.0)) {
    throw Error(ErrorKind::domain, "log binning needs positive samples");
  }

  HistogramDensity h;
  h.binning = binning;
  h.bin_edges.resize(bin_count + 1);
  const double b = static_cast<double>(bin_count);
  const double log_lo = std::log(lo), log_span = std::log(hi) - std::log(lo);
  for (std::size_t i = 0; i <= bin_count; ++i) {
    const double f = static_cast<double>(i) / b;
    h.bin_edges[i] = binning == Binning::log ? std::exp(log_lo + f * log_span)
                                             : lo + f * (hi - lo);
  }
  h.bin_edges.front() = lo;
  h.bin_edges.back() = hi;

  h.counts.assign(bin_count, 0);
  for (double s : samples) {
    const double f = binning == Binning::log ? (std::log(s) - log_lo) / log_span
                                             : (s - lo) / (hi - lo);
    auto idx = static_cast<std::size_t>(std::max(0.0, f * b));
    idx = std::min(idx, bin_count - 1);
    // Floating round-off near an edge: settle on the bin that contains s.
    if (idx > 0 && s < h.bin_edges[idx]) --idx;
    if (idx + 1 < bin_count && s >= h.bin_edges[idx + 1]) ++idx;
    ++h.counts[idx];
  }
  h.total_count = samples.size();
  h.densities.resize(bin_count);
  const double total = static_cast<double>(h.total_count);
  for (std::size_t i = 0; i < bin_count; ++i) {
    h.densities[i] = static_cast<double>(h.counts[i]) / (total * h.width(i));
  }
  return h;
}

HistogramDensity histogram_density(const InterArrivalSeries& samples, std::size_t bin_count,
                                   Binning binning) {
  return histogram_density(samples.intervals(), bin_count, binning);
}

PoissonParams estimate_lambda(std::span<const double> intervals) {
  if (intervals.size() < 2) {
    throw Error(ErrorKind::insufficient_data, "estimate_lambda needs at least 2 intervals");
  }
  const double mean =
      std::accumulate(intervals.begin(), intervals.end(), 0.0) /
      static_cast<double>(intervals.size());
  return PoissonParams{1.0 / mean};
}

PoissonParams estimate_lambda(const InterArrivalSeries& samples) {
  return estimate_lambda(samples.intervals());
}

FitResult fit_density(const HistogramDensity& hist, ModelKind model,
                      const std::optional<NoiseModel>& init, const DensityFitOptions& options) {
  const auto used = collect_bins(hist, options.t_min, options.t_max);
  if (used.t.size() < 6) {
    throw Error(ErrorKind::insufficient_data,
                "fit_density needs >= 6 non-empty bins, have " + std::to_string(used.t.size()));
  }
  if (init && init->kind() != model) {
    throw Error(ErrorKind::config, "initial parameters are for a different model");
  }
  const double x_min = used.t.front();

  auto q0 = init ? solver_from_model(*init) : initial_guess(model, used);
  const auto residuals = [&](std::span<const double> q, std::span<double> r) {
    for (std::size_t i = 0; i < used.t.size(); ++i) {
      r[i] = used.log_d[i] - log_density(model, q, used.t[i]);
    }
  };
  const auto ls = levenberg_marquardt(residuals, used.t.size(), std::move(q0), options.solver);

  FitResult fit;
  fit.model = model_from_solver(model, ls.params, x_min);
  fit.n_points_used = used.t.size();
  fit.residual_rms_log = std::sqrt(2.0 * ls.cost / static_cast<double>(used.t.size()));

  std::vector<double> model_d(used.t.size());
  for (std::size_t i = 0; i < used.t.size(); ++i) {
    model_d[i] = std::exp(log_density(model, ls.params, used.t[i]));
    fit.max_rel_dev = std::max(fit.max_rel_dev, std::abs(used.d[i] - model_d[i]) / model_d[i]);
  }
  fit.applicability = scan_break(used.t, used.d, model_d, options.applicability.rel_tol,
                                 options.applicability.run_len);

  if (!ls.converged) {
    throw ConvergenceError("fit_density(" + std::string(to_string(model)) +
                               ") did not converge in " + std::to_string(ls.iterations) +
                               " iterations",
                           fit);
  }
  return fit;
}

double region_rms_log(const HistogramDensity& hist, const NoiseModel& model, double t_lo,
                      double t_hi) {
  const auto used = collect_bins(hist, t_lo, t_hi);
  if (used.t.empty()) throw Error(ErrorKind::insufficient_data, "no non-empty bin in region");
  double ss = 0.0;
  for (std::size_t i = 0; i < used.t.size(); ++i) {
    const double r = used.log_d[i] - std::log(model.density(used.t[i]));
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(used.t.size()));
}

FitResult fit_powerlaw_sra(const SRACurve& curve, double x_min,
                           const ApplicabilityOptions& applicability) {
  const std::size_t N = curve.size();
  if (N < 10) throw Error(ErrorKind::insufficient_data, "fit_powerlaw_sra needs N >= 10");
  if (!(x_min > 0.0)) throw Error(ErrorKind::parameter, "x_min must be > 0");
  check_applicability_options(applicability.rel_tol, applicability.run_len);

  const auto x = curve.values();
  const double dN = static_cast<double>(N);
  std::vector<double> L, y;
  L.reserve(N);
  y.reserve(N);
  for (std::size_t n = 2; n <= N; ++n) {
    const double xn = x[n - 1];
    if (!(xn >= x_min)) continue;
    L.push_back(std::log(dN / static_cast<double>(n - 1)));
    y.push_back(std::log(xn));
  }
  if (L.size() < 2) {
    throw Error(ErrorKind::insufficient_data, "fewer than 2 ranks at or above x_min");
  }
  const auto line = ordinary_least_squares(L, y);
  if (!(line.slope > 0.0)) {
    throw Error(ErrorKind::model_mismatch,
                "non-positive log-log SRA slope; data are not power-law tailed");
  }

  const double alpha = 1.0 + 1.0 / line.slope;
  FitResult fit;
  fit.model.params = PowerLawParams{(alpha - 1.0) * std::pow(x_min, alpha - 1.0), alpha, x_min};
  fit.model.scale = std::exp(line.intercept) / x_min;
  fit.n_points_used = L.size();

  double ss = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double pred = line.intercept + line.slope * L[i];
    ss += (y[i] - pred) * (y[i] - pred);
    fit.max_rel_dev = std::max(fit.max_rel_dev, std::abs(std::expm1(y[i] - pred)));
  }
  fit.residual_rms_log = std::sqrt(ss / static_cast<double>(L.size()));

  auto model_curve = model_sra_curve(fit.model, N);
  // Ranks excluded from the regression stay out of the applicability scan.
  for (std::size_t n = 2; n <= N; ++n) {
    if (!(x[n - 1] >= x_min)) model_curve[n - 1] = kInf;
  }
  fit.applicability =
      applicability_range(curve, model_curve, applicability.rel_tol, applicability.run_len);
  return fit;
}

FitResult fit_poisson_sra(const SRACurve& curve, const ApplicabilityOptions& applicability) {
  const std::size_t N = curve.size();
  if (N < 10) throw Error(ErrorKind::insufficient_data, "fit_poisson_sra needs N >= 10");
  check_applicability_options(applicability.rel_tol, applicability.run_len);
  const auto x = curve.values();
  if (!(x.back() > 0.0)) throw Error(ErrorKind::domain, "Poisson SRA fit needs positive samples");

  const auto lambda = estimate_lambda(x).lambda;
  const double dN = static_cast<double>(N);
  std::vector<double> r;
  r.reserve(N - 1);
  for (std::size_t n = 2; n <= N; ++n) {
    const double expected = std::log(dN / static_cast<double>(n - 1)) / lambda;
    r.push_back(std::log(x[n - 1]) - std::log(expected));
  }
  const double log_scale = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());

  FitResult fit;
  fit.model = {PoissonParams{lambda}, std::exp(log_scale)};
  fit.n_points_used = r.size();
  double ss = 0.0;
  for (double ri : r) {
    ss += (ri - log_scale) * (ri - log_scale);
    fit.max_rel_dev = std::max(fit.max_rel_dev, std::abs(std::expm1(ri - log_scale)));
  }
  fit.residual_rms_log = std::sqrt(ss / static_cast<double>(r.size()));
  fit.applicability = applicability_range(curve, model_sra_curve(fit.model, N),
                                          applicability.rel_tol, applicability.run_len);
  return fit;
}

std::vector<double> model_sra_curve(const NoiseModel& model, std::size_t N) {
  std::vector<double> out(N, kInf);
  for (std::size_t n = 2; n <= N; ++n) {
    out[n - 1] = std::visit(
        [&](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, PoissonParams>) {
            return poisson_sra(p, N, n);
          } else if constexpr (std::is_same_v<P, PowerLawParams>) {
            return powerlaw_sra(p, N, n);
          } else {
            throw Error(ErrorKind::config, "saturating model has no closed-form SRA");
            return 0.0;
          }
        },
        model.params);
    out[n - 1] *= model.scale;
  }
  return out;
}

ApplicabilityRange applicability_range(const SRACurve& curve,
                                       std::span<const double> model_curve, double rel_tol,
                                       std::size_t run_len) {
  if (model_curve.size() != curve.size()) {
    throw Error(ErrorKind::shape, "model curve has " + std::to_string(model_curve.size()) +
                                      " ranks, data has " + std::to_string(curve.size()));
  }
  check_applicability_options(rel_tol, run_len);
  // Ascending order: rank N first.
  const auto desc = curve.values();
  std::vector<double> xs(desc.rbegin(), desc.rend());
  std::vector<double> ms(model_curve.rbegin(), model_curve.rend());
  return scan_break(xs, xs, ms, rel_tol, run_len);
}

}  // namespace sradiag
