#include "sradiag/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "sradiag/detector_sim.hpp"
#include "sradiag/error.hpp"

namespace sradiag {

namespace {

DiagnosticReport report_against(const SRACurve& probe, const SRACurve& baseline,
                                const MonitorConfig& config) {
  DiagnosticReport r;
  r.relative = relative_sra(probe, baseline, config.resample_len);
  r.distance = relative_distance(r.relative, config.epsilon);
  r.threshold = config.threshold;
  r.verdict = r.distance > config.threshold ? Verdict::drift : Verdict::stable;
  return r;
}

void require_samples(std::span<const double> s, const char* what) {
  if (s.size() < 2) {
    throw Error(ErrorKind::insufficient_data,
                std::string(what) + " needs at least 2 intervals to form an SRA curve");
  }
}

}  // namespace

const char* to_string(Verdict v) noexcept { return v == Verdict::drift ? "drift" : "stable"; }

void MonitorConfig::validate() const {
  if (window_size < 2) throw Error(ErrorKind::config, "window_size must be >= 2");
  if (stride < 1 || stride > window_size) {
    throw Error(ErrorKind::config, "stride must be in [1, window_size]");
  }
  if (resample_len < 2) throw Error(ErrorKind::config, "resample length must be >= 2");
  if (!(threshold > 0.0)) throw Error(ErrorKind::config, "threshold must be > 0");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::config, "epsilon must be > 0");
}

double relative_distance(const RelativeSRACurve& curve, double epsilon) {
  double d = 0.0;
  for (const auto& p : curve.points) d = std::max(d, std::abs(p.delta) / (p.baseline + epsilon));
  return d;
}

DiagnosticReport compare_windows(std::span<const double> probe, std::span<const double> baseline,
                                 const MonitorConfig& config) {
  config.validate();
  require_samples(probe, "probe");
  require_samples(baseline, "baseline");
  return report_against(build_sra(probe), build_sra(baseline), config);
}

DiagnosticReport compare_windows(const InterArrivalSeries& probe,
                                 const InterArrivalSeries& baseline,
                                 const MonitorConfig& config) {
  auto r = compare_windows(probe.intervals(), baseline.intervals(), config);
  r.baseline_id = baseline.source_meta().source_label;
  return r;
}

RollingDiagnosis rolling_diagnose(const TimestampSeries& stream,
                                  const InterArrivalSeries& baseline,
                                  const MonitorConfig& config) {
  config.validate();
  require_samples(baseline.intervals(), "baseline");

  std::vector<Tick> ticks;
  ticks.reserve(stream.size());
  for (Tick t : stream.ticks()) {
    if (ticks.empty() || t != ticks.back()) ticks.push_back(t);
  }

  RollingDiagnosis out;
  const std::size_t W = config.window_size;
  if (ticks.size() < W + 1) {
    out.note = "stream has " + std::to_string(ticks.size()) + " usable ticks; a window needs " +
               std::to_string(W + 1);
    return out;
  }

  std::vector<double> gaps(ticks.size() - 1);
  for (std::size_t k = 0; k + 1 < ticks.size(); ++k) {
    gaps[k] = static_cast<double>(ticks[k + 1] - ticks[k]);
  }

  // The baseline resample is shared by every window.
  const auto base_curve = resample_sra(build_sra(baseline.intervals()), config.resample_len);
  for (std::size_t start = 0; start + W <= gaps.size(); start += config.stride) {
    const auto window = std::span<const double>(gaps).subspan(start, W);
    auto r = report_against(build_sra(window), base_curve, config);
    r.window_span = {ticks[start], ticks[start + W]};
    r.baseline_id = baseline.source_meta().source_label;
    out.reports.push_back(std::move(r));
  }
  return out;
}

double calibrate_threshold(std::span<const double> baseline, const MonitorConfig& config,
                           const CalibrationOptions& options) {
  config.validate();
  if (options.null_comparisons < 1) {
    throw Error(ErrorKind::config, "need at least one null comparison");
  }
  if (!(options.quantile >= 0.0 && options.quantile <= 1.0)) {
    throw Error(ErrorKind::config, "quantile must be in [0, 1]");
  }
  const std::size_t half = std::min(config.window_size, baseline.size() / 2);
  if (half < 2) throw Error(ErrorKind::insufficient_data, "baseline too short to calibrate");

  SimRandom rng(options.seed);
  std::vector<double> pool(baseline.begin(), baseline.end());
  std::vector<double> distances;
  distances.reserve(options.null_comparisons);
  for (std::size_t k = 0; k < options.null_comparisons; ++k) {
    // Partial Fisher-Yates: only the first 2 * half slots are needed.
    for (std::size_t i = 0; i < 2 * half; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform() *
                                                  static_cast<double>(pool.size() - i));
      std::swap(pool[i], pool[std::min(j, pool.size() - 1)]);
    }
    const auto a = std::span<const double>(pool).subspan(0, half);
    const auto b = std::span<const double>(pool).subspan(half, half);
    const auto rel = relative_sra(build_sra(a), build_sra(b), config.resample_len);
    distances.push_back(relative_distance(rel, config.epsilon));
  }
  return sample_quantile(std::move(distances), options.quantile);
}

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::insufficient_data, "quantile of empty sample");
  std::ranges::sort(values);
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) return values.back();
  return values[i] + (pos - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

}  // namespace sradiag
