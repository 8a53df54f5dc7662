// ============================================================================
// diagnostics.hpp -- nonparametric drift monitoring with relative SRA curves
//
// A probe window is compared against a baseline by resampling both SRA
// curves to a common length and taking
//
//   distance = max_k |probe_k - baseline_k| / (baseline_k + epsilon)
//
// A window is flagged as drift when the distance exceeds the threshold.
// ============================================================================
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sradiag/sra.hpp"
#include "sradiag/timestamps.hpp"

namespace sradiag {

enum class Verdict { stable, drift };

const char* to_string(Verdict v) noexcept;

struct MonitorConfig {
  std::size_t window_size = 10000;  // inter-arrivals per window
  std::size_t stride = 5000;
  std::size_t resample_len = kDefaultResampleLength;
  double threshold = 0.3;
  double epsilon = 1.0;  // ns

  /// Throws Error(config) on invariant violations.
  void validate() const;
};

struct DiagnosticReport {
  RelativeSRACurve relative;
  double distance = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::stable;
  std::pair<Tick, Tick> window_span{0, 0};
  std::string baseline_id;
};

struct RollingDiagnosis {
  std::vector<DiagnosticReport> reports;  // ordered by window start
  std::string note;                       // set when no window fits
};

/// Sup-norm relative distance of a relative curve.
double relative_distance(const RelativeSRACurve& curve, double epsilon);

DiagnosticReport compare_windows(const InterArrivalSeries& probe,
                                 const InterArrivalSeries& baseline,
                                 const MonitorConfig& config);
DiagnosticReport compare_windows(std::span<const double> probe, std::span<const double> baseline,
                                 const MonitorConfig& config);

/// Slides a window of config.window_size inter-arrivals over the stream by
/// config.stride. Zero gaps are dropped before windowing. A stream with fewer
/// than window_size + 1 usable ticks yields no reports and a note.
RollingDiagnosis rolling_diagnose(const TimestampSeries& stream,
                                  const InterArrivalSeries& baseline,
                                  const MonitorConfig& config);

struct CalibrationOptions {
  std::size_t null_comparisons = 100;
  double quantile = 0.95;
  std::uint64_t seed = 1;
};

/// Threshold at the requested quantile of null distances. Each null draw
/// shuffles the baseline and compares two disjoint subsets of
/// min(window_size, N / 2) intervals.
double calibrate_threshold(std::span<const double> baseline, const MonitorConfig& config,
                           const CalibrationOptions& options = {});

/// Linear-interpolation sample quantile (type 7); q in [0, 1].
double sample_quantile(std::vector<double> values, double q);

}  // namespace sradiag
