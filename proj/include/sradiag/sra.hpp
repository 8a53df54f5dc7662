// ============================================================================
// sra.hpp -- sequence of ranged amplitudes (SRA)
//
// An SRA curve is the sample sorted in descending order and read as a
// function of rank n = 1..N, with n = 1 the largest value. It links to the
// empirical distribution function through F(x_n) = (N + 1 - n) / N.
// ============================================================================
#pragma once

#include <cstddef>
#include <ranges>
#include <span>
#include <string>
#include <vector>

namespace sradiag {

/// Default comparison length for relative curves.
inline constexpr std::size_t kDefaultResampleLength = 1000;

class SRACurve {
public:
  /// Takes values already in descending order; throws Error(insufficient_data)
  /// when empty and Error(domain) when the order is violated.
  explicit SRACurve(std::vector<double> descending, std::string unit_label = "ns");

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const std::string& unit_label() const noexcept { return unit_label_; }

  /// x_n for the 1-based rank n; throws Error(bounds) outside [1, N].
  [[nodiscard]] double at_rank(std::size_t n) const;

  [[nodiscard]] double max() const noexcept { return values_.front(); }
  [[nodiscard]] double min() const noexcept { return values_.back(); }

  /// Ascending view of the same data.
  [[nodiscard]] auto ascending() const { return values_ | std::views::reverse; }

  bool operator==(const SRACurve&) const = default;

private:
  std::vector<double> values_;
  std::string unit_label_;
};

struct ECDFPoint {
  double x;
  double F;
};

struct RelativePoint {
  double baseline;
  double delta;
};

struct RelativeSRACurve {
  std::vector<RelativePoint> points;
  std::string baseline_label;
  std::string probe_label;
};

/// Stable descending sort of the samples.
SRACurve build_sra(std::span<const double> samples, std::string unit_label = "ns");

/// (x_n, (N + 1 - n) / N) for 1 <= n <= N.
ECDFPoint ecdf_from_sra(const SRACurve& curve, std::size_t n);

/// Length-m curve by linear interpolation of x against the rank fraction
/// (n - 1) / (N - 1). Endpoints are kept exactly and m == N is the identity.
SRACurve resample_sra(const SRACurve& curve, std::size_t m);

/// Both curves resampled to m points; point k = (baseline_k, probe_k - baseline_k).
RelativeSRACurve relative_sra(const SRACurve& probe, const SRACurve& baseline,
                              std::size_t m = kDefaultResampleLength,
                              std::string probe_label = "probe",
                              std::string baseline_label = "baseline");

}  // namespace sradiag
