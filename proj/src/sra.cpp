#include "sradiag/sra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sradiag/error.hpp"

namespace sradiag {

SRACurve::SRACurve(std::vector<double> descending, std::string unit_label)
: values_(std::move(descending)), unit_label_(std::move(unit_label)) {
  if (values_.empty()) throw Error(ErrorKind::insufficient_data, "SRA curve needs N >= 1");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::isnan(values_[i])) {
      throw Error(ErrorKind::domain, "SRA value at rank " + std::to_string(i + 1) + " is NaN");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw Error(ErrorKind::domain,
                  "SRA values must be non-increasing (rank " + std::to_string(i + 1) + ")");
    }
  }
}

double SRACurve::at_rank(std::size_t n) const {
  if (n < 1 || n > values_.size()) {
    throw Error(ErrorKind::bounds, "rank " + std::to_string(n) + " outside [1, " +
                                       std::to_string(values_.size()) + "]");
  }
  return values_[n - 1];
}

SRACurve build_sra(std::span<const double> samples, std::string unit_label) {
  if (samples.empty()) throw Error(ErrorKind::insufficient_data, "build_sra: empty sample");
  std::vector<double> v(samples.begin(), samples.end());
  if (std::ranges::any_of(v, [](double s) { return std::isnan(s); })) {
    throw Error(ErrorKind::domain, "build_sra: NaN sample");
  }
  std::stable_sort(v.begin(), v.end(), std::greater<>{});
  return SRACurve(std::move(v), std::move(unit_label));
}

ECDFPoint ecdf_from_sra(const SRACurve& curve, std::size_t n) {
  const double x = curve.at_rank(n);
  const auto N = static_cast<double>(curve.size());
  return {x, (N + 1.0 - static_cast<double>(n)) / N};
}

SRACurve resample_sra(const SRACurve& curve, std::size_t m) {
  const std::size_t N = curve.size();
  if (m < 2 || N < 2) {
    throw Error(ErrorKind::insufficient_data, "resample_sra needs m >= 2 and N >= 2");
  }
  const auto x = curve.values();
  std::vector<double> out(m);
  const double span = static_cast<double>(N - 1);
  for (std::size_t k = 0; k < m; ++k) {
    // Position on the source rank axis, 0-based.
    const double pos = static_cast<double>(k) * span / static_cast<double>(m - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), N - 1);
    const double frac = pos - static_cast<double>(i);
    if (frac == 0.0 || i + 1 == N) {
      out[k] = x[i];
    } else {
      out[k] = x[i] + frac * (x[i + 1] - x[i]);
    }
  }
  // Interpolation is convex per segment, but guard the last ulp so the
  // result always satisfies the curve invariant.
  for (std::size_t k = 1; k < m; ++k) out[k] = std::min(out[k], out[k - 1]);
  return SRACurve(std::move(out), curve.unit_label());
}

RelativeSRACurve relative_sra(const SRACurve& probe, const SRACurve& baseline, std::size_t m,
                              std::string probe_label, std::string baseline_label) {
  const auto p = resample_sra(probe, m);
  const auto b = resample_sra(baseline, m);
  RelativeSRACurve rel;
  rel.probe_label = std::move(probe_label);
  rel.baseline_label = std::move(baseline_label);
  rel.points.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    rel.points.push_back({b.values()[k], p.values()[k] - b.values()[k]});
  }
  return rel;
}

}  // namespace sradiag
