// ============================================================================
// formats.hpp -- plot-ready CSV and JSON encodings of the analysis products
//
//   SRA curve            CSV  "n,x"
//   relative SRA         CSV  "baseline,delta"
//   SRA model overlay    CSV  "n,x,model"
//   density overlay      CSV  "t,density,model"
//   noise model          JSON {"model","params","scale"}
//   fit result           JSON {"model","params","scale","residual_rms_log",
//                              "max_rel_dev","applicability":{...},"n_points_used"}
//   diagnostic reports   JSON lines, one report per line
//
// Numbers are written in shortest round-trip form, so every encoding parses
// back to identical values.
// ============================================================================
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sradiag/diagnostics.hpp"
#include "sradiag/fitting.hpp"
#include "sradiag/noise_models.hpp"
#include "sradiag/sra.hpp"

namespace sradiag {

std::string format_number(double v);

std::string sra_to_csv(const SRACurve& curve);
SRACurve sra_from_csv(std::string_view csv);

std::string relative_to_csv(const RelativeSRACurve& curve);
RelativeSRACurve relative_from_csv(std::string_view csv);

/// Model expected values per rank next to the data; rank 1 of a closed-form
/// curve is written as "inf".
std::string sra_overlay_csv(const SRACurve& curve, std::span<const double> model_curve);

/// Non-empty bins only; model evaluated where its support allows.
std::string density_overlay_csv(const HistogramDensity& hist, const NoiseModel& model);

std::string model_to_json(const NoiseModel& model);
NoiseModel model_from_json(std::string_view json_text);

std::string fit_to_json(const FitResult& fit);
FitResult fit_from_json(std::string_view json_text);

/// Single line, no trailing newline.
std::string report_to_json_line(const DiagnosticReport& report);
DiagnosticReport report_from_json_line(std::string_view line);

std::string reports_to_jsonl(std::span<const DiagnosticReport> reports);
std::vector<DiagnosticReport> reports_from_jsonl(std::string_view text);

}  // namespace sradiag
