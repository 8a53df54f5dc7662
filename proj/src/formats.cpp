#include "sradiag/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "sradiag/error.hpp"

namespace sradiag {

namespace {

using ojson = nlohmann::ordered_json;

struct CsvTable {
  std::vector<std::vector<double>> rows;
};

// Offset of each line start is tracked so errors point at the right byte.
CsvTable parse_csv(std::string_view csv, std::string_view expected_header) {
  CsvTable table;
  std::size_t pos = 0;
  bool header_seen = false;
  const std::size_t columns =
      static_cast<std::size_t>(std::count(expected_header.begin(), expected_header.end(), ',')) + 1;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    std::string_view line = csv.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != expected_header) {
        throw ParseError("expected CSV header '" + std::string(expected_header) + "'", pos);
      }
      header_seen = true;
    } else if (!line.empty()) {
      std::vector<double> row;
      std::size_t field_start = 0;
      while (true) {
        const std::size_t comma = line.find(',', field_start);
        const auto field = line.substr(field_start, comma == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : comma - field_start);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
          throw ParseError("bad number '" + std::string(field) + "'", pos + field_start);
        }
        row.push_back(v);
        if (comma == std::string_view::npos) break;
        field_start = comma + 1;
      }
      if (row.size() != columns) throw ParseError("wrong column count", pos);
      table.rows.push_back(std::move(row));
    }
    pos = eol + 1;
  }
  if (!header_seen) throw ParseError("missing CSV header", 0);
  return table;
}

ojson params_json(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> ojson {
        using P = std::decay_t<decltype(p)>;
        ojson j;
        if constexpr (std::is_same_v<P, PoissonParams>) {
          j["lambda"] = p.lambda;
        } else if constexpr (std::is_same_v<P, PowerLawParams>) {
          j["C"] = p.C;
          j["alpha"] = p.alpha;
          j["x_min"] = p.x_min;
        } else {
          j["A"] = p.A;
          j["B"] = p.B;
        }
        return j;
      },
      params);
}

ojson model_json(const NoiseModel& m) {
  ojson j;
  j["model"] = to_string(m.kind());
  j["params"] = params_json(m.params);
  j["scale"] = m.scale;
  return j;
}

NoiseModel model_from(const nlohmann::json& j) {
  NoiseModel m;
  const auto kind = model_kind_from_string(j.at("model").get<std::string>());
  const auto& p = j.at("params");
  switch (kind) {
    case ModelKind::poisson: m.params = PoissonParams{p.at("lambda").get<double>()}; break;
    case ModelKind::powerlaw:
      m.params = PowerLawParams{p.at("C").get<double>(), p.at("alpha").get<double>(),
                                p.at("x_min").get<double>()};
      break;
    case ModelKind::saturating:
      m.params = SaturatingParams{p.at("A").get<double>(), p.at("B").get<double>()};
      break;
  }
  m.scale = j.value("scale", 1.0);
  return m;
}

template <typename F>
auto with_json(std::string_view text, const char* what, F&& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what(), e.byte);
  }
  try {
    return body(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what(), 0);
  }
}

double json_number_or_inf(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string sra_to_csv(const SRACurve& curve) {
  std::string out = "n,x\n";
  const auto x = curve.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_number(x[i]);
    out += '\n';
  }
  return out;
}

SRACurve sra_from_csv(std::string_view csv) {
  const auto table = parse_csv(csv, "n,x");
  std::vector<double> x;
  x.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i][0] != static_cast<double>(i + 1)) {
      throw ParseError("SRA ranks must run 1..N in order", 0);
    }
    x.push_back(table.rows[i][1]);
  }
  return SRACurve(std::move(x));
}

std::string relative_to_csv(const RelativeSRACurve& curve) {
  std::string out = "baseline,delta\n";
  for (const auto& p : curve.points) {
    out += format_number(p.baseline);
    out += ',';
    out += format_number(p.delta);
    out += '\n';
  }
  return out;
}

RelativeSRACurve relative_from_csv(std::string_view csv) {
  const auto table = parse_csv(csv, "baseline,delta");
  RelativeSRACurve rel;
  rel.points.reserve(table.rows.size());
  for (const auto& row : table.rows) rel.points.push_back({row[0], row[1]});
  return rel;
}

std::string sra_overlay_csv(const SRACurve& curve, std::span<const double> model_curve) {
  if (model_curve.size() != curve.size()) {
    throw Error(ErrorKind::shape, "overlay: model and data lengths differ");
  }
  std::string out = "n,x,model\n";
  const auto x = curve.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_number(x[i]) + ',' +
           format_number(model_curve[i]) + '\n';
  }
  return out;
}

std::string density_overlay_csv(const HistogramDensity& hist, const NoiseModel& model) {
  std::string out = "t,density,model\n";
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    if (!(hist.densities[i] > 0.0)) continue;
    const double t = hist.center(i);
    double m = std::numeric_limits<double>::quiet_NaN();
    try {
      m = model.density(t);
    } catch (const Error&) {
      // Outside the model's support (e.g. below the power-law x_min).
    }
    out += format_number(t) + ',' + format_number(hist.densities[i]) + ',' + format_number(m) +
           '\n';
  }
  return out;
}

std::string model_to_json(const NoiseModel& model) { return model_json(model).dump(); }

NoiseModel model_from_json(std::string_view json_text) {
  return with_json(json_text, "model", [](const nlohmann::json& j) { return model_from(j); });
}

std::string fit_to_json(const FitResult& fit) {
  ojson j = model_json(fit.model);
  j["residual_rms_log"] = fit.residual_rms_log;
  j["max_rel_dev"] = fit.max_rel_dev;
  ojson a;
  a["t_lo_ns"] = fit.applicability.t_lo;
  a["t_hi_ns"] = fit.applicability.t_hi;
  a["break_detected"] = fit.applicability.break_detected;
  if (fit.applicability.break_point) {
    a["break_point_ns"] = *fit.applicability.break_point;
  } else {
    a["break_point_ns"] = nullptr;
  }
  j["applicability"] = a;
  j["n_points_used"] = fit.n_points_used;
  return j.dump(2);
}

FitResult fit_from_json(std::string_view json_text) {
  return with_json(json_text, "fit", [](const nlohmann::json& j) {
    FitResult fit;
    fit.model = model_from(j);
    fit.residual_rms_log = j.at("residual_rms_log").get<double>();
    fit.max_rel_dev = j.at("max_rel_dev").get<double>();
    const auto& a = j.at("applicability");
    fit.applicability.t_lo = a.at("t_lo_ns").get<double>();
    fit.applicability.t_hi = a.at("t_hi_ns").get<double>();
    fit.applicability.break_detected = a.at("break_detected").get<bool>();
    if (a.contains("break_point_ns") && !a["break_point_ns"].is_null()) {
      fit.applicability.break_point = a["break_point_ns"].get<double>();
    }
    fit.n_points_used = j.at("n_points_used").get<std::size_t>();
    return fit;
  });
}

std::string report_to_json_line(const DiagnosticReport& report) {
  ojson j;
  j["baseline_id"] = report.baseline_id;
  j["window_span"] = {report.window_span.first, report.window_span.second};
  j["distance"] = report.distance;
  j["threshold"] = report.threshold;
  j["verdict"] = to_string(report.verdict);
  std::vector<double> base, delta;
  base.reserve(report.relative.points.size());
  delta.reserve(report.relative.points.size());
  for (const auto& p : report.relative.points) {
    base.push_back(p.baseline);
    delta.push_back(p.delta);
  }
  j["relative"] = {{"baseline_label", report.relative.baseline_label},
                   {"probe_label", report.relative.probe_label},
                   {"baseline", base},
                   {"delta", delta}};
  return j.dump();
}

DiagnosticReport report_from_json_line(std::string_view line) {
  return with_json(line, "report", [](const nlohmann::json& j) {
    DiagnosticReport r;
    r.baseline_id = j.at("baseline_id").get<std::string>();
    r.window_span = {j.at("window_span").at(0).get<Tick>(), j.at("window_span").at(1).get<Tick>()};
    r.distance = json_number_or_inf(j.at("distance"));
    r.threshold = j.at("threshold").get<double>();
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict != "drift" && verdict != "stable") {
      throw ParseError("report: unknown verdict '" + verdict + "'", 0);
    }
    r.verdict = verdict == "drift" ? Verdict::drift : Verdict::stable;
    const auto& rel = j.at("relative");
    r.relative.baseline_label = rel.value("baseline_label", std::string{});
    r.relative.probe_label = rel.value("probe_label", std::string{});
    const auto& base = rel.at("baseline");
    const auto& delta = rel.at("delta");
    if (base.size() != delta.size()) throw ParseError("report: relative arrays differ in length", 0);
    for (std::size_t k = 0; k < base.size(); ++k) {
      r.relative.points.push_back({base[k].get<double>(), delta[k].get<double>()});
    }
    return r;
  });
}

std::string reports_to_jsonl(std::span<const DiagnosticReport> reports) {
  std::string out;
  for (const auto& r : reports) {
    out += report_to_json_line(r);
    out += '\n';
  }
  return out;
}

std::vector<DiagnosticReport> reports_from_jsonl(std::string_view text) {
  std::vector<DiagnosticReport> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(report_from_json_line(line));
    pos = eol + 1;
  }
  return out;
}

}  // namespace sradiag
