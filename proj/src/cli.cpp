#include "sradiag/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "sradiag/detector_sim.hpp"
#include "sradiag/diagnostics.hpp"
#include "sradiag/error.hpp"
#include "sradiag/fitting.hpp"
#include "sradiag/formats.hpp"
#include "sradiag/sra.hpp"
#include "sradiag/timestamps.hpp"
#include "sradiag/units.hpp"

namespace sradiag::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_path(const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return fs::path(dir) / path;
  }
  return path;
}

std::optional<TimestampFormat> format_flag(const std::string& flag) {
  if (flag.empty()) return std::nullopt;
  if (flag == "text") return TimestampFormat::text_lines;
  if (flag == "binary") return TimestampFormat::binary_le64;
  throw Error(ErrorKind::config, "unknown --format '" + flag + "' (text|binary)");
}

/// Writes to `path` or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_file(output_path(path), contents);
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::ordering: return kExitParse;
    case ErrorKind::convergence: return kExitConvergence;
    case ErrorKind::config: return kExitConfig;
    default: return kExitData;
  }
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  double dark_rate = 1e-3;
  double afterpulse_prob = 0.0;
  double ap_alpha = 2.0;
  std::string ap_xmin = "1us";
  std::string dead_time = "0ns";
  bool gated = false;
  std::string gate_period;
  std::string duration = "1e8ns";
  std::uint64_t seed = 1;
  std::string tail_truncation;
  bool single_generation = false;
  std::string label = "sradiag-sim";
  std::string output;
  std::string format;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  SimConfig c;
  c.dark_rate = a.dark_rate;
  c.afterpulse_prob = a.afterpulse_prob;
  c.ap_alpha = a.ap_alpha;
  c.ap_xmin = parse_duration_ns(a.ap_xmin);
  c.dead_time = static_cast<std::uint64_t>(std::llround(parse_duration_ns(a.dead_time)));
  c.mode = a.gated ? AcquisitionMode::gated : AcquisitionMode::free_run;
  if (!a.gate_period.empty()) {
    c.gate_period = static_cast<std::uint64_t>(std::llround(parse_duration_ns(a.gate_period)));
  }
  c.duration = parse_duration_ns(a.duration);
  c.seed = a.seed;
  if (!a.tail_truncation.empty()) c.tail_truncation = parse_duration_ns(a.tail_truncation);
  c.branching = !a.single_generation;
  c.source_label = a.label;

  const auto sim = simulate_with_stats(c);
  const auto path = output_path(a.output);
  save_timestamps(path, sim.series, format_flag(a.format));
  write_file(sidecar_path(path), sim_sidecar_json(c) + "\n");
  out << "wrote " << sim.stats.registered << " ticks to " << path.string() << " ("
      << sim.stats.primaries << " primaries, " << sim.stats.afterpulses << " afterpulses)\n";
  return kExitOk;
}

// --- sra -----------------------------------------------------------------------

struct InputArgs {
  std::string input;
  std::string format;
  bool dedup = false;
};

InterArrivalSeries load_intervals(const InputArgs& in) {
  const auto series = load_timestamps(in.input, format_flag(in.format));
  return inter_arrivals(series, in.dedup);
}

struct SraArgs {
  InputArgs in;
  std::string output;
};

int do_sra(const SraArgs& a, std::ostream& out) {
  const auto intervals = load_intervals(a.in);
  emit(a.output, sra_to_csv(build_sra(intervals.intervals())), out);
  return kExitOk;
}

// --- fit -----------------------------------------------------------------------

struct FitArgs {
  InputArgs in;
  std::string model = "powerlaw";
  std::string route = "histogram";
  std::size_t bins = 100;
  std::string binning = "log";
  std::string x_min;
  std::string t_min;
  std::string t_max;
  double rel_tol = 0.25;
  std::size_t run_len = 5;
  std::string output;
  std::string curve;
};

int do_fit(const FitArgs& a, std::ostream& out) {
  const auto intervals = load_intervals(a.in);
  const auto kind = model_kind_from_string(a.model);
  const ApplicabilityOptions app{a.rel_tol, a.run_len};

  std::string curve_csv;
  FitResult fit;
  int status = kExitOk;
  if (a.route == "sra") {
    const auto curve = build_sra(intervals.intervals());
    if (kind == ModelKind::powerlaw) {
      double x_min = static_cast<double>(intervals.source_meta().dead_time_ns);
      if (!a.x_min.empty()) x_min = parse_duration_ns(a.x_min);
      if (!(x_min > 0.0)) x_min = curve.min();
      fit = fit_powerlaw_sra(curve, x_min, app);
    } else if (kind == ModelKind::poisson) {
      fit = fit_poisson_sra(curve, app);
    } else {
      throw Error(ErrorKind::config, "the saturating model has no SRA route; use --route histogram");
    }
    curve_csv = sra_overlay_csv(curve, model_sra_curve(fit.model, curve.size()));
  } else if (a.route == "histogram") {
    Binning binning = Binning::log;
    if (a.binning == "linear") {
      binning = Binning::linear;
    } else if (a.binning != "log") {
      throw Error(ErrorKind::config, "unknown --binning '" + a.binning + "' (log|linear)");
    }
    const auto hist = histogram_density(intervals, a.bins, binning);
    DensityFitOptions opts;
    opts.applicability = app;
    if (!a.t_min.empty()) opts.t_min = parse_duration_ns(a.t_min);
    if (!a.t_max.empty()) opts.t_max = parse_duration_ns(a.t_max);
    std::optional<NoiseModel> init;
    if (kind == ModelKind::powerlaw) {
      // Seed the density fit with the SRA estimate of alpha.
      try {
        const auto curve = build_sra(intervals.intervals());
        const auto sra_fit = fit_powerlaw_sra(curve, curve.min(), app);
        const auto& p = std::get<PowerLawParams>(sra_fit.model.params);
        init = NoiseModel{PowerLawParams{1.0, p.alpha, 1.0}, 1.0};
        // Anchor the amplitude on the first used bin.
        for (std::size_t i = 0; i < hist.bins(); ++i) {
          if (hist.densities[i] > 0.0) {
            const double t = hist.center(i);
            std::get<PowerLawParams>(init->params).C = hist.densities[i] * std::pow(t, p.alpha);
            break;
          }
        }
      } catch (const Error&) {
        init.reset();
      }
    }
    try {
      fit = fit_density(hist, kind, init, opts);
    } catch (const ConvergenceError& e) {
      fit = e.best();
      status = kExitConvergence;
    }
    curve_csv = density_overlay_csv(hist, fit.model);
  } else {
    throw Error(ErrorKind::config, "unknown --route '" + a.route + "' (sra|histogram)");
  }

  emit(a.output, fit_to_json(fit) + "\n", out);
  std::string curve_path = a.curve;
  if (curve_path.empty() && !a.output.empty() && a.output != "-") {
    curve_path = fs::path(a.output).replace_extension(".curve.csv").string();
  }
  if (!curve_path.empty()) write_file(output_path(curve_path), curve_csv);
  return status;
}

// --- compare ---------------------------------------------------------------------

struct CompareArgs {
  InputArgs probe;
  InputArgs baseline;
  std::size_t m = kDefaultResampleLength;
  double epsilon = 1.0;
  double threshold = 0.3;
  std::string output;
  std::string report;
};

int do_compare(const CompareArgs& a, std::ostream& out) {
  const auto probe = load_intervals(a.probe);
  const auto baseline = load_intervals(a.baseline);
  MonitorConfig cfg;
  cfg.resample_len = a.m;
  cfg.epsilon = a.epsilon;
  cfg.threshold = a.threshold;
  cfg.window_size = std::max<std::size_t>(2, probe.size());
  cfg.stride = 1;
  auto report = compare_windows(probe, baseline, cfg);
  report.relative.probe_label = fs::path(a.probe.input).filename().string();
  report.relative.baseline_label = fs::path(a.baseline.input).filename().string();
  if (report.baseline_id.empty()) report.baseline_id = report.relative.baseline_label;
  emit(a.output, relative_to_csv(report.relative), out);
  if (!a.report.empty()) emit(a.report, report_to_json_line(report) + "\n", out);
  return kExitOk;
}

// --- diagnose --------------------------------------------------------------------

struct DiagnoseArgs {
  InputArgs stream;
  InputArgs baseline;
  std::size_t window = 10000;
  std::size_t stride = 5000;
  std::size_t m = kDefaultResampleLength;
  double epsilon = 1.0;
  std::optional<double> threshold;
  std::size_t calibration_runs = 100;
  std::uint64_t seed = 1;
  std::string output;
};

int do_diagnose(const DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
  const auto stream = load_timestamps(a.stream.input, format_flag(a.stream.format));
  const auto baseline = load_intervals(a.baseline);
  MonitorConfig cfg;
  cfg.window_size = a.window;
  cfg.stride = a.stride;
  cfg.resample_len = a.m;
  cfg.epsilon = a.epsilon;
  if (a.threshold) {
    cfg.threshold = *a.threshold;
  } else {
    cfg.threshold = calibrate_threshold(baseline.intervals(), cfg,
                                        {a.calibration_runs, 0.95, a.seed});
  }
  auto result = rolling_diagnose(stream, baseline, cfg);
  if (!result.note.empty()) err << "note: " << result.note << "\n";
  if (baseline.source_meta().source_label.empty()) {
    for (auto& r : result.reports) r.baseline_id = fs::path(a.baseline.input).filename().string();
  }
  emit(a.output, reports_to_jsonl(result.reports), out);
  return kExitOk;
}

void add_input(CLI::App* cmd, InputArgs& in, const std::string& name, const std::string& desc) {
  cmd->add_option(name, in.input, desc)->required()->check(CLI::ExistingFile);
}

void add_input_flags(CLI::App* cmd, InputArgs& in) {
  cmd->add_option("--format", in.format, "Input layout: text|binary (default: by extension)");
  cmd->add_flag("--dedup", in.dedup, "Drop zero-gap duplicate ticks instead of failing");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequence-of-ranged-amplitudes diagnostics for single-photon detector time tags",
               "sradiag"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic detector stream");
  simulate->add_option("--dark-rate", sim.dark_rate, "Dark-count rate, events per ns");
  simulate->add_option("--afterpulse-prob", sim.afterpulse_prob, "Afterpulse probability per detection");
  simulate->add_option("--ap-alpha", sim.ap_alpha, "Afterpulse power-law exponent (> 1)");
  simulate->add_option("--ap-xmin", sim.ap_xmin, "Minimum afterpulse delay (e.g. 1us)");
  simulate->add_option("--dead-time", sim.dead_time, "Dead time (e.g. 50ns)");
  simulate->add_flag("--gated", sim.gated, "Gated mode");
  simulate->add_option("--gate-period", sim.gate_period, "Gate period (e.g. 100ns)");
  simulate->add_option("--duration", sim.duration, "Acquisition length (e.g. 100ms)");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--tail-truncation", sim.tail_truncation, "Truncate afterpulse delays at t_c");
  simulate->add_flag("--single-generation", sim.single_generation, "Afterpulses do not branch");
  simulate->add_option("--label", sim.label, "Source label for the sidecar");
  simulate->add_option("-o,--output", sim.output, "Timestamp file to write")->required();
  simulate->add_option("--format", sim.format, "Output layout: text|binary (default: by extension)");

  SraArgs sra;
  auto* sra_cmd = app.add_subcommand("sra", "Write the SRA curve of the inter-arrival times");
  add_input(sra_cmd, sra.in, "input", "Timestamp file");
  add_input_flags(sra_cmd, sra.in);
  sra_cmd->add_option("-o,--output", sra.output, "CSV output (default stdout)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a noise model to the inter-arrival times");
  add_input(fit_cmd, fit.in, "input", "Timestamp file");
  add_input_flags(fit_cmd, fit.in);
  fit_cmd->add_option("--model", fit.model, "poisson|powerlaw|saturating")
      ->check(CLI::IsMember({"poisson", "powerlaw", "saturating"}));
  fit_cmd->add_option("--route", fit.route, "histogram|sra")->check(CLI::IsMember({"histogram", "sra"}));
  fit_cmd->add_option("--bins", fit.bins, "Histogram bin count");
  fit_cmd->add_option("--binning", fit.binning, "log|linear");
  fit_cmd->add_option("--x-min", fit.x_min, "Power-law x_min (default: dead time from sidecar)");
  fit_cmd->add_option("--t-min", fit.t_min, "Lower edge of the density fit window");
  fit_cmd->add_option("--t-max", fit.t_max, "Upper edge of the density fit window");
  fit_cmd->add_option("--rel-tol", fit.rel_tol, "Applicability relative tolerance");
  fit_cmd->add_option("--run-len", fit.run_len, "Applicability run length");
  fit_cmd->add_option("-o,--output", fit.output, "FitResult JSON (default stdout)");
  fit_cmd->add_option("--curve", fit.curve, "Model overlay CSV (default <output>.curve.csv)");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Relative SRA of a probe against a baseline");
  add_input(compare, cmp.probe, "probe", "Probe timestamp file");
  add_input(compare, cmp.baseline, "baseline", "Baseline timestamp file");
  compare->add_option("--format", cmp.probe.format, "Input layout for both files");
  compare->add_flag("--dedup", cmp.probe.dedup, "Drop zero-gap duplicate ticks");
  compare->add_option("-m", cmp.m, "Resample length");
  compare->add_option("--epsilon", cmp.epsilon, "Distance guard, ns");
  compare->add_option("--threshold", cmp.threshold, "Drift threshold for the report verdict");
  compare->add_option("-o,--output", cmp.output, "RelativeSRA CSV (default stdout)");
  compare->add_option("--report", cmp.report, "Also write the DiagnosticReport JSON line here");

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "Rolling relative-SRA drift monitor");
  add_input(diagnose, diag.stream, "stream", "Timestamp stream to monitor");
  diagnose->add_option("--baseline", diag.baseline.input, "Baseline timestamp file")
      ->required()
      ->check(CLI::ExistingFile);
  diagnose->add_option("--format", diag.stream.format, "Input layout for both files");
  diagnose->add_flag("--dedup", diag.baseline.dedup, "Drop zero-gap duplicates in the baseline");
  diagnose->add_option("--window", diag.window, "Window size in inter-arrivals");
  diagnose->add_option("--stride", diag.stride, "Window stride in inter-arrivals");
  diagnose->add_option("-m", diag.m, "Resample length");
  diagnose->add_option("--epsilon", diag.epsilon, "Distance guard, ns");
  diagnose->add_option("--threshold", diag.threshold, "Fixed threshold (default: calibrate)");
  diagnose->add_option("--calibration-runs", diag.calibration_runs, "Null comparisons for calibration");
  diagnose->add_option("--seed", diag.seed, "Calibration seed");
  diagnose->add_option("-o,--output", diag.output, "JSON-lines output (default stdout)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("sradiag");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*simulate) return do_simulate(sim, out);
    if (*sra_cmd) return do_sra(sra, out);
    if (*fit_cmd) return do_fit(fit, out);
    if (*compare) {
      cmp.baseline.format = cmp.probe.format;
      cmp.baseline.dedup = cmp.probe.dedup;
      return do_compare(cmp, out);
    }
    if (*diagnose) {
      diag.baseline.format = diag.stream.format;
      return do_diagnose(diag, out, err);
    }
  } catch (const Error& e) {
    err << "sradiag: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "sradiag: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitUsage;
}

}  // namespace sradiag::cli
