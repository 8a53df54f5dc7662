#include "sradiag/detector_sim.hpp"

#include <queue>
#include <vector>

#include <json.hpp>

#include "sradiag/error.hpp"

namespace sradiag {

namespace {

struct Pending {
  double time;
  bool spawns;  // may itself produce an afterpulse once registered
  bool operator>(const Pending& o) const { return time > o.time; }
};

Tick ceil_to_grid(double t, std::uint64_t grid) {
  const double g = static_cast<double>(grid);
  return static_cast<Tick>(std::ceil(t / g)) * grid;
}

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, "SimConfig: " + msg); };
  if (!(dark_rate > 0.0) || !std::isfinite(dark_rate)) fail("dark_rate must be > 0");
  if (!(afterpulse_prob >= 0.0 && afterpulse_prob < 1.0)) fail("afterpulse_prob must be in [0, 1)");
  if (!(ap_alpha > 1.0) || !std::isfinite(ap_alpha)) fail("ap_alpha must be > 1");
  if (!(ap_xmin > 0.0) || !std::isfinite(ap_xmin)) fail("ap_xmin must be > 0");
  if (ap_xmin < static_cast<double>(dead_time)) fail("ap_xmin must be >= dead_time");
  if (!(duration > 0.0) || !std::isfinite(duration)) fail("duration must be > 0");
  if (duration > 1e18) fail("duration exceeds the 64-bit tick range");
  if (mode == AcquisitionMode::gated && gate_period == 0) fail("gated mode needs gate_period > 0");
  if (tail_truncation && !(*tail_truncation > ap_xmin)) fail("tail_truncation must exceed ap_xmin");
}

AcquisitionMeta SimConfig::meta() const {
  AcquisitionMeta m;
  m.mode = mode;
  if (mode == AcquisitionMode::gated) m.gate_period_ns = gate_period;
  m.dead_time_ns = dead_time;
  m.source_label = source_label;
  return m;
}

double draw_pareto(double alpha, double x_min, double u) {
  if (!(alpha > 1.0)) throw Error(ErrorKind::parameter, "draw_pareto: alpha must be > 1");
  if (!(x_min > 0.0)) throw Error(ErrorKind::parameter, "draw_pareto: x_min must be > 0");
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::parameter, "draw_pareto: u must be in (0, 1)");
  return x_min * std::pow(u, -1.0 / (alpha - 1.0));
}

double draw_truncated_pareto(double alpha, double x_min, double t_c, double u) {
  if (!(t_c > x_min)) throw Error(ErrorKind::parameter, "draw_truncated_pareto: t_c must exceed x_min");
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorKind::parameter, "draw_truncated_pareto: u must be in (0, 1)");
  }
  // Survival at the cut; map u onto (S_c, 1) and invert the untruncated law.
  const double s_c = std::pow(t_c / x_min, -(alpha - 1.0));
  const double v = s_c + (1.0 - s_c) * u;
  return std::min(draw_pareto(alpha, x_min, std::min(v, std::nextafter(1.0, 0.0))), t_c);
}

SimOutput simulate_with_stats(const SimConfig& config) {
  config.validate();
  SimRandom rng(config.seed);
  SimStats stats;

  std::vector<double> primaries;
  primaries.reserve(static_cast<std::size_t>(config.dark_rate * config.duration * 1.1) + 16);
  for (double t = rng.exponential(config.dark_rate); t <= config.duration;
       t += rng.exponential(config.dark_rate)) {
    primaries.push_back(t);
  }
  stats.primaries = primaries.size();

  const std::uint64_t grid =
      config.mode == AcquisitionMode::gated ? config.gate_period : std::uint64_t{1};
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending;
  std::vector<Tick> ticks;
  ticks.reserve(primaries.size());

  std::size_t next_primary = 0;
  while (next_primary < primaries.size() || !pending.empty()) {
    Pending cand;
    if (pending.empty() ||
        (next_primary < primaries.size() && primaries[next_primary] <= pending.top().time)) {
      cand = {primaries[next_primary++], true};
    } else {
      cand = pending.top();
      pending.pop();
    }

    const Tick tick = ceil_to_grid(cand.time, grid);
    if (!ticks.empty() && (tick <= ticks.back() || tick - ticks.back() < config.dead_time)) {
      ++stats.dropped_dead_time;
      continue;
    }
    ticks.push_back(tick);

    if (config.afterpulse_prob > 0.0 && cand.spawns) {
      if (rng.uniform() < config.afterpulse_prob) {
        const double u = rng.uniform();
        const double delay =
            config.tail_truncation
                ? draw_truncated_pareto(config.ap_alpha, config.ap_xmin, *config.tail_truncation, u)
                : draw_pareto(config.ap_alpha, config.ap_xmin, u);
        ++stats.afterpulses;
        const double when = static_cast<double>(tick) + delay;
        if (when > config.duration) {
          ++stats.dropped_after_end;
        } else {
          pending.push({when, config.branching});
        }
      }
    }
  }
  stats.registered = ticks.size();
  return {TimestampSeries(std::move(ticks), config.meta()), stats};
}

TimestampSeries simulate(const SimConfig& config) {
  return simulate_with_stats(config).series;
}

namespace {

nlohmann::ordered_json config_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["dark_rate_per_ns"] = c.dark_rate;
  j["afterpulse_prob"] = c.afterpulse_prob;
  j["ap_alpha"] = c.ap_alpha;
  j["ap_xmin_ns"] = c.ap_xmin;
  j["dead_time_ns"] = c.dead_time;
  j["mode"] = c.mode == AcquisitionMode::gated ? "gated" : "free_run";
  j["gate_period_ns"] = c.gate_period;
  j["duration_ns"] = c.duration;
  j["seed"] = c.seed;
  if (c.tail_truncation) {
    j["tail_truncation_ns"] = *c.tail_truncation;
  } else {
    j["tail_truncation_ns"] = nullptr;
  }
  j["branching"] = c.branching;
  j["source_label"] = c.source_label;
  return j;
}

}  // namespace

std::string sim_config_to_json(const SimConfig& config) { return config_json(config).dump(2); }

SimConfig sim_config_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("sim config: ") + e.what(), e.byte);
  }
  if (j.contains("ground_truth")) j = j["ground_truth"];
  SimConfig c;
  try {
    c.dark_rate = j.value("dark_rate_per_ns", c.dark_rate);
    c.afterpulse_prob = j.value("afterpulse_prob", c.afterpulse_prob);
    c.ap_alpha = j.value("ap_alpha", c.ap_alpha);
    c.ap_xmin = j.value("ap_xmin_ns", c.ap_xmin);
    c.dead_time = j.value("dead_time_ns", c.dead_time);
    const auto mode = j.value("mode", std::string("free_run"));
    if (mode == "gated") {
      c.mode = AcquisitionMode::gated;
    } else if (mode != "free_run") {
      throw Error(ErrorKind::config, "sim config: unknown mode '" + mode + "'");
    }
    c.gate_period = j.value("gate_period_ns", c.gate_period);
    c.duration = j.value("duration_ns", c.duration);
    c.seed = j.value("seed", c.seed);
    if (j.contains("tail_truncation_ns") && !j["tail_truncation_ns"].is_null()) {
      c.tail_truncation = j["tail_truncation_ns"].get<double>();
    }
    c.branching = j.value("branching", c.branching);
    c.source_label = j.value("source_label", c.source_label);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("sim config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string sim_sidecar_json(const SimConfig& config) {
  const auto meta = config.meta();
  nlohmann::ordered_json j;
  j["mode"] = meta.mode == AcquisitionMode::gated ? "gated" : "free_run";
  if (meta.gate_period_ns) {
    j["gate_period_ns"] = *meta.gate_period_ns;
  } else {
    j["gate_period_ns"] = nullptr;
  }
  j["dead_time_ns"] = meta.dead_time_ns;
  j["source_label"] = meta.source_label;
  j["ground_truth"] = config_json(config);
  return j.dump(2);
}

}  // namespace sradiag
