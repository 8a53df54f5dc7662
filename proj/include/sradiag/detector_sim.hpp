// ============================================================================
// detector_sim.hpp -- synthetic single-photon detector time tags
//
// Model:
//   1. primary dark counts form a homogeneous Poisson process at dark_rate
//      over [0, duration];
//   2. every registered detection spawns, with probability afterpulse_prob,
//      one afterpulse delayed from it by a Pareto(ap_alpha, ap_xmin) draw
//      (optionally truncated at t_c); afterpulses may branch again;
//   3. a candidate within dead_time of the last registered detection is
//      dropped (non-paralyzable);
//   4. event times are rounded up to the tick grid: 1 ns in free-run mode,
//      gate_period in gated mode. At most one count is registered per tick.
//
// The random stream is consumed in a fixed order: all primary gaps first,
// then, in time order, the afterpulse decision and delay of each registered
// detection.
// ============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "sradiag/timestamps.hpp"

namespace sradiag {

struct SimConfig {
  double dark_rate = 1e-3;        // events per ns
  double afterpulse_prob = 0.0;   // per registered detection, in [0, 1)
  double ap_alpha = 2.0;          // > 1
  double ap_xmin = 1000.0;        // ns, >= dead_time
  std::uint64_t dead_time = 0;    // ns
  AcquisitionMode mode = AcquisitionMode::free_run;
  std::uint64_t gate_period = 0;  // ns, required when gated
  double duration = 1e8;          // ns
  std::uint64_t seed = 1;
  std::optional<double> tail_truncation;  // t_c, ns
  bool branching = true;          // false: afterpulses never spawn afterpulses
  std::string source_label = "sradiag-sim";

  /// Throws Error(config) on any invariant violation.
  void validate() const;
  [[nodiscard]] AcquisitionMeta meta() const;

  bool operator==(const SimConfig&) const = default;
};

struct SimStats {
  std::uint64_t primaries = 0;          // primary candidates generated
  std::uint64_t afterpulses = 0;        // afterpulse candidates generated
  std::uint64_t registered = 0;
  std::uint64_t dropped_dead_time = 0;  // includes same-tick collisions
  std::uint64_t dropped_after_end = 0;  // afterpulses landing past duration
};

struct SimOutput {
  TimestampSeries series;
  SimStats stats;
};

/// Seeded 64-bit generator plus the open-interval uniform variate used by
/// all draws.
class SimRandom {
public:
  explicit SimRandom(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1) with 53 random bits.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
  std::mt19937_64 engine_;
};

/// x_min * u^(-1 / (alpha - 1)): inverse CDF of the tail law whose SRA is
/// x_min * (N / (n - 1))^(1 / (alpha - 1)).
double draw_pareto(double alpha, double x_min, double u);

/// Same law conditioned on the draw not exceeding t_c.
double draw_truncated_pareto(double alpha, double x_min, double t_c, double u);

SimOutput simulate_with_stats(const SimConfig& config);
TimestampSeries simulate(const SimConfig& config);

std::string sim_config_to_json(const SimConfig& config);
SimConfig sim_config_from_json(std::string_view json_text);

/// Sidecar for simulated data: the acquisition descriptor plus the full
/// configuration under "ground_truth".
std::string sim_sidecar_json(const SimConfig& config);

}  // namespace sradiag
