#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "sradiag/detector_sim.hpp"
#include "sradiag/fitting.hpp"
#include "sradiag/noise_models.hpp"

using namespace sradiag;
using doctest::Approx;

namespace {

std::vector<double> intervals_of(const TimestampSeries& s) {
  const auto ia = inter_arrivals(s, true);
  return {ia.intervals().begin(), ia.intervals().end()};
}

}  // namespace

TEST_CASE("draw_pareto") {
  CHECK(draw_pareto(2.0, 1.0, 0.01) == Approx(100.0));
  CHECK(draw_pareto(1.2, 7.0, std::nextafter(1.0, 0.0)) == Approx(7.0));
  CHECK_THROWS_AS(draw_pareto(1.0, 1.0, 0.5), Error);
  CHECK_THROWS_AS(draw_pareto(2.0, 0.0, 0.5), Error);
  CHECK_THROWS_AS(draw_pareto(2.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(draw_pareto(2.0, 1.0, 1.0), Error);

  for (double u : {1e-9, 0.01, 0.5, 0.999999}) {
    const double x = draw_truncated_pareto(3.0, 2400, 24000, u);
    CHECK(x >= 2400);
    CHECK(x <= 24000);
  }
  CHECK_THROWS_AS(draw_truncated_pareto(3.0, 2400, 2000, 0.5), Error);
}

TEST_CASE("Pareto draws follow the power-law density") {
  const double alpha = 1.2, x_min = 1.0;
  const std::size_t N = 1'000'000;
  const auto s = oracle::pareto_samples(alpha, x_min, N, 77);
  // Normalized density (alpha - 1) x_min^(alpha - 1) t^(-alpha).
  const PowerLawParams p{(alpha - 1) * std::pow(x_min, alpha - 1), alpha, x_min};

  // Five log bins per decade over the central decades [10, 1e5] x_min.
  std::vector<double> edges;
  for (int k = 5; k <= 25; ++k) edges.push_back(x_min * std::pow(10.0, k / 5.0));
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (double v : s) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    if (it == edges.begin() || it == edges.end()) continue;
    ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double t) { return powerlaw_density(p, t); }, edges[i], edges[i + 1]);
    CHECK(static_cast<double>(counts[i]) / N == Approx(mass).epsilon(0.05));
  }
}

TEST_CASE("pure dark counts: mean interval and exponentiality") {
  SUBCASE("mean") {
    SimConfig cfg;
    cfg.dark_rate = 1e-3;
    cfg.duration = 1e8;
    cfg.seed = 9;
    const auto x = intervals_of(simulate(cfg));
    const double N = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / N;
    CHECK(std::abs(mean - 1000.0) <= 3 * 1000.0 / std::sqrt(N));
  }
  SUBCASE("closed-form SRA") {
    SimConfig cfg;
    // At N = 1e4 the 0.95N rank alone has ~4.5% relative noise; 1e6 keeps the
    // 5% bound meaningful.
    cfg.dark_rate = 1e-4;
    cfg.duration = 1e10;
    cfg.seed = 10;
    const auto c = build_sra(intervals_of(simulate(cfg)));
    REQUIRE(c.size() >= 900000);
    const std::vector<double> x(c.values().begin(), c.values().end());
    const double dev = oracle::max_rel_dev_central(
        x, [&](std::size_t n) { return oracle::exponential_sra(1e-4, x.size(), static_cast<double>(n)); });
    CHECK(dev <= 0.05);
  }
}

TEST_CASE("afterpulse count inflation is 1/(1-p)") {
  for (double p : {0.2, 0.5}) {
    SimConfig cfg;
    cfg.dark_rate = 1e-4;
    cfg.duration = 1e9;
    cfg.afterpulse_prob = p;
    cfg.ap_alpha = 2.0;
    cfg.ap_xmin = 1000;
    cfg.seed = 21;
    const auto out = simulate_with_stats(cfg);
    const double P = static_cast<double>(out.stats.primaries);
    const double K = P + static_cast<double>(out.stats.afterpulses);
    // Given P primaries, K has mean P/(1-p) and variance P p/(1-p)^2.
    const double se = std::sqrt(P * p) / (1 - p);
    CHECK(std::abs(K - P / (1 - p)) <= 3 * se);
    CHECK(out.stats.registered + out.stats.dropped_dead_time + out.stats.dropped_after_end ==
          out.stats.primaries + out.stats.afterpulses);
  }
}

TEST_CASE("single-generation mode spawns afterpulses from primaries only") {
  SimConfig cfg;
  cfg.dark_rate = 1e-4;
  cfg.duration = 1e9;
  cfg.afterpulse_prob = 0.5;
  cfg.branching = false;
  const auto out = simulate_with_stats(cfg);
  const double P = static_cast<double>(out.stats.primaries);
  CHECK(static_cast<double>(out.stats.afterpulses) == Approx(0.5 * P).epsilon(0.02));
}

TEST_CASE("truncated afterpulse tail breaks away from the power law near the cut") {
  SimConfig cfg;
  cfg.dark_rate = 1e-7;
  cfg.afterpulse_prob = 0.9;
  cfg.ap_alpha = 3.0;
  cfg.ap_xmin = 2400;
  cfg.tail_truncation = 24000;
  cfg.duration = 1.2e10;
  cfg.seed = 4;
  std::vector<double> x;
  for (double v : intervals_of(simulate(cfg))) {
    // Drop gaps between chains and the few gaps where a dark count lands inside a chain.
    if (v >= cfg.ap_xmin && v < 1e6) x.push_back(v);
  }
  REQUIRE(x.size() > 5000);
  const auto c = build_sra(x);
  const auto model = model_sra_curve({PowerLawParams{1, 3.0, 2400}, 1.0}, c.size());
  const auto r = applicability_range(c, model);
  REQUIRE(r.break_detected);
  CHECK(*r.break_point > 12000);
  CHECK(*r.break_point < 48000);
}

TEST_CASE("invariants: determinism, dead time, gating") {
  SimConfig cfg;
  cfg.dark_rate = 2e-3;
  cfg.afterpulse_prob = 0.3;
  cfg.ap_xmin = 50;
  cfg.dead_time = 50;
  cfg.duration = 2e7;
  cfg.seed = 12345;

  const auto a = simulate(cfg);
  const auto b = simulate(cfg);
  CHECK(write_timestamps(a, TimestampFormat::binary_le64) ==
        write_timestamps(b, TimestampFormat::binary_le64));
  cfg.seed = 12346;
  CHECK_FALSE(simulate(cfg) == a);

  const auto t = a.ticks();
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] - t[i - 1] >= 50);
  CHECK(a.meta().dead_time_ns == 50);

  cfg.mode = AcquisitionMode::gated;
  cfg.gate_period = 100;
  const auto g = simulate(cfg);
  REQUIRE(g.size() > 100);
  bool all_multiples = true;
  for (auto v : g.ticks()) all_multiples = all_multiples && v % 100 == 0;
  CHECK(all_multiples);
  CHECK(g.meta().gate_period_ns == 100);
}

TEST_CASE("config validation and JSON") {
  const auto bad = [](auto mutate) {
    SimConfig c;
    mutate(c);
    try {
      c.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::config;
    }
    return false;
  };
  CHECK(bad([](SimConfig& c) { c.afterpulse_prob = 1.0; }));
  CHECK(bad([](SimConfig& c) { c.ap_alpha = 1.0; }));
  CHECK(bad([](SimConfig& c) { c.duration = 0; }));
  CHECK(bad([](SimConfig& c) { c.dark_rate = -1; }));
  CHECK(bad([](SimConfig& c) { c.mode = AcquisitionMode::gated; }));
  CHECK(bad([](SimConfig& c) { c.dead_time = 2000; }));
  CHECK(bad([](SimConfig& c) { c.tail_truncation = 10; }));

  SimConfig c;
  c.afterpulse_prob = 0.1;
  c.tail_truncation = 24000;
  c.mode = AcquisitionMode::gated;
  c.gate_period = 40;
  c.seed = 99;
  c.branching = false;
  c.source_label = "bench";
  CHECK(sim_config_from_json(sim_config_to_json(c)) == c);
  CHECK(sim_config_from_json(sim_sidecar_json(c)) == c);

  const auto side = nlohmann::json::parse(sim_sidecar_json(c));
  CHECK(side.at("mode") == "gated");
  CHECK(side.at("gate_period_ns") == 40);
  CHECK(side.at("ground_truth").at("ap_alpha") == 2.0);
  CHECK_THROWS_AS(sim_config_from_json(R"({"mode":"sometimes"})"), Error);
}
