#include <doctest.h>

#include <charconv>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sradiag/error.hpp"
#include "sradiag/formats.hpp"
#include "sradiag/units.hpp"

using namespace sradiag;

TEST_CASE("numbers print in shortest round-trip form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-3) == "0.001");
  CHECK(format_number(2e10) == "2e+10");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  for (double v : {1.0 / 3.0, 6.02214076e23, 4.9e-324}) {
    const auto s = format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("SRA CSV round trip") {
  const auto c = build_sra(oracle::exponential_samples(0.7, 300, 4));
  const auto csv = sra_to_csv(c);
  CHECK(csv.rfind("n,x\n1,", 0) == 0);
  CHECK(sra_from_csv(csv) == c);

  std::string crlf;
  for (char ch : csv) {
    if (ch == '\n') crlf += '\r';
    crlf += ch;
  }
  CHECK(sra_from_csv(crlf) == c);
}

TEST_CASE("malformed CSV") {
  CHECK_THROWS_AS(sra_from_csv("rank,x\n1,2\n"), ParseError);
  CHECK_THROWS_AS(sra_from_csv(""), ParseError);
  CHECK_THROWS_AS(sra_from_csv("n,x\n2,5\n"), ParseError);
  CHECK_THROWS_AS(sra_from_csv("n,x\n1,5,6\n"), ParseError);
  try {
    sra_from_csv("n,x\n1,5\n2,abc\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() == 10);
  }
  CHECK_THROWS_AS(relative_from_csv("baseline,delta\n1,\n"), ParseError);
}

TEST_CASE("relative CSV round trip") {
  const auto a = build_sra(oracle::exponential_samples(1.0, 400, 1));
  const auto b = build_sra(oracle::exponential_samples(1.5, 250, 2));
  const auto rel = relative_sra(a, b, 1000);
  const auto csv = relative_to_csv(rel);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1001);
  const auto back = relative_from_csv(csv);
  REQUIRE(back.points.size() == rel.points.size());
  for (std::size_t k = 0; k < rel.points.size(); ++k) {
    CHECK(back.points[k].baseline == rel.points[k].baseline);
    CHECK(back.points[k].delta == rel.points[k].delta);
  }
}

TEST_CASE("overlay CSVs") {
  const SRACurve c({9, 4, 2});
  CHECK(sra_overlay_csv(c, std::vector<double>{INFINITY, 4.5, 2.5}) ==
        "n,x,model\n1,9,inf\n2,4,4.5\n3,2,2.5\n");
  CHECK_THROWS_AS(sra_overlay_csv(c, std::vector<double>{1, 2}), Error);

  HistogramDensity h;
  h.binning = Binning::linear;
  h.bin_edges = {0, 1, 2, 3};
  h.densities = {0.5, 0.0, 0.25};
  h.counts = {2, 0, 1};
  h.total_count = 3;
  const auto csv = density_overlay_csv(h, {PowerLawParams{1, 2, 1}, 1.0});
  // Empty bins are skipped; t = 0.5 is below x_min.
  CHECK(csv == "t,density,model\n0.5,0.5,nan\n2.5,0.25,0.16\n");
}

TEST_CASE("model and fit JSON round trip") {
  for (const NoiseModel& m : {NoiseModel{PoissonParams{1e-3}, 1.5},
                              NoiseModel{PowerLawParams{2.5, 1.2, 50}, 0.75},
                              NoiseModel{SaturatingParams{3e-4, 2e-3}, 1.0}}) {
    CHECK(model_from_json(model_to_json(m)) == m);
  }

  FitResult fit;
  fit.model = {PowerLawParams{0.2, 1.21, 40}, 1.1};
  fit.residual_rms_log = 0.031;
  fit.max_rel_dev = 0.4;
  fit.applicability = {40, 24000, true, 24000};
  fit.n_points_used = 9999;
  const auto j = fit_to_json(fit);
  for (const char* key : {"\"model\"", "\"params\"", "\"scale\"", "\"residual_rms_log\"",
                          "\"max_rel_dev\"", "\"t_lo_ns\"", "\"t_hi_ns\"", "\"break_detected\"",
                          "\"break_point_ns\"", "\"n_points_used\""}) {
    CHECK(j.find(key) != std::string::npos);
  }
  const auto back = fit_from_json(j);
  CHECK(back.model == fit.model);
  CHECK(back.residual_rms_log == fit.residual_rms_log);
  CHECK(back.applicability.break_point == fit.applicability.break_point);
  CHECK(back.n_points_used == 9999);

  fit.applicability = {40, 90000, false, std::nullopt};
  CHECK_FALSE(fit_from_json(fit_to_json(fit)).applicability.break_point.has_value());

  CHECK_THROWS_AS(model_from_json(R"({"model":"poisson"})"), ParseError);
  CHECK_THROWS_AS(model_from_json("not json"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"model":"gaussian","params":{}})"), Error);
}

TEST_CASE("report JSON lines round trip") {
  DiagnosticReport r;
  r.relative.points = {{10, 1}, {5, -0.5}, {1, 0}};
  r.relative.baseline_label = "base.bin";
  r.relative.probe_label = "probe.bin";
  r.distance = 0.1;
  r.threshold = 0.3;
  r.verdict = Verdict::stable;
  r.window_span = {100, 90000};
  r.baseline_id = "lab-A";
  const auto line = report_to_json_line(r);
  CHECK(line.find('\n') == std::string::npos);

  auto r2 = r;
  r2.verdict = Verdict::drift;
  r2.distance = 0.9;
  const std::vector<DiagnosticReport> both{r, r2};
  const auto back = reports_from_jsonl(reports_to_jsonl(both));
  REQUIRE(back.size() == 2);
  CHECK(back[0].baseline_id == "lab-A");
  CHECK(back[0].window_span == r.window_span);
  CHECK(back[1].verdict == Verdict::drift);
  CHECK(back[1].distance == 0.9);
  CHECK(back[0].relative.points.size() == 3);
  CHECK(back[0].relative.points[1].delta == -0.5);
  CHECK(back[0].relative.probe_label == "probe.bin");

  CHECK_THROWS_AS(report_from_json_line(R"({"verdict":"maybe"})"), ParseError);
}

TEST_CASE("duration units") {
  CHECK(parse_duration_ns("250") == 250);
  CHECK(parse_duration_ns("250ns") == 250);
  CHECK(parse_duration_ns("2.4us") == doctest::Approx(2400));
  CHECK(parse_duration_ns("3ms") == 3e6);
  CHECK(parse_duration_ns("0.1s") == doctest::Approx(1e8));
  CHECK(parse_duration_ns("1e8ns") == 1e8);
  for (const char* bad : {"", "us", "5 parsecs", "-3us", "1.2.3ns"}) {
    CHECK_THROWS_AS(parse_duration_ns(bad), Error);
  }
}
