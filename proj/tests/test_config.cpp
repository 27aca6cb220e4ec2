// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "ilac/config.hpp"
#include "support.hpp"

using namespace ilac;
using ilac::test::scenario_path;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string table1_text() { return read_file(scenario_path("table1.cfg")); }

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("full-scale scenario parses to the deployment") {
  ScenarioConfig c = parse_scenario(scenario_path("table1.cfg"));
  Scenario sc = c.build_scenario();
  CHECK(sc.n_bs() == 16);
  CHECK(sc.n_ris() == 2);
  CHECK(sc.n_ue() == 2);
  CHECK(sc.ris[0].layout.size() == 3200);
  CHECK(sc.ue[0].layout.size() == 4);
  CHECK(sc.rf.wavelength == doctest::Approx(299792458.0 / 28e9).epsilon(1e-15).scale(0));
  // 5 dB noise figure, -169 dBm/Hz over 120 kHz
  const double s2 = std::pow(10.0, (5.0 - 169.0 - 30.0) / 10.0) * 120e3;
  CHECK(sc.rf.noise_variance == doctest::Approx(s2).epsilon(1e-12).scale(0));
  CHECK(sc.ue[0].power_budget == doctest::Approx(0.5e-3).epsilon(1e-15).scale(0));
  CHECK(sc.ue[1].kappa == std::vector<double>{50.0, 50.0});
  CHECK(sc.bs.position == Vec3(60, 15, 2));
  FrameTiming t = c.timing();
  CHECK(t.symbols_per_coherence() == 120);
  PipelineOptions opt = c.pipeline(3);
  CHECK(opt.ris.workers == 3);
  CHECK(opt.prior_cov(0, 0) == 2.0);
  CHECK(opt.prior_cov(2, 2) == 0.0);
  CHECK(opt.step_cov(1, 1) == doctest::Approx(1e-6).epsilon(1e-12).scale(0));
}

TEST_CASE("reduced scenario differs only in RIS size and ensembles") {
  Scenario a = parse_scenario(scenario_path("table1.cfg")).build_scenario();
  Scenario b = parse_scenario(scenario_path("reduced.cfg")).build_scenario();
  CHECK(b.ris[0].layout.size() == 128);
  CHECK(a.rf.noise_variance == b.rf.noise_variance);
  CHECK(a.rf.pathloss_alpha == b.rf.pathloss_alpha);
  CHECK(a.ue[1].pose.position == b.ue[1].pose.position);
}

TEST_CASE("effective config round trips byte for byte") {
  for (const char* name : {"table1.cfg", "reduced.cfg"}) {
    ScenarioConfig c = parse_scenario(scenario_path(name));
    std::string once = effective_config(c);
    std::string twice = effective_config(parse_scenario_text(once));
    CHECK(once == twice);
  }
}

TEST_CASE("configuration errors name the offending key") {
  const std::string base = table1_text();
  SUBCASE("unknown key") {
    std::string e = error_of(replace_once(base, "  tx_gain:", "  tx_gian: 1.0\n  tx_gain:"));
    CHECK(e.find("rf.tx_gian") != std::string::npos);
    CHECK(e.find("unknown key") != std::string::npos);
  }
  SUBCASE("missing required key") {
    std::string e = error_of(replace_once(base, "  pathloss_alpha: 2.6\n", ""));
    CHECK(e.find("rf.pathloss_alpha") != std::string::npos);
    CHECK(e.find("missing") != std::string::npos);
  }
  SUBCASE("missing section") {
    std::string e = error_of(replace_once(base, "timing:", "timingx:"));
    CHECK(e.find("timing") != std::string::npos);
  }
  SUBCASE("orientation outside SO(3)") {
    std::string e = error_of(replace_once(
        base, "orientation: [[0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 0.0]]",
        "orientation: [[0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]"));
    CHECK(e.find("bs.orientation: not a rotation matrix") != std::string::npos);
  }
  SUBCASE("kappa count must match the RIS count") {
    std::string e = error_of(replace_once(base, "kappa: [50.0, 50.0]", "kappa: [50.0]"));
    CHECK(e.find("ue[0].kappa") != std::string::npos);
  }
  SUBCASE("odd phase-1 pilot counts") {
    std::string e = error_of(replace_once(base, "mobility_pilots: 20", "mobility_pilots: 21"));
    CHECK(e.find("even") != std::string::npos);
  }
  SUBCASE("bad value type") {
    std::string e = error_of(replace_once(base, "total_w: 1.0e-3", "total_w: lots"));
    CHECK(e.find("power.total_w") != std::string::npos);
  }
  SUBCASE("empty file lists the required keys") {
    std::string e = error_of("");
    CHECK(e.find("uncertainty") != std::string::npos);
  }
  SUBCASE("unsupported schema version") {
    std::string e = error_of(replace_once(base, "schema_version: 1", "schema_version: 2"));
    CHECK(e.find("schema_version") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("/nonexistent/x.cfg"), ConfigError);
}
