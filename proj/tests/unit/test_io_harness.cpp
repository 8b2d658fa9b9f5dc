#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adiatrack/harness.hpp"
#include "adiatrack/io.hpp"

using namespace adiatrack;
using io::json;
namespace fs = std::filesystem;

namespace {

const TransitionMatrix kA({{0.9, 0.1}, {0.2, 0.8}});
const TransitionMatrix kB({{0.3, 0.7}, {0.6, 0.4}});

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("adiatrack_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

json small_config(double c_p, const std::string& gamma_p, const std::string& kind) {
  json sched = {{"kind", kind},
                {"params", {{"c_p", c_p}, {"gamma_p", 0.0}, {"c_pi", 0.3}, {"gamma_pi", 0.0}}}};
  if (gamma_p == "inf") {
    sched["params"]["gamma_p"] = "inf";
  } else {
    sched["params"]["gamma_p"] = std::stod(gamma_p);
  }
  if (kind == "constant") sched["mats"] = json::array({io::to_json(kA)});
  if (kind == "interpolation") {
    sched["p_start"] = io::to_json(kA);
    sched["p_end"] = io::to_json(kB);
  }
  if (kind == "cyclic") sched["mats"] = json::array({io::to_json(kA), io::to_json(kB)});
  return {{"schedule", sched},
          {"reward", {{"r", {1.0, 0.0}}, {"beta", 0.5}}},
          {"rate", {{"c_alpha", 0.5}, {"gamma_alpha", 0.6}}},
          {"noise", {{"kind", "zero"}, {"eps_max", 0.0}}},
          {"t_max", 2000},
          {"seeds", {{"first", 10}, {"count", 4}}},
          {"learner", "td0"}};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("matrix json and csv") {
  const auto j = io::to_json(kA);
  CHECK(io::matrix_from_json(j) == kA);
  CHECK(io::matrix_from_json(json::parse("[[0.9,0.1],[0.2,0.8]]")) == kA);
  CHECK(io::parse_matrix_csv("0.9,0.1\r\n0.2,0.8\n\n") == kA);
  CHECK_THROWS_AS(io::parse_matrix_csv("0.9,x\n0.2,0.8\n"), InvalidArgument);
  CHECK_THROWS_AS(io::matrix_from_json(json::parse(R"({"n":3,"rows":[[1]]})")), InvalidArgument);
}

TEST_CASE("exponent sentinel") {
  CHECK(std::isinf(io::exponent_from_json("inf")));
  CHECK(io::exponent_to_json(kInfiniteExponent) == "inf");
  CHECK(io::exponent_from_json(0.7) == 0.7);
  CHECK_THROWS_AS(io::exponent_from_json("infinity"), InvalidArgument);
}

TEST_CASE("schedule round trip through json") {
  DriftParams p;
  p.c_p = 0.05;
  p.gamma_p = 0.5;
  p.c_pi = 0.2;
  DriftParams shrink = p;
  shrink.c_p = 1.0;
  shrink.gamma_p = 1.5;
  shrink.gamma_pi = 0.5;
  DriftParams slow = p;
  slow.gamma_p = 1.0;
  const std::vector<Schedule> all{
      Schedule::constant(kA, DriftParams{}),
      Schedule::interpolation(kA, kB, slow),
      Schedule::cyclic({kA, kB}, p),
      Schedule::shrinking_state(shrink, 500),
      Schedule::restart_wrapped(Schedule::cyclic({kA, kB}, p), 0.5, 0.8, 1, p),
  };
  for (const auto& s : all) {
    const auto j = io::to_json(s);
    const auto back = io::schedule_from_json(json::parse(j.dump()));
    CHECK(back.kind() == s.kind());
    CHECK(io::to_json(back) == j);
    for (Step t : {1, 2, 17, 400}) CHECK(back.matrix_at(t) == s.matrix_at(t));
  }
  json wrong_n = io::to_json(all[1]);
  wrong_n["n"] = 3;
  CHECK_THROWS_AS(io::schedule_from_json(wrong_n), InvalidArgument);
  CHECK_THROWS_AS(io::schedule_from_json(json{{"kind", "spiral"}}), InvalidArgument);
}

TEST_CASE("config hash is canonical") {
  const json a = json::parse(R"({"b": 1, "a": [1, 2]})");
  const json b = json::parse(R"({"a": [1, 2], "b": 1})");
  CHECK(io::config_hash(a) == io::config_hash(b));
  CHECK(io::config_hash(a).size() == 16);
  CHECK(io::config_hash(a) != io::config_hash(json::parse(R"({"a": [1, 2], "b": 2})")));
}

TEST_CASE("format_double round trips") {
  for (double v : {0.3, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e-7, 0.0}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.3) == "0.3");
}

TEST_CASE("trace csv layout") {
  TrackingTrace t;
  t.checkpoints.push_back({1, 0.5, 0.5, 0.3, 0.0});
  t.checkpoints.push_back({2, 0.25, 0.33, 0.3, 0.01});
  const auto csv = io::trace_csv(t);
  CHECK(csv.rfind("t,sup_error,alpha_t,pi_min_t,drift_t\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("thm2 report json") {
  const auto r = thm2_bound(Thm2Constants{}, ExponentTriple{1.0, 0.5, 0.0}, 1000);
  const auto j = io::to_json(r);
  CHECK(j.at("spec_version") == io::kSpecVersion);
  CHECK(j.at("regime") == "adiabatic");
  const auto c = io::constants_from_json(io::to_json(Thm2Constants{}));
  CHECK(c.rho == Thm2Constants{}.rho);
}

}

TEST_SUITE("harness") {

TEST_CASE("quantiles and slope") {
  CHECK(harness::quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(harness::quantile({5}, 0.25) == 5.0);
  CHECK(harness::quantile({1, 2, 3, 4, 5}, 0.25) == doctest::Approx(2.0));

  std::vector<harness::QuantileRow> rows;
  for (Step t : log_checkpoint_grid(100000)) {
    rows.push_back({t, 3.0 * std::pow(static_cast<double>(t), -0.3), 0, 0});
  }
  const auto s = harness::estimate_slope(rows, 1000, 100000);
  CHECK(s.slope == doctest::Approx(-0.3).epsilon(1e-9));
  CHECK(s.n_points == 41);
  CHECK(std::isnan(harness::estimate_slope(rows, 5, 5).slope));
  CHECK(harness::window_mean(rows, 1, 1) == doctest::Approx(3.0));
}

TEST_CASE("config parsing and hashing") {
  const auto cfg = harness::ExperimentConfig::from_json(small_config(0.04, "1.0", "interpolation"));
  CHECK(cfg.seeds == std::vector<std::uint64_t>{10, 11, 12, 13});
  CHECK(cfg.hash() == harness::ExperimentConfig::from_json(cfg.to_json()).hash());
  auto other = small_config(0.04, "1.0", "interpolation");
  other["seeds"] = {10, 11, 12};
  CHECK(harness::ExperimentConfig::from_json(other).hash() != cfg.hash());
  auto bad = small_config(0.04, "1.0", "interpolation");
  bad["learner"] = "sarsa";
  CHECK_THROWS(harness::ExperimentConfig::from_json(bad));
}

TEST_CASE("zero-reward run has zero medians") {
  auto j = small_config(1.0, "inf", "constant");
  j["reward"]["r"] = {0.0, 0.0};
  const auto res = harness::run_track(harness::ExperimentConfig::from_json(j), 2);
  for (const auto& row : res.summary) CHECK(row.median == 0.0);
  CHECK(res.summary_json.at("spec_version") == io::kSpecVersion);
}

TEST_CASE("invalid certificate aborts before simulation") {
  // Wrapper declares a C_P below the realized drift.
  auto j = small_config(0.04, "1.0", "interpolation");
  json inner = j["schedule"];
  j["schedule"] = {{"kind", "restart-wrapped"},
                   {"inner", inner},
                   {"beta", 0.5},
                   {"beta_hat", 0.8},
                   {"x_restart", 0},
                   {"params", {{"c_p", 0.001}, {"gamma_p", 1.0}, {"c_pi", 0.1}, {"gamma_pi", 0.0}}}};
  CHECK_THROWS_AS(harness::run_track(harness::ExperimentConfig::from_json(j), 1),
                  CertificateViolation);
}

TEST_CASE("track output is byte-identical across reruns and thread counts") {
  const auto cfg = harness::ExperimentConfig::from_json(small_config(0.04, "0.3", "cyclic"));
  const auto d1 = scratch("det1");
  const auto d2 = scratch("det2");
  harness::cmd_track(cfg, d1, 1);
  harness::cmd_track(cfg, d2, 4);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    ++files;
    CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
  }
  CHECK(files == cfg.seeds.size() + 1);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("cell schedule family") {
  const auto base = harness::ExperimentConfig::from_json(small_config(0.04, "1.0", "interpolation"));
  CHECK(harness::cell_config(base, {kInfiniteExponent, 0.6, 0.0}).schedule.at("kind") == "constant");
  CHECK(harness::cell_config(base, {1.0, 0.6, 0.0}).schedule.at("kind") == "interpolation");
  CHECK(harness::cell_config(base, {0.3, 0.6, 0.0}).schedule.at("kind") == "cyclic");
  // The base C_P is too small for the shrinking-state drift and the reward has
  // two entries against three states; either way the cell is refused.
  CHECK_THROWS(harness::cell_config(base, {1.5, 0.4, 0.1}));
}

TEST_CASE("single-cell sweep equals track") {
  const auto base = harness::ExperimentConfig::from_json(small_config(0.04, "1.0", "interpolation"));
  harness::SweepGrid grid{{1.0}, {0.6}, {0.0}};
  const auto rows = harness::run_sweep(grid, base, std::nullopt, 2);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "ok");
  const auto cell = harness::cell_config(base, rows[0].exps);
  const auto track = harness::run_track(cell, 2);
  CHECK(rows[0].hash == track.hash);
  CHECK(rows[0].final_median == track.summary.back().median);
  CHECK(rows[0].slope.slope == track.slope.slope);
}

TEST_CASE("sweep ordering and skipped cells") {
  const auto base = harness::ExperimentConfig::from_json(small_config(0.04, "1.0", "interpolation"));
  harness::SweepGrid grid{{1.0, 0.3}, {0.6, 0.95}, {0.0}};
  const auto rows = harness::run_sweep(grid, base, std::nullopt, 2);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].exps.gamma_p == 0.3);
  CHECK(rows[3].exps.gamma_p == 1.0);
  for (const auto& r : rows) {
    if (r.exps.gamma_alpha == 0.95) CHECK(r.status == "ok");
  }
  const auto csv = harness::sweep_csv(rows);
  CHECK(csv.rfind("gamma_p,gamma_alpha,gamma_pi,kind,regime", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  harness::SweepGrid bad{{1.0}, {0.6}, {0.5}};  // 1 - gamma_alpha - gamma_pi < 0
  const auto skipped = harness::run_sweep(bad, base, std::nullopt, 1);
  CHECK(skipped[0].status == "skipped");
  CHECK_FALSE(skipped[0].reason.empty());
}

}
