// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "adiatrack/harness.hpp"
#include "adiatrack/verify.hpp"

using namespace adiatrack;
using io::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = ADIATRACK_SOURCE_DIR;

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

int failures = 0;

void report(int id, bool pass, double seconds, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  (%.2f s)  %s\n", id, pass ? "PASS" : "FAIL", seconds,
              detail.c_str());
  std::fflush(stdout);
}

bool props_clean(const verify::SuiteReport& r, std::initializer_list<const char*> names,
                 std::string& detail) {
  bool ok = true;
  std::ostringstream os;
  for (const char* n : names) {
    const auto& p = r.property(n);
    os << n << "=" << p.violations << "/" << p.cases << " ";
    ok = ok && p.cases > 0 && p.violations == 0;
  }
  detail = os.str();
  return ok;
}

harness::ExperimentConfig load(const char* name) {
  return harness::ExperimentConfig::from_json(io::read_json(kSource / "configs" / name));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int main() {
  const json fixture = io::read_json(kSource / "tests" / "fixtures" / "tracking_reference.json");
  std::string detail;

  {
    Clock c;
    const auto r = verify::run_suite("prop1");
    const bool ok = props_clean(r, {"1a_second_eigenvalue", "1b_submultiplicative",
                                    "1c_contraction", "1d_formulas_agree",
                                    "1e_stationary_perturbation"},
                                detail);
    report(1, ok && c.seconds() < 30.0, c.seconds(), detail);
  }

  {
    Clock c;
    const auto r = verify::run_suite("thm1");
    const double t = c.seconds();
    const bool ok2 = props_clean(r, {"1a_dominance_ref_final", "1a_dominance_ref_first",
                                     "1c_dominance"},
                                 detail);
    report(2, ok2 && t < 120.0, t, detail);
    const bool ok3 = props_clean(r, {"1b_gap_decreasing", "1b_below_1c_bound"}, detail);
    report(3, ok3 && t < 60.0, t, detail);
  }

  {
    Clock c;
    const auto lip = verify::run_suite("lipschitz");
    const auto res = verify::run_suite("restart");
    std::string d1, d2;
    const bool ok = props_clean(lip, {"rlem_a_reward", "rlem_b_q"}, d1) &&
                    props_clean(res, {"restart_identity", "restart_rho"}, d2);
    report(4, ok && c.seconds() < 60.0, c.seconds(), d1 + d2);
  }

  verify::SuiteReport lemmas;
  double lemmas_seconds = 0.0;
  {
    Clock c;
    lemmas = verify::run_suite("lemmas");
    lemmas_seconds = c.seconds();
    const bool ok = props_clean(lemmas, {"contraction_f", "contraction_g"}, detail);
    report(5, ok, lemmas_seconds, detail);
    const bool ok6 = props_clean(lemmas, {"alpha_sum", "zcomp_identity", "zcomp_inequality",
                                          "zbound_corrected", "prodbound_split",
                                          "prodbound_power_law", "atoa_identity",
                                          "atoa_growth_cap"},
                                 detail);
    report(6, ok6, lemmas_seconds, detail);
  }

  {
    Clock c;
    const auto r = verify::run_suite("mixing");
    const bool ok = props_clean(r, {"lem7_interpolation", "lem7_constant"}, detail);
    report(7, ok && c.seconds() < 60.0, c.seconds(), detail);
  }

  {
    Clock c;
    AhCoverageConfig cfg;  // delta 0.05, tau 4, T 1000, 500 replications
    const auto r = ah_coverage_check(cfg);
    const auto suite = verify::run_suite("coverage");
    const bool ok = r.replications == 500 && r.fraction <= r.threshold && suite.pass();
    report(8, ok, c.seconds(),
           "violation fraction " + fmt("%.4f", r.fraction) + " <= " + fmt("%.4f", r.threshold));
  }

  // Tracking runs shared by criteria 9 to 12.
  Clock track_clock;
  const auto static_cfg = load("static_td.json");
  const auto adia_cfg = load("adiabatic_td.json");
  const auto dia_cfg = load("diabatic_td.json");
  const auto q_cfg = load("static_q.json");
  const auto st = harness::run_track(static_cfg);
  const auto ad = harness::run_track(adia_cfg);
  const auto di = harness::run_track(dia_cfg);
  const auto q = harness::run_track(q_cfg);
  const double track_seconds = track_clock.seconds();

  {
    std::size_t runs = 0;
    std::size_t outside = 0;
    for (const auto* res : {&st, &ad, &di, &q}) {
      for (const auto& tr : res->traces) {
        ++runs;
        if (!check_boundedness(tr).check.pass) ++outside;
      }
    }
    const auto& ball = lemmas.property("lem_bound_ball");
    outside += ball.violations;
    runs += ball.cases;
    report(9, outside == 0, track_seconds,
           std::to_string(outside) + " of " + std::to_string(runs) + " runs left the ball");
  }

  {
    const auto slope = harness::estimate_slope(st.summary, 1000, 100000);
    const double final_med = st.summary.back().median;
    const double q_final = q.summary.back().median;
    const double q_threshold = 3.0 * fixture.at("q_static").at("final_median").get<double>();
    const bool ok = slope.slope <= -0.2 && final_med < 0.05 && q_final < q_threshold;
    report(10, ok, track_seconds,
           "slope " + fmt("%.4f", slope.slope) + ", final median " + fmt("%.5f", final_med) +
               ", q final median " + fmt("%.5f", q_final) + " < " + fmt("%.5f", q_threshold));
  }

  {
    const auto ad_final = ad.summary.back().median;
    const auto di_final = di.summary.back().median;
    const double ad_first = harness::window_mean(ad.summary, 1000, 10000);
    const double ad_last = harness::window_mean(ad.summary, 10000, 100000);
    const double di_last = harness::window_mean(di.summary, 10000, 100000);
    const double ratio = di_last / ad_last;
    const bool ok = ad_final < di_final && ad_last < ad_first && ratio >= 2.0;
    report(11, ok, track_seconds,
           "final " + fmt("%.5f", ad_final) + " < " + fmt("%.5f", di_final) + ", adiabatic decades " +
               fmt("%.5f", ad_first) + " -> " + fmt("%.5f", ad_last) + ", ratio " +
               fmt("%.2f", ratio));
  }

  {
    Clock c;
    const fs::path root = fs::temp_directory_path() / "adiatrack_acceptance";
    fs::remove_all(root);
    std::size_t files = 0;
    std::size_t mismatched = 0;
    for (const auto* cfg : {&static_cfg, &adia_cfg, &dia_cfg}) {
      const fs::path a = root / "a" / cfg->hash();
      const fs::path b = root / "b" / cfg->hash();
      harness::cmd_track(*cfg, a, 0);
      harness::cmd_track(*cfg, b, 1);
      for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        ++files;
        if (slurp(e.path()) != slurp(b / e.path().filename())) ++mismatched;
      }
    }
    fs::remove_all(root);
    report(12, files > 0 && mismatched == 0, c.seconds(),
           std::to_string(files) + " CSVs compared, " + std::to_string(mismatched) + " differ");
  }

  std::printf("%s\n", failures == 0 ? "all criteria PASS" : "some criteria FAIL");
  return failures == 0 ? 0 : 1;
}
