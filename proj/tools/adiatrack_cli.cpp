// Command-line front end: track, sweep, verify, bound.
// Exit codes: 0 pass, 1 property violation, 2 configuration error.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "adiatrack/harness.hpp"
#include "adiatrack/verify.hpp"

namespace {

using adiatrack::io::json;
namespace harness = adiatrack::harness;
namespace io = adiatrack::io;

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;

int run_track(const std::string& config_path, const std::string& out, unsigned threads) {
  const auto config = harness::ExperimentConfig::from_json(io::read_json(config_path));
  const auto result = harness::cmd_track(config, out, threads);
  const auto& s = result.summary_json;
  std::cout << "config " << result.hash << ": " << result.traces.size() << " seeds, final median "
            << s["final_median"] << ", slope " << s["slope"]["slope"] << ", regime "
            << s["regime"].get<std::string>() << "\n";
  return s["boundedness"]["inside"].get<bool>() ? kPass : kViolation;
}

int run_sweep(const std::string& grid_path, const std::string& config_path,
              const std::string& out, unsigned threads) {
  const auto grid = harness::SweepGrid::from_json(io::read_json(grid_path));
  const auto base = harness::ExperimentConfig::from_json(io::read_json(config_path));
  const auto rows = harness::run_sweep(grid, base, std::filesystem::path(out), threads);
  const std::string table = harness::sweep_csv(rows);
  io::write_text(std::filesystem::path(out) / "sweep.csv", table);
  std::cout << table;
  return kPass;
}

int run_verify(const std::string& suite, std::uint64_t master_seed, double sabotage,
               const std::string& report_path) {
  adiatrack::verify::VerifyOptions options;
  options.master_seed = master_seed;
  options.rho_sabotage = sabotage;
  const auto report = adiatrack::verify::run_suite(suite, options);
  const std::string text = report.to_json().dump(2) + "\n";
  if (!report_path.empty()) io::write_text(report_path, text);
  std::cout << text;
  return report.pass() ? kPass : kViolation;
}

int run_bound(const std::string& constants_path, const std::string& gamma_p, double gamma_alpha,
              double gamma_pi, std::uint64_t horizon) {
  const json constants = constants_path.empty() ? json() : io::read_json(constants_path);
  adiatrack::ExponentTriple exps;
  exps.gamma_p = gamma_p == "inf" ? adiatrack::kInfiniteExponent : std::stod(gamma_p);
  exps.gamma_alpha = gamma_alpha;
  exps.gamma_pi = gamma_pi;
  const auto report = adiatrack::thm2_bound(io::constants_from_json(constants), exps, horizon);
  std::cout << io::to_json(report).dump(2) << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tracking experiments and bound checks for TD(0) and Q-learning under drift"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads for per-seed runs (0 = all cores)");

  std::string config_path, out_dir, grid_path;
  auto* track = app.add_subcommand("track", "Run every seed of one experiment config");
  track->add_option("--config", config_path, "Experiment config JSON")->required();
  track->add_option("--out", out_dir, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Run a grid of exponent triples over a base config");
  sweep->add_option("--grid", grid_path, "Grid JSON with gamma_p, gamma_alpha, gamma_pi lists")
      ->required();
  sweep->add_option("--config", config_path, "Base experiment config JSON")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();

  std::string suite, report_path;
  std::uint64_t master_seed = adiatrack::verify::VerifyOptions{}.master_seed;
  double sabotage = 1.0;
  auto* verify = app.add_subcommand("verify", "Run a randomized property suite");
  verify->add_option("--suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(adiatrack::verify::suite_names()));
  verify->add_option("--master-seed", master_seed, "Master seed");
  verify->add_option("--report", report_path, "Also write the JSON report here");
  verify->add_option("--sabotage-rho", sabotage, "Scale rho in right-hand sides (harness self-test)");

  std::string constants_path, gamma_p = "inf";
  double gamma_alpha = 0.6, gamma_pi = 0.0;
  std::uint64_t horizon = 100'000;
  auto* bound = app.add_subcommand("bound", "Evaluate the tracking bound terms");
  bound->add_option("--constants", constants_path, "Constants JSON (missing fields use defaults)");
  bound->add_option("--gamma-p", gamma_p, "Drift exponent, or inf");
  bound->add_option("--gamma-alpha", gamma_alpha, "Learning-rate exponent");
  bound->add_option("--gamma-pi", gamma_pi, "Stationary-floor exponent");
  bound->add_option("--T", horizon, "Horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*track) return run_track(config_path, out_dir, threads);
    if (*sweep) return run_sweep(grid_path, config_path, out_dir, threads);
    if (*verify) return run_verify(suite, master_seed, sabotage, report_path);
    if (*bound) return run_bound(constants_path, gamma_p, gamma_alpha, gamma_pi, horizon);
  } catch (const adiatrack::CertificateViolation& e) {
    std::cerr << "error: schedule certificate failed: " << e.what() << "\n";
    return kConfigError;
  } catch (const adiatrack::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
