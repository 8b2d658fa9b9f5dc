#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adiatrack/io.hpp"

namespace adiatrack::harness {

using io::json;

enum class Learner { td0, q };

/// Everything that determines the bytes of a tracking run. The output
/// directory and thread count are deliberately not part of it.
struct ExperimentConfig {
  json schedule;  // normalized schedule JSON
  RewardSpec reward;
  LearningRate rate;
  NoiseModel noise;
  Step t_max = 100'000;
  int checkpoints_per_decade = 20;
  std::vector<std::uint64_t> seeds;
  Learner learner = Learner::td0;
  std::size_t n_actions = 1;
  Bootstrap bootstrap = Bootstrap::sampled;
  State x0 = 0;

  static ExperimentConfig from_json(const json& j);
  json to_json() const;
  std::string hash() const { return io::config_hash(to_json()); }
  Schedule build_schedule() const { return io::schedule_from_json(schedule); }
  ExponentTriple exponents() const;
  std::vector<Step> grid() const { return log_checkpoint_grid(t_max, checkpoints_per_decade); }
};

struct QuantileRow {
  Step t = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

/// Per-checkpoint quantiles across runs sharing one grid.
std::vector<QuantileRow> summarize(std::span<const TrackingTrace> traces);

struct SlopeEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  Step t_lo = 0;
  Step t_hi = 0;
  std::size_t n_points = 0;
  double residual_rms = 0.0;
};

/// Least squares of log median against log t over checkpoints in [t_lo, t_hi].
/// Rows with a non-positive median are skipped; fewer than two points gives NaN.
SlopeEstimate estimate_slope(std::span<const QuantileRow> rows, Step t_lo, Step t_hi);

/// Mean of the medians at checkpoints in [t_lo, t_hi].
double window_mean(std::span<const QuantileRow> rows, Step t_lo, Step t_hi);

/// thm2_bound with unit D constants and everything else taken from the config.
Thm2Constants default_constants(const ExperimentConfig& config, const Schedule& schedule);

struct TrackResult {
  std::string hash;
  DriftReport drift;
  std::vector<TrackingTrace> traces;  // in seed-list order
  std::vector<QuantileRow> summary;
  SlopeEstimate slope;                // over [t_max/100, t_max]
  json summary_json;
};

/// Gated by verify_drift: throws CertificateViolation before simulating if the
/// declared certificate fails. Seeds run on up to `threads` workers (0 = all cores).
TrackResult run_track(const ExperimentConfig& config, unsigned threads = 0);

/// run_track plus one CSV per seed and summary.json under `out`.
TrackResult cmd_track(const ExperimentConfig& config, const std::filesystem::path& out,
                      unsigned threads = 0);

struct SweepGrid {
  std::vector<double> gamma_p;
  std::vector<double> gamma_alpha;
  std::vector<double> gamma_pi;

  static SweepGrid from_json(const json& j);
};

struct SweepRow {
  ExponentTriple exps;
  std::string kind;
  std::string regime;
  bool same_rate_as_static = false;
  bool conjectured_adiabatic = false;
  std::string status;  // "ok" or "skipped"
  std::string reason;
  std::string hash;
  double final_median = 0.0;
  SlopeEstimate slope;
  double first_decade = 0.0;  // mean median over [t_max/100, t_max/10]
  double last_decade = 0.0;   // mean median over [t_max/10, t_max]
};

/// Cell schedule family: gamma_pi > 0 gives shrinking-state, gamma_p = inf
/// constant, gamma_p >= 1 interpolation and gamma_p in (0,1) cyclic, all built
/// from the base schedule's matrices and constants.
ExperimentConfig cell_config(const ExperimentConfig& base, const ExponentTriple& exps);

/// Runs every cell independently; rows come back sorted by (gamma_p, gamma_alpha, gamma_pi).
/// When `out` is set each cell's traces and summary go to out/<cell hash>/.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, const ExperimentConfig& base,
                                const std::optional<std::filesystem::path>& out,
                                unsigned threads = 0);
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace adiatrack::harness
