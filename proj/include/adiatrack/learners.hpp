#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adiatrack/dp.hpp"
#include "adiatrack/schedules.hpp"

namespace adiatrack {

/// alpha_t = c_alpha / t^gamma_alpha.
struct LearningRate {
  double c_alpha = 0.5;
  double gamma_alpha = 0.6;

  void validate() const;
  double at(Step t) const;
};

enum class NoiseKind { zero, uniform_iid };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

/// Extra martingale-difference noise injected into every update.
struct NoiseModel {
  NoiseKind kind = NoiseKind::zero;
  double eps_max = 0.0;

  void validate() const;
  /// Bound on |eps_t| actually realized by this model.
  double bound() const { return kind == NoiseKind::zero ? 0.0 : eps_max; }
};

/// How F_t R(x) is formed at the visited state.
enum class Bootstrap {
  sampled,   // r(x) + beta R(x_next): TD(0) / Q-learning
  expected,  // r(x) + beta (P(t) R)(x): the generic stochastic-approximation operator
};

struct Checkpoint {
  Step t = 0;
  double sup_error = 0.0;
  double alpha_t = 0.0;
  double pi_min_t = 0.0;
  double drift_t = 0.0;
};

struct TrackingTrace {
  std::vector<Checkpoint> checkpoints;
  std::uint64_t seed = 0;
  std::string config_echo;
  std::vector<double> final_values;

  // Iterate-norm diagnostics against radius (r_max + eps_max) / (1 - beta).
  double ball_radius = 0.0;
  double max_iterate_norm = 0.0;
  std::optional<Step> first_ball_exit;
  std::optional<Step> last_ball_exit;
};

struct TrackOptions {
  State x0 = 0;
  Bootstrap bootstrap = Bootstrap::sampled;
  /// Overrides R_0 = 0; used only to probe re-entry into the bounded ball.
  std::optional<std::vector<double>> initial_values;
  std::string config_echo;
};

/// In-place asynchronous update: values[x] += alpha (f_value - values[x] + eps).
/// Every other component is left untouched.
void sa_update(std::span<double> values, State x, double f_value, double alpha, double eps);

/// Pure form of sa_update.
ValueFunction sa_step(const ValueFunction& r_cur, State x, double f_value, double alpha,
                      double eps);

/// round(10^(k / per_decade)) for k = 0, 1, ... up to t_max, deduplicated, with t_max appended.
std::vector<Step> log_checkpoint_grid(Step t_max, int per_decade = 20);

/// Tabular TD(0) against the moving fixed point R*_t = exact_reward(P(t)).
/// Step t updates the component at x_{t-1} using x_t ~ P(t)(x_{t-1}, .) and alpha_t.
TrackingTrace td0_track(const Schedule& schedule, const RewardSpec& spec,
                        const LearningRate& rate, const NoiseModel& noise, Step t_max,
                        std::uint64_t seed, std::span<const Step> checkpoint_grid,
                        const TrackOptions& options = {});

/// Q-learning on the state-action product chain; pair index s * n_actions + a.
TrackingTrace q_track(const Schedule& schedule, const RewardSpec& spec, std::size_t n_actions,
                      const LearningRate& rate, const NoiseModel& noise, Step t_max,
                      std::uint64_t seed, std::span<const Step> checkpoint_grid,
                      const TrackOptions& options = {});

struct BoundednessResult {
  CheckResult check;
  std::optional<Step> first_violation;
  /// Last step outside the ball; after it the iterates stayed inside.
  std::optional<Step> reentry_after;
};

/// max_t ||R_t|| <= (F_max + eps_max) / (1 - beta) + 1e-9 along the recorded run.
BoundednessResult check_boundedness(const TrackingTrace& trace);

}  // namespace adiatrack
