#include "adiatrack/learners.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "adiatrack/linalg.hpp"
#include "adiatrack/rng.hpp"

namespace adiatrack {

namespace {

constexpr std::uint64_t kNoiseStreamSalt = 0x6a09e667f3bcc908ULL;
constexpr double kBallTol = 1e-9;

class NoiseSource {
 public:
  NoiseSource(const NoiseModel& model, std::uint64_t seed)
      : model_(model), rng_(seed ^ kNoiseStreamSalt) {}

  double draw() {
    if (model_.kind == NoiseKind::zero) return 0.0;
    return rng_.uniform(-model_.eps_max, model_.eps_max);
  }

 private:
  NoiseModel model_;
  RandomStream rng_;
};

/// The part shared by TD(0) and Q-learning. `target` maps (values, matrix,
/// x, x_next) to the bootstrapped operator value; `fixed_point` solves for the
/// current target table.
template <class Target, class FixedPoint>
TrackingTrace run_tracking(const Schedule& schedule, const RewardSpec& spec,
                           const LearningRate& rate, const NoiseModel& noise, Step t_max,
                           std::uint64_t seed, std::span<const Step> grid,
                           const TrackOptions& options, Target&& target,
                           FixedPoint&& fixed_point) {
  spec.validate();
  rate.validate();
  noise.validate();
  const std::size_t n = schedule.n();
  if (spec.r.size() != n) {
    throw InvalidArgument("tracking: reward vector has " + std::to_string(spec.r.size()) +
                          " entries, schedule has " + std::to_string(n) + " states");
  }
  if (options.x0 >= n) throw InvalidArgument("tracking: x0 out of range");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw InvalidArgument("tracking: checkpoint grid must be strictly increasing");
  }

  TrackingTrace trace;
  trace.seed = seed;
  trace.config_echo = options.config_echo;
  trace.ball_radius = (spec.r_max() + noise.bound()) / (1.0 - spec.beta);

  std::vector<double> values(n, 0.0);
  if (options.initial_values) {
    if (options.initial_values->size() != n) {
      throw InvalidArgument("tracking: initial values have the wrong dimension");
    }
    values = *options.initial_values;
  }
  auto note_norm = [&](Step t) {
    const double norm = linalg::sup_norm(values);
    trace.max_iterate_norm = std::max(trace.max_iterate_norm, norm);
    if (norm > trace.ball_radius + kBallTol) {
      if (!trace.first_ball_exit) trace.first_ball_exit = t;
      trace.last_ball_exit = t;
    }
  };
  note_norm(0);

  ChainSampler sampler(options.x0, seed);
  NoiseSource eps_source(noise, seed);
  auto cursor = schedule.cursor();
  auto next_checkpoint = grid.begin();
  while (next_checkpoint != grid.end() && *next_checkpoint == 0) ++next_checkpoint;

  for (Step t = 1; t <= t_max; ++t) {
    const TransitionMatrix& p = cursor.matrix();
    const State x = sampler.state();
    const State x_next = sampler.next(p);
    const double alpha = rate.at(t);
    const double f_value = target(values, p, x, x_next);
#ifndef NDEBUG
    const std::vector<double> before = values;
#endif
    sa_update(values, x, f_value, alpha, eps_source.draw());
#ifndef NDEBUG
    for (std::size_t i = 0; i < n; ++i) assert(i == x || values[i] == before[i]);
#endif
    note_norm(t);

    const bool at_checkpoint = next_checkpoint != grid.end() && *next_checkpoint == t;
    if (!at_checkpoint) {
      cursor.advance();
      continue;
    }
    Checkpoint cp;
    cp.t = t;
    cp.alpha_t = alpha;
    try {
      cp.sup_error = linalg::sup_distance(values, fixed_point(p));
      cp.pi_min_t = stationary_distribution(p, 1e-10).min();
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("tracking: at t=" + std::to_string(t) + ": " + e.what());
    }
    const TransitionMatrix current = p;
    cursor.advance();
    cp.drift_t = matrix_tv_distance(current, cursor.matrix());
    trace.checkpoints.push_back(cp);
    ++next_checkpoint;
  }
  trace.final_values = std::move(values);
  return trace;
}

}  // namespace

void LearningRate::validate() const {
  if (!(c_alpha > 0.0 && c_alpha < 1.0)) throw InvalidArgument("LearningRate: c_alpha must lie in (0,1)");
  if (!(gamma_alpha > 0.0 && gamma_alpha < 1.0)) {
    throw InvalidArgument("LearningRate: gamma_alpha must lie in (0,1)");
  }
}

double LearningRate::at(Step t) const {
  return c_alpha / std::pow(static_cast<double>(t), gamma_alpha);
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::zero ? "zero" : "uniform-iid";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "zero") return NoiseKind::zero;
  if (name == "uniform-iid") return NoiseKind::uniform_iid;
  throw InvalidArgument("unknown noise kind '" + name + "'");
}

void NoiseModel::validate() const {
  if (!(eps_max >= 0.0) || !std::isfinite(eps_max)) {
    throw InvalidArgument("NoiseModel: eps_max must be finite and non-negative");
  }
}

void sa_update(std::span<double> values, State x, double f_value, double alpha, double eps) {
  values[x] += alpha * (f_value - values[x] + eps);
}

ValueFunction sa_step(const ValueFunction& r_cur, State x, double f_value, double alpha,
                      double eps) {
  if (x >= r_cur.values.size()) throw InvalidArgument("sa_step: state out of range");
  ValueFunction out = r_cur;
  sa_update(out.values, x, f_value, alpha, eps);
  return out;
}

std::vector<Step> log_checkpoint_grid(Step t_max, int per_decade) {
  std::vector<Step> grid;
  if (t_max == 0) return grid;
  for (int k = 0;; ++k) {
    const auto t = static_cast<Step>(std::llround(std::pow(10.0, static_cast<double>(k) / per_decade)));
    if (t > t_max) break;
    if (grid.empty() || grid.back() != t) grid.push_back(t);
  }
  if (grid.back() != t_max) grid.push_back(t_max);
  return grid;
}

TrackingTrace td0_track(const Schedule& schedule, const RewardSpec& spec,
                        const LearningRate& rate, const NoiseModel& noise, Step t_max,
                        std::uint64_t seed, std::span<const Step> checkpoint_grid,
                        const TrackOptions& options) {
  const bool expected = options.bootstrap == Bootstrap::expected;
  auto target = [&](const std::vector<double>& v, const TransitionMatrix& p, State x,
                    State x_next) {
    if (!expected) return spec.r[x] + spec.beta * v[x_next];
    double acc = 0.0;
    for (State y = 0; y < p.size(); ++y) acc += p(x, y) * v[y];
    return spec.r[x] + spec.beta * acc;
  };
  auto fixed_point = [&](const TransitionMatrix& p) { return exact_reward(p, spec).values; };
  return run_tracking(schedule, spec, rate, noise, t_max, seed, checkpoint_grid, options,
                      target, fixed_point);
}

TrackingTrace q_track(const Schedule& schedule, const RewardSpec& spec, std::size_t n_actions,
                      const LearningRate& rate, const NoiseModel& noise, Step t_max,
                      std::uint64_t seed, std::span<const Step> checkpoint_grid,
                      const TrackOptions& options) {
  if (n_actions == 0 || schedule.n() % n_actions != 0) {
    throw InvalidArgument("q_track: action count does not divide the product space");
  }
  const bool expected = options.bootstrap == Bootstrap::expected;
  auto best = [&](const std::vector<double>& v, std::size_t s) {
    double m = v[s * n_actions];
    for (std::size_t a = 1; a < n_actions; ++a) m = std::max(m, v[s * n_actions + a]);
    return m;
  };
  auto target = [&](const std::vector<double>& v, const TransitionMatrix& p, State x,
                    State x_next) {
    if (!expected) return spec.r[x] + spec.beta * best(v, x_next / n_actions);
    double acc = 0.0;
    for (State y = 0; y < p.size(); ++y) acc += p(x, y) * best(v, y / n_actions);
    return spec.r[x] + spec.beta * acc;
  };
  auto fixed_point = [&](const TransitionMatrix& p) {
    return exact_q(p, spec, n_actions).values;
  };
  return run_tracking(schedule, spec, rate, noise, t_max, seed, checkpoint_grid, options,
                      target, fixed_point);
}

BoundednessResult check_boundedness(const TrackingTrace& trace) {
  BoundednessResult out;
  out.check.lhs = trace.max_iterate_norm;
  out.check.rhs = trace.ball_radius + kBallTol;
  out.check.pass = !trace.first_ball_exit.has_value();
  out.first_violation = trace.first_ball_exit;
  out.reentry_after = trace.last_ball_exit;
  return out;
}

}  // namespace adiatrack
