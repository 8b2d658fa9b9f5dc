#pragma once

#include <cstddef>
#include <vector>

#include "adiatrack/markov.hpp"

namespace adiatrack {

/// Instantaneous reward per state (or per state-action pair) and discount.
struct RewardSpec {
  std::vector<double> r;
  double beta = 0.9;

  void validate() const;
  double r_max() const;
  /// r_max / (1 - beta), the geometric-series cap on any value function.
  double value_cap() const { return r_max() / (1.0 - beta); }
  RewardSpec with_beta(double b) const { return {r, b}; }
};

struct ValueFunction {
  std::vector<double> values;
};

/// Q(s, a) stored row-major at index s * n_actions + a, the same indexing as the
/// state-action product chain.
struct QFunction {
  std::size_t n_states = 0;
  std::size_t n_actions = 1;
  std::vector<double> values;

  QFunction() = default;
  QFunction(std::size_t states, std::size_t actions, double fill = 0.0)
      : n_states(states), n_actions(actions), values(states * actions, fill) {}

  double operator()(std::size_t s, std::size_t a) const { return values[s * n_actions + a]; }
  double& operator()(std::size_t s, std::size_t a) { return values[s * n_actions + a]; }
  /// max_a Q(s, a), ties to the lowest action index.
  double max_over_actions(std::size_t s) const;
};

struct CheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

/// Solves (I - beta P) R = r directly.
ValueFunction exact_reward(const TransitionMatrix& p, const RewardSpec& spec);

/// r + beta P R.
ValueFunction bellman_f(const TransitionMatrix& p, const RewardSpec& spec,
                        const ValueFunction& r_in);

/// (G Q)(s,a) = r(s,a) + beta sum_{(s',a')} P[(s,a),(s',a')] max_b Q(s', b).
QFunction bellman_g(const TransitionMatrix& p, const RewardSpec& spec, std::size_t n_actions,
                    const QFunction& q_in);

/// Value iteration from Q = 0 until ||GQ - Q|| <= (1 - beta) tol, so the result
/// is within tol of the fixed point.
QFunction exact_q(const TransitionMatrix& p, const RewardSpec& spec, std::size_t n_actions,
                  double tol = 1e-10, std::size_t max_iterations = 10'000'000);

/// sup |R(P) - R(Q)| against beta r_max / (1 - beta)^2 * ||P - Q||.
CheckResult check_lipschitz_reward(const TransitionMatrix& p, const TransitionMatrix& q,
                                   const RewardSpec& spec);
CheckResult check_lipschitz_q(const TransitionMatrix& p, const TransitionMatrix& q,
                              const RewardSpec& spec, std::size_t n_actions);

struct RestartCheck {
  /// |R(x_r; P~, beta_hat) - (1-beta)/(1-beta_hat) R(x_r; P, beta)| against 1e-8.
  CheckResult identity;
  /// rho(P~) against beta / beta_hat + 1e-12.
  CheckResult rho;
  bool pass() const { return identity.pass && rho.pass; }
};

/// The identity is evaluated at the restart state, where it holds exactly.
RestartCheck check_restart_identity(const TransitionMatrix& p, const RewardSpec& spec,
                                    double beta_hat, State x_restart);

/// Lipschitz constant of the fixed point in P used by the tracking bounds.
inline double reward_lipschitz_constant(const RewardSpec& spec) {
  return spec.beta * spec.r_max() / ((1.0 - spec.beta) * (1.0 - spec.beta));
}

}  // namespace adiatrack
