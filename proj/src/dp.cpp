#include "adiatrack/dp.hpp"

#include <algorithm>
#include <cmath>

#include "adiatrack/linalg.hpp"
#include "adiatrack/schedules.hpp"

namespace adiatrack {

namespace {

void check_dims(const TransitionMatrix& p, std::size_t len, const char* what) {
  if (p.size() != len) {
    throw InvalidArgument(std::string(what) + ": matrix has " + std::to_string(p.size()) +
                          " states, vector has " + std::to_string(len));
  }
}

}  // namespace

void RewardSpec::validate() const {
  if (r.empty()) throw InvalidArgument("RewardSpec: empty reward vector");
  for (double v : r) {
    if (!std::isfinite(v)) throw InvalidArgument("RewardSpec: non-finite reward");
  }
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("RewardSpec: beta must lie in (0,1)");
}

double RewardSpec::r_max() const { return linalg::sup_norm(r); }

double QFunction::max_over_actions(std::size_t s) const {
  double best = (*this)(s, 0);
  for (std::size_t a = 1; a < n_actions; ++a) best = std::max(best, (*this)(s, a));
  return best;
}

ValueFunction exact_reward(const TransitionMatrix& p, const RewardSpec& spec) {
  spec.validate();
  check_dims(p, spec.r.size(), "exact_reward");
  const std::size_t n = p.size();
  std::vector<double> a(n * n);
  for (State x = 0; x < n; ++x) {
    for (State y = 0; y < n; ++y) a[x * n + y] = (x == y ? 1.0 : 0.0) - spec.beta * p(x, y);
  }
  ValueFunction out{linalg::solve(std::move(a), spec.r, n)};
  const auto check = bellman_f(p, spec, out);
  const double residual = linalg::sup_distance(check.values, out.values);
  if (residual > 1e-10 * (1.0 + linalg::sup_norm(out.values))) {
    throw NumericalError("exact_reward: residual " + std::to_string(residual));
  }
  return out;
}

ValueFunction bellman_f(const TransitionMatrix& p, const RewardSpec& spec,
                        const ValueFunction& r_in) {
  check_dims(p, spec.r.size(), "bellman_f");
  check_dims(p, r_in.values.size(), "bellman_f");
  const std::size_t n = p.size();
  ValueFunction out{spec.r};
  for (State x = 0; x < n; ++x) {
    double acc = 0.0;
    for (State y = 0; y < n; ++y) acc += p(x, y) * r_in.values[y];
    out.values[x] += spec.beta * acc;
  }
  return out;
}

QFunction bellman_g(const TransitionMatrix& p, const RewardSpec& spec, std::size_t n_actions,
                    const QFunction& q_in) {
  check_dims(p, spec.r.size(), "bellman_g");
  check_dims(p, q_in.values.size(), "bellman_g");
  if (n_actions == 0 || p.size() % n_actions != 0 || q_in.n_actions != n_actions) {
    throw InvalidArgument("bellman_g: action count does not divide the product space");
  }
  const std::size_t n_states = p.size() / n_actions;
  std::vector<double> best(n_states);
  for (std::size_t s = 0; s < n_states; ++s) best[s] = q_in.max_over_actions(s);

  QFunction out(n_states, n_actions);
  for (std::size_t i = 0; i < p.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) acc += p(i, j) * best[j / n_actions];
    out.values[i] = spec.r[i] + spec.beta * acc;
  }
  return out;
}

QFunction exact_q(const TransitionMatrix& p, const RewardSpec& spec, std::size_t n_actions,
                  double tol, std::size_t max_iterations) {
  spec.validate();
  if (n_actions == 0 || p.size() % n_actions != 0) {
    throw InvalidArgument("exact_q: action count does not divide the product space");
  }
  QFunction q(p.size() / n_actions, n_actions);
  const double stop = (1.0 - spec.beta) * tol;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    QFunction next = bellman_g(p, spec, n_actions, q);
    const double change = linalg::sup_distance(next.values, q.values);
    q = std::move(next);
    if (change <= stop) return q;
  }
  throw NumericalError("exact_q: value iteration hit the iteration cap");
}

CheckResult check_lipschitz_reward(const TransitionMatrix& p, const TransitionMatrix& q,
                                   const RewardSpec& spec) {
  CheckResult res;
  res.lhs = linalg::sup_distance(exact_reward(p, spec).values, exact_reward(q, spec).values);
  res.rhs = reward_lipschitz_constant(spec) * matrix_tv_distance(p, q);
  res.pass = res.lhs <= res.rhs + 1e-10;
  return res;
}

CheckResult check_lipschitz_q(const TransitionMatrix& p, const TransitionMatrix& q,
                              const RewardSpec& spec, std::size_t n_actions) {
  CheckResult res;
  res.lhs = linalg::sup_distance(exact_q(p, spec, n_actions).values,
                                 exact_q(q, spec, n_actions).values);
  res.rhs = reward_lipschitz_constant(spec) * matrix_tv_distance(p, q);
  // exact_q carries up to 1e-10 error per side.
  res.pass = res.lhs <= res.rhs + 1e-10 + 2e-10;
  return res;
}

RestartCheck check_restart_identity(const TransitionMatrix& p, const RewardSpec& spec,
                                    double beta_hat, State x_restart) {
  spec.validate();
  const TransitionMatrix wrapped = restart_wrap(p, spec.beta, beta_hat, x_restart);
  const auto original = exact_reward(p, spec);
  const auto restarted = exact_reward(wrapped, spec.with_beta(beta_hat));
  const double scale = (1.0 - spec.beta) / (1.0 - beta_hat);

  RestartCheck out;
  out.identity.lhs = std::abs(restarted.values[x_restart] - scale * original.values[x_restart]);
  out.identity.rhs = 1e-8;
  out.identity.pass = out.identity.lhs <= out.identity.rhs;
  out.rho.lhs = ergodicity_coefficient(wrapped);
  out.rho.rhs = spec.beta / beta_hat;
  out.rho.pass = out.rho.lhs <= out.rho.rhs + 1e-12;
  return out;
}

}  // namespace adiatrack
