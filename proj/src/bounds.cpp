#include "adiatrack/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adiatrack/rng.hpp"

namespace adiatrack {

namespace {

double power_decay(double t, double gamma) {
  if (std::isinf(gamma)) return 0.0;
  return std::pow(t, -gamma);
}

}  // namespace

double thm1a_bound(const Distribution& lam, const Distribution& mu, const TransitionMatrix& p_ref,
                   std::span<const TransitionMatrix> mats) {
  if (mats.empty()) throw InvalidArgument("thm1a_bound: need at least one matrix");
  const double rho = ergodicity_coefficient(p_ref);
  const auto horizon = static_cast<double>(mats.size());
  double value = tv_distance(lam, mu) * std::pow(rho, horizon);
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    value += matrix_tv_distance(mats[i], p_ref) * std::pow(rho, horizon - t);
  }
  return value;
}

Thm1cBound thm1c_bound(const std::function<double(Step)>& phi, double rho, Step t_horizon,
                       double init_gap) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw InvalidArgument("thm1c_bound: rho must lie in [0,1); the bound is vacuous otherwise");
  }
  if (t_horizon < 2) throw InvalidArgument("thm1c_bound: horizon must be at least 2");
  Thm1cBound out;
  out.half = t_horizon / 2;
  out.floored = t_horizon % 2 != 0;
  double phi_sum = 0.0;
  for (Step t = 1; t <= out.half; ++t) phi_sum += phi(t);
  const double gap = 1.0 - rho;
  out.value = phi(out.half) * rho / (gap * gap) +
              std::pow(rho, static_cast<double>(out.half) + 1.0) / gap * phi_sum +
              init_gap * std::pow(rho, static_cast<double>(t_horizon));
  return out;
}

std::function<double(Step)> drift_envelope(const DriftParams& params) {
  return [params](Step t) {
    if (std::isinf(params.gamma_p)) return 0.0;
    if (t <= 1) return params.c_p;
    return params.c_p / std::pow(static_cast<double>(t - 1), params.gamma_p);
  };
}

Step lem7_tau(Step t_horizon, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("lem7: rho must lie in (0,1)");
  if (t_horizon < 2) throw InvalidArgument("lem7: horizon must be at least 2");
  return static_cast<Step>(
      std::ceil(8.0 * std::log(static_cast<double>(t_horizon)) / std::abs(std::log(rho))));
}

Lem7Result lem7_mixing_check(const Schedule& schedule, Step t, Step t_horizon, double rho) {
  Lem7Result out;
  out.tau = lem7_tau(t_horizon, rho);
  if (schedule.rho_cap() > rho) {
    throw InvalidArgument("lem7: schedule rho_cap exceeds the supplied rho");
  }
  if (out.tau > t || t > t_horizon) {
    throw InvalidArgument("lem7: need tau <= t <= T (tau = " + std::to_string(out.tau) + ")");
  }
  std::vector<TransitionMatrix> window;
  window.reserve(out.tau);
  auto cursor = schedule.cursor();
  const Step first = t - out.tau + 1;
  while (cursor.t() < first) cursor.advance();
  for (Step k = first; k <= t; ++k) {
    window.push_back(cursor.matrix());
    if (k < t) cursor.advance();
  }
  const Distribution pi_t = stationary_distribution(window.back());
  for (State x = 0; x < schedule.n(); ++x) {
    const auto marginal = propagate_marginal(Distribution::point_mass(schedule.n(), x), window);
    out.lhs = std::max(out.lhs, tv_distance(marginal, pi_t));
  }
  const DriftParams& params = schedule.params();
  const double gap2 = (1.0 - rho) * (1.0 - rho);
  const double big_t = static_cast<double>(t_horizon);
  const double t4 = std::pow(big_t, 4.0);
  double drift_term = 0.0;
  if (!std::isinf(params.gamma_p)) {
    const double d_p = params.c_p * std::pow(2.0, params.gamma_p);
    drift_term = d_p / (gap2 * std::pow(static_cast<double>(t), params.gamma_p));
  }
  out.rhs = drift_term + 4.0 * std::log(big_t) / (gap2 * t4) + 1.0 / t4;
  out.pass = out.lhs <= out.rhs;
  return out;
}

void ExponentTriple::validate() const {
  if (!(gamma_p >= 0.0)) throw InvalidArgument("ExponentTriple: gamma_p must be non-negative");
  if (!(gamma_alpha > 0.0 && gamma_alpha < 1.0)) {
    throw InvalidArgument("ExponentTriple: gamma_alpha must lie in (0,1)");
  }
  if (!(gamma_pi >= 0.0)) throw InvalidArgument("ExponentTriple: gamma_pi must be non-negative");
  if (!(gamma_alpha + gamma_pi < 1.0)) {
    throw InvalidArgument("ExponentTriple: gamma_alpha + gamma_pi must be below 1");
  }
}

void Thm2Constants::validate() const {
  for (double v : {d_a, d_b, d_b_prime, k, r_max_eff, c_alpha, c_pi, c_p, tau_coeff}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("Thm2Constants: constants must be finite and non-negative");
    }
  }
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("Thm2Constants: rho must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("Thm2Constants: beta must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("Thm2Constants: delta must lie in (0,1)");
  }
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::adiabatic: return "adiabatic";
    case Regime::diabatic: return "diabatic";
    case Regime::boundary: return "boundary";
  }
  return "boundary";
}

RegimeClass classify_regime(const ExponentTriple& exps) {
  const double tracking = exps.gamma_alpha + exps.gamma_pi;
  RegimeClass out;
  if (exps.gamma_p > tracking && exps.gamma_alpha > 3.0 * exps.gamma_pi) {
    out.regime = Regime::adiabatic;
  } else if (exps.gamma_p < tracking) {
    out.regime = Regime::diabatic;
  } else {
    out.regime = Regime::boundary;
  }
  out.same_rate_as_static =
      exps.gamma_p - tracking > (exps.gamma_alpha - 3.0 * exps.gamma_pi) / 2.0;
  out.conjectured_adiabatic = exps.gamma_p > tracking && exps.gamma_alpha > exps.gamma_pi;
  return out;
}

BoundReport thm2_bound(const Thm2Constants& c, const ExponentTriple& exps, Step t_horizon) {
  c.validate();
  exps.validate();
  if (t_horizon < 2) throw InvalidArgument("thm2_bound: horizon must be at least 2");
  const double big_t = static_cast<double>(t_horizon);
  const double log_t = std::log(big_t);
  const double one_minus_beta = 1.0 - c.beta;
  const double gap2 = (1.0 - c.rho) * (1.0 - c.rho);
  const double m = 1.0 - exps.gamma_alpha - exps.gamma_pi;

  BoundReport out;
  out.tau_coeff = c.tau_coeff;
  out.tau = c.tau_coeff * log_t / std::abs(std::log(c.rho));

  // Forgetting the initial condition; assembled in log space since e^{(1-beta) tau}
  // alone can overflow.
  if (c.r_max_eff > 0.0) {
    const double log_ada1 = std::log(2.0 * c.r_max_eff) + one_minus_beta * out.tau -
                            (std::pow(big_t, m) - 1.0) / m;
    out.ada1 = std::exp(log_ada1);
  }
  out.ada2 = c.d_a / one_minus_beta *
             std::sqrt(out.tau * std::log(2.0 * big_t * out.tau / c.delta)) *
             std::pow(big_t, -(exps.gamma_alpha - 3.0 * exps.gamma_pi) / 2.0);
  out.ada3 = c.d_b * c.k / one_minus_beta *
             power_decay(big_t, exps.gamma_p - exps.gamma_alpha - exps.gamma_pi);
  out.ada4 = 2.0 * c.r_max_eff * c.d_b_prime / (gap2 * one_minus_beta) *
                 power_decay(big_t, exps.gamma_p - exps.gamma_pi) +
             8.0 * c.r_max_eff / gap2 * log_t / std::pow(big_t, 3.0) +
             2.0 * c.r_max_eff / std::pow(big_t, 3.0);
  out.total = out.ada1 + out.ada2 + out.ada3 + out.ada4;
  out.regime = classify_regime(exps);
  return out;
}

std::pair<double, double> alpha_sum_bounds(Step s, Step t, double gamma) {
  if (s < 1 || s > t) throw InvalidArgument("alpha_sum_bounds: need 1 <= s <= t");
  if (!(gamma > 0.0)) throw InvalidArgument("alpha_sum_bounds: gamma must be positive");
  const double ds = static_cast<double>(s);
  const double dt = static_cast<double>(t);
  const double lower = gamma == 1.0
                           ? std::log(dt) - std::log(ds)
                           : (std::pow(dt, 1.0 - gamma) - std::pow(ds, 1.0 - gamma)) / (1.0 - gamma);
  return {lower, std::pow(ds, -gamma) + lower};
}

std::vector<double> zcomp_expand(double z0, std::span<const double> a, std::span<const double> c) {
  if (a.size() != c.size()) throw InvalidArgument("zcomp_expand: length mismatch");
  std::vector<double> out{z0};
  for (std::size_t n = 0; n < a.size(); ++n) {
    // Walk j = n..0 so the product prod_{k=j+1..n} (1 - a_k) grows one factor at a time.
    double prod = 1.0;
    double tail = 0.0;
    for (std::size_t j = n + 1; j-- > 0;) {
      tail += c[j] * prod;
      prod *= 1.0 - a[j];
    }
    out.push_back(z0 * prod + tail);
  }
  return out;
}

std::vector<double> zbound_recursion(double z0, std::span<const double> alpha,
                                     std::span<const double> c, double beta) {
  if (alpha.size() != c.size()) throw InvalidArgument("zbound_recursion: length mismatch");
  std::vector<double> out{z0};
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    out.push_back((1.0 - alpha[t] * (1.0 - beta)) * out.back() + c[t]);
  }
  return out;
}

ProdboundResult prodbound_check(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("prodbound_check: length mismatch");
  if (a.size() < 2) throw InvalidArgument("prodbound_check: horizon must be at least 2");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0 && a[i] < 1.0)) throw InvalidArgument("prodbound_check: a_t must lie in (0,1)");
    if (!(b[i] >= 0.0)) throw InvalidArgument("prodbound_check: b_t must be non-negative");
    if (i > 0 && b[i] > b[i - 1]) throw InvalidArgument("prodbound_check: b_t must be decreasing");
  }
  const std::size_t horizon = a.size();
  ProdboundResult out;
  double tail_product = 1.0;  // prod_{s=t+1..T} (1 - a_s)
  for (std::size_t i = horizon; i-- > 0;) {
    out.lhs += a[i] * b[i] * tail_product;
    tail_product *= 1.0 - a[i];
  }
  const std::size_t half = horizon / 2;  // 1-based index
  double late_sum = 0.0;
  for (std::size_t t = half; t <= horizon; ++t) late_sum += a[t - 1];
  double early = 0.0;
  for (std::size_t t = 1; t <= half; ++t) early += a[t - 1] * b[t - 1];
  out.rhs_split = b[half - 1] + std::exp(-late_sum) * early;
  out.rhs_power = std::numeric_limits<double>::infinity();
  out.pass = out.lhs <= out.rhs_split + 1e-12;
  return out;
}

double prodbound_constant(double c_a, double gamma_a, double c_b, double gamma_b) {
  const double k = 1.0 + gamma_b;
  const double c = c_a / 2.0;
  const double m = 1.0 - gamma_a;
  const double peak = std::pow(k / (c * m), k / m) * std::exp(-k / m);
  return c_b * std::pow(3.0, gamma_b) + 0.5 * c_a * c_b * peak;
}

ProdboundResult prodbound_power_law(double c_a, double gamma_a, double c_b, double gamma_b,
                                    Step t_horizon) {
  if (!(gamma_a > 0.0 && gamma_a < 1.0) || !(gamma_b >= 0.0) || !(c_a > 0.0 && c_a < 1.0) ||
      !(c_b > 0.0)) {
    throw InvalidArgument("prodbound_power_law: parameters outside the lemma's range");
  }
  std::vector<double> a(t_horizon), b(t_horizon);
  for (Step t = 1; t <= t_horizon; ++t) {
    a[t - 1] = c_a / std::pow(static_cast<double>(t), gamma_a);
    b[t - 1] = c_b / std::pow(static_cast<double>(t), gamma_b);
  }
  ProdboundResult out = prodbound_check(a, b);
  out.d_ab = prodbound_constant(c_a, gamma_a, c_b, gamma_b);
  out.rhs_power = out.d_ab / std::pow(static_cast<double>(t_horizon), gamma_b);
  out.pass = out.pass && out.lhs <= out.rhs_power + 1e-12;
  return out;
}

std::vector<double> atoa_transform(std::span<const double> a_big, std::span<const double> alpha) {
  if (a_big.size() != alpha.size()) throw InvalidArgument("atoa_transform: length mismatch");
  std::vector<double> out(a_big.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < a_big.size(); ++i) {
    if (!(alpha[i] > 0.0)) throw InvalidArgument("atoa_transform: alpha_t must be positive");
    out[i] = (a_big[i] - prev) / alpha[i] + prev;
    prev = a_big[i];
  }
  return out;
}

std::vector<double> atoa_reconstruct(std::span<const double> a, std::span<const double> alpha) {
  if (a.size() != alpha.size()) throw InvalidArgument("atoa_reconstruct: length mismatch");
  std::vector<double> out(a.size());
  for (std::size_t big_t = a.size(); big_t >= 1; --big_t) {
    double prod = 1.0;  // prod_{s=t+1..T} (1 - alpha_s)
    double sum = 0.0;
    for (std::size_t t = big_t; t >= 1; --t) {
      sum += a[t - 1] * alpha[t - 1] * prod;
      prod *= 1.0 - alpha[t - 1];
    }
    out[big_t - 1] = sum;
  }
  return out;
}

std::vector<double> ah_envelope(const AhCoverageConfig& cfg) {
  const double log_term = std::log(2.0 * static_cast<double>(cfg.tau) *
                                   static_cast<double>(cfg.t_horizon) / cfg.delta);
  const double eps2 = cfg.noise.eps_max * cfg.noise.eps_max;
  std::vector<double> env(cfg.t_horizon);
  double weighted = 0.0;  // sum_{s<=t} eps_max^2 alpha_s^2 prod_{u=s+1..t} (1 - alpha_u pi_u)^2
  for (Step t = 1; t <= cfg.t_horizon; ++t) {
    const double alpha = cfg.rate.at(t);
    const double damp = 1.0 - alpha * cfg.c_pi / std::pow(static_cast<double>(t), cfg.gamma_pi);
    weighted = damp * damp * weighted + eps2 * alpha * alpha;
    env[t - 1] = std::sqrt(2.0 * static_cast<double>(cfg.tau) * weighted * log_term);
  }
  return env;
}

AhCoverageResult ah_coverage_check(const AhCoverageConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidArgument("ah_coverage: delta must lie in (0,1)");
  if (cfg.tau < 1 || cfg.tau > cfg.t_horizon) throw InvalidArgument("ah_coverage: need 1 <= tau <= T");
  if (cfg.replications == 0) throw InvalidArgument("ah_coverage: need at least one replication");
  cfg.rate.validate();
  cfg.noise.validate();
  const auto env = ah_envelope(cfg);

  AhCoverageResult out;
  out.replications = cfg.replications;
  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    RandomStream rng(cfg.master_seed + rep);
    double sum = 0.0;
    bool violated = false;
    for (Step t = 1; t <= cfg.t_horizon; ++t) {
      const double eps = cfg.noise.kind == NoiseKind::zero
                             ? 0.0
                             : rng.uniform(-cfg.noise.eps_max, cfg.noise.eps_max);
      if (t < cfg.tau) continue;
      const double alpha = cfg.rate.at(t);
      const double damp = 1.0 - alpha * cfg.c_pi / std::pow(static_cast<double>(t), cfg.gamma_pi);
      sum = damp * sum + alpha * eps;
      const double e = env[t - 1];
      if (e > 0.0) out.worst_ratio = std::max(out.worst_ratio, std::abs(sum) / e);
      if (std::abs(sum) > e) violated = true;
    }
    if (violated) ++out.violations;
  }
  const double n = static_cast<double>(cfg.replications);
  out.fraction = static_cast<double>(out.violations) / n;
  out.threshold = cfg.delta + 2.0 * std::sqrt(cfg.delta * (1.0 - cfg.delta) / n);
  out.pass = out.fraction <= out.threshold;
  return out;
}

}  // namespace adiatrack
