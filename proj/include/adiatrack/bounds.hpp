#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adiatrack/learners.hpp"
#include "adiatrack/markov.hpp"
#include "adiatrack/schedules.hpp"

namespace adiatrack {

// ---------------------------------------------------------------------------
// Mixing of time-inhomogeneous chains
// ---------------------------------------------------------------------------

/// ||lam - mu|| rho(P)^T + sum_t ||P(t) - P|| rho(P)^(T-t), with T = mats.size().
double thm1a_bound(const Distribution& lam, const Distribution& mu, const TransitionMatrix& p_ref,
                   std::span<const TransitionMatrix> mats);

struct Thm1cBound {
  double value = 0.0;
  Step half = 0;          // floor(T / 2)
  bool floored = false;   // T was odd
};

/// phi_{T/2} rho/(1-rho)^2 + rho^(T/2+1)/(1-rho) sum_{t<=T/2} phi_t + init_gap rho^T.
/// phi must be positive and non-increasing; T/2 is floored for odd T.
Thm1cBound thm1c_bound(const std::function<double(Step)>& phi, double rho, Step t_horizon,
                       double init_gap);

/// phi_t = c_p / (t-1)^gamma_p for t >= 2 and phi_1 = c_p; identically zero when gamma_p = inf.
std::function<double(Step)> drift_envelope(const DriftParams& params);

/// max over starting states x of ||e_x P(t-tau+1)...P(t) - pi(t)|| compared with
/// D_P/((1-rho)^2 t^gamma_p) + 4 log T/((1-rho)^2 T^4) + 1/T^4, D_P = c_p 2^gamma_p,
/// tau = ceil(8 log T / |log rho|).
struct Lem7Result {
  double lhs = 0.0;
  double rhs = 0.0;
  Step tau = 0;
  bool pass = true;
};
Step lem7_tau(Step t_horizon, double rho);
Lem7Result lem7_mixing_check(const Schedule& schedule, Step t, Step t_horizon, double rho);

// ---------------------------------------------------------------------------
// Tracking bound for asynchronous stochastic approximation
// ---------------------------------------------------------------------------

struct ExponentTriple {
  double gamma_p = kInfiniteExponent;
  double gamma_alpha = 0.6;
  double gamma_pi = 0.0;

  void validate() const;
};

struct Thm2Constants {
  double d_a = 1.0;
  double d_b = 1.0;
  double d_b_prime = 1.0;
  double k = 1.0;           // Lipschitz constant of the fixed point in P
  double r_max_eff = 1.0;   // R_max
  double rho = 0.5;
  double beta = 0.5;
  double c_alpha = 0.5;
  double c_pi = 1.0;
  double c_p = 1.0;
  double delta = 0.05;
  double tau_coeff = 4.0;

  void validate() const;
};

enum class Regime { adiabatic, diabatic, boundary };
std::string to_string(Regime r);

struct RegimeClass {
  Regime regime = Regime::boundary;
  bool same_rate_as_static = false;
  /// gamma_p > gamma_alpha + gamma_pi and gamma_alpha > gamma_pi: the weaker,
  /// unproven step-size condition. Used for labelling only.
  bool conjectured_adiabatic = false;
};

RegimeClass classify_regime(const ExponentTriple& exps);

struct BoundReport {
  double ada1 = 0.0;
  double ada2 = 0.0;
  double ada3 = 0.0;
  double ada4 = 0.0;
  double total = 0.0;
  double tau = 0.0;
  double tau_coeff = 4.0;
  RegimeClass regime;
};

BoundReport thm2_bound(const Thm2Constants& consts, const ExponentTriple& exps, Step t_horizon);

// ---------------------------------------------------------------------------
// Sequence lemmas
// ---------------------------------------------------------------------------

/// Integral bounds on sum_{n=s}^t n^-gamma; gamma = 1 uses log t - log s.
std::pair<double, double> alpha_sum_bounds(Step s, Step t, double gamma);

/// Closed-form expansion of z_{n+1} <= z_n (1 - a_n) + c_n:
/// out[n+1] = z0 prod_{k<=n}(1-a_k) + sum_{j<=n} c_j prod_{k=j+1..n}(1-a_k); out[0] = z0.
std::vector<double> zcomp_expand(double z0, std::span<const double> a, std::span<const double> c);

/// z~_{t+1} = (1 - alpha_t (1 - beta)) z~_t + c_t; out[0] = z0.
std::vector<double> zbound_recursion(double z0, std::span<const double> alpha,
                                     std::span<const double> c, double beta);

struct ProdboundResult {
  double lhs = 0.0;
  double rhs_split = 0.0;   // b_{T/2} + exp(-sum_{t>=T/2} a_t) sum_{t<=T/2} a_t b_t
  double rhs_power = 0.0;   // D_{a,b} / T^gamma_b (power-law inputs only, else +inf)
  double d_ab = 0.0;
  bool pass = true;
};

/// a[t-1] = a_t and b[t-1] = b_t for t = 1..T.
ProdboundResult prodbound_check(std::span<const double> a, std::span<const double> b);
/// a_t = c_a / t^gamma_a, b_t = c_b / t^gamma_b; checks both right-hand sides.
ProdboundResult prodbound_power_law(double c_a, double gamma_a, double c_b, double gamma_b,
                                    Step t_horizon);
/// Explicit D_{a,b} for power-law inputs.
double prodbound_constant(double c_a, double gamma_a, double c_b, double gamma_b);

/// a_t = (A_t - A_{t-1}) / alpha_t + A_{t-1}, A_0 = 0. Index t-1 holds step t.
std::vector<double> atoa_transform(std::span<const double> a_big, std::span<const double> alpha);
/// A_T = sum_t a_t alpha_t prod_{s=t+1..T} (1 - alpha_s) for every T.
std::vector<double> atoa_reconstruct(std::span<const double> a, std::span<const double> alpha);

/// Weighted martingale sum against its shifted Azuma-Hoeffding envelope.
struct AhCoverageConfig {
  double delta = 0.05;
  Step tau = 4;
  Step t_horizon = 1000;
  std::size_t replications = 500;
  LearningRate rate{0.5, 0.6};
  double c_pi = 0.5;
  double gamma_pi = 0.0;
  NoiseModel noise{NoiseKind::uniform_iid, 1.0};
  std::uint64_t master_seed = 20240601;
};

struct AhCoverageResult {
  std::size_t replications = 0;
  std::size_t violations = 0;
  double fraction = 0.0;
  double threshold = 0.0;   // delta + 2 sqrt(delta (1 - delta) / N)
  double worst_ratio = 0.0; // max over runs and t of |S_t| / envelope_t
  bool pass = true;
};

/// envelope_t for t = 1..T (index t-1).
std::vector<double> ah_envelope(const AhCoverageConfig& cfg);
AhCoverageResult ah_coverage_check(const AhCoverageConfig& cfg);

}  // namespace adiatrack
