#include "adiatrack/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "adiatrack/linalg.hpp"

namespace adiatrack::verify {

namespace {

constexpr double kTol = 1e-10;

// Salts keep the per-suite seed streams apart.
constexpr std::uint64_t kProp1Salt = 0x70726f7031;
constexpr std::uint64_t kProp1aSalt = 0x70726f70316161;
constexpr std::uint64_t kThm1Salt = 0x74686d31;
constexpr std::uint64_t kLemmaSalt = 0x6c656d6d61;
constexpr std::uint64_t kLipSalt = 0x6c6970;
constexpr std::uint64_t kRestartSalt = 0x72657374;
constexpr std::uint64_t kMixSalt = 0x6d6978;
constexpr std::uint64_t kCoverSalt = 0x636f76;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json dist_json(std::span<const double> p) { return std::vector<double>(p.begin(), p.end()); }

std::vector<double> random_values(RandomStream& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

Distribution random_initial(RandomStream& rng, std::size_t n) {
  if (rng.uniform01() < 0.3) return Distribution::point_mass(n, rng.below(n));
  return random_distribution(rng, n);
}

/// max over row pairs of the row TV, written out independently of the library's
/// overlap formula.
double max_row_pair_tv(const TransitionMatrix& p) {
  double best = 0.0;
  for (State a = 0; a < p.size(); ++a) {
    for (State b = a + 1; b < p.size(); ++b) best = std::max(best, tv_distance(p.row(a), p.row(b)));
  }
  return best;
}

std::vector<double> power_law(std::size_t len, double c, double gamma) {
  std::vector<double> v(len);
  for (std::size_t t = 1; t <= len; ++t) v[t - 1] = c / std::pow(static_cast<double>(t), gamma);
  return v;
}

SuiteReport make_report(std::string name, const VerifyOptions& opt,
                        std::vector<PropertyTally> props, const Timer& timer) {
  SuiteReport rep;
  rep.suite = std::move(name);
  rep.master_seed = opt.master_seed;
  rep.properties = std::move(props);
  rep.seconds = timer.seconds();
  return rep;
}

}  // namespace

void PropertyTally::record(double lhs, double rhs, const std::function<json()>& describe) {
  ++cases;
  const double margin = lhs - rhs;
  if (!(margin <= worst_margin)) worst_margin = std::isnan(margin) ? worst_margin : margin;
  if (lhs <= rhs) return;
  ++violations;
  if (!counterexample) {
    json c = describe();
    c["lhs"] = lhs;
    c["rhs"] = rhs;
    counterexample = std::move(c);
  }
}

bool SuiteReport::pass() const { return violations() == 0; }

std::size_t SuiteReport::cases() const {
  std::size_t n = 0;
  for (const auto& p : properties) n += p.cases;
  return n;
}

std::size_t SuiteReport::violations() const {
  std::size_t n = 0;
  for (const auto& p : properties) n += p.violations;
  return n;
}

const PropertyTally& SuiteReport::property(const std::string& name) const {
  for (const auto& p : properties) {
    if (p.name == name) return p;
  }
  throw InvalidArgument("suite " + suite + " has no property '" + name + "'");
}

json SuiteReport::to_json() const {
  json props = json::array();
  std::optional<json> first;
  for (const auto& p : properties) {
    json j = {{"name", p.name},
              {"cases", p.cases},
              {"violations", p.violations},
              {"worst_margin", p.cases == 0 ? json() : json(p.worst_margin)}};
    if (p.counterexample) {
      j["counterexample"] = *p.counterexample;
      if (!first) first = json{{"property", p.name}, {"inputs", *p.counterexample}};
    }
    props.push_back(std::move(j));
  }
  json out = {{"spec_version", io::kSpecVersion},
              {"suite", suite},
              {"master_seed", master_seed},
              {"pass", pass()},
              {"cases", cases()},
              {"violations", violations()},
              {"seconds", seconds},
              {"properties", props}};
  if (first) out["counterexample"] = *first;
  return out;
}

std::uint64_t case_seed(std::uint64_t master_seed, std::uint64_t salt, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(salt + splitmix64(index)));
}

Distribution random_distribution(RandomStream& rng, std::size_t n) {
  // Normalized exponentials: uniform on the simplex.
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.uniform01());
    total += x;
  }
  for (double& x : w) x /= total;
  return Distribution(std::move(w));
}

TransitionMatrix random_irreducible(RandomStream& rng, std::size_t n, double sparsity) {
  for (int attempt = 0; attempt < 10'000; ++attempt) {
    std::vector<double> e;
    e.reserve(n * n);
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<double> row(n);
      const std::size_t keep = rng.below(n);
      double total = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        row[y] = -std::log(1.0 - rng.uniform01());
        if (y != keep && rng.uniform01() < sparsity) row[y] = 0.0;
        total += row[y];
      }
      for (double v : row) e.push_back(v / total);
    }
    TransitionMatrix p(n, std::move(e));
    if (is_irreducible(p)) return p;
  }
  throw NumericalError("random_irreducible: rejection sampling did not terminate");
}

// ---------------------------------------------------------------------------

SuiteReport prop1_suite(const VerifyOptions& opt) {
  Timer timer;
  const double s = opt.rho_sabotage;
  PropertyTally p1a{"1a_second_eigenvalue"}, p1b{"1b_submultiplicative"},
      p1c{"1c_contraction"}, p1d{"1d_formulas_agree"}, p1e{"1e_stationary_perturbation"};

  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const std::uint64_t seed = case_seed(opt.master_seed, kProp1Salt, i);
    RandomStream rng(seed);
    const std::size_t n = 2 + rng.below(5);
    const double sparsity = i % 2 == 0 ? 0.0 : 0.4;
    const TransitionMatrix p = random_irreducible(rng, n, sparsity);
    const TransitionMatrix q = random_irreducible(rng, n, sparsity);
    const Distribution lam = random_initial(rng, n);
    const Distribution mu = random_initial(rng, n);
    auto describe = [&] {
      return json{{"case", i}, {"seed", seed}, {"P", io::to_json(p)}, {"P_tilde", io::to_json(q)},
                  {"lambda", dist_json(lam.probs())}, {"mu", dist_json(mu.probs())}};
    };
    const double rho_p = ergodicity_coefficient(p) * s;
    const double rho_q = ergodicity_coefficient(q) * s;

    p1b.record(ergodicity_coefficient(p * q), rho_p * rho_q + kTol, describe);
    p1c.record(tv_distance(left_multiply(lam.probs(), p), left_multiply(mu.probs(), p)),
               rho_p * tv_distance(lam, mu) + kTol, describe);
    p1d.record(std::abs(max_row_pair_tv(p) - ergodicity_coefficient_overlap(p)), kTol, describe);
    const double gap = tv_distance(stationary_distribution(p), stationary_distribution(q));
    const double bound = rho_p < 1.0 ? matrix_tv_distance(p, q) / (1.0 - rho_p)
                                     : std::numeric_limits<double>::infinity();
    p1e.record(gap, bound + kTol, describe);
  }
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const std::uint64_t seed = case_seed(opt.master_seed, kProp1aSalt, i);
    RandomStream rng(seed);
    const TransitionMatrix p = random_irreducible(rng, 2);
    p1a.record(std::abs(second_eigenvalue_2x2(p)), ergodicity_coefficient(p) * s + kTol, [&] {
      return json{{"case", i}, {"seed", seed}, {"P", io::to_json(p)}};
    });
  }
  return make_report("prop1", opt, {p1a, p1b, p1c, p1d, p1e}, timer);
}

// ---------------------------------------------------------------------------

namespace {

struct Thm1Instance {
  std::string family;
  std::uint64_t seed = 0;
  Schedule schedule;
};

DriftParams random_drift(RandomStream& rng, double gamma_lo, double gamma_hi) {
  DriftParams params;
  params.c_p = rng.uniform(0.01, 0.3);
  params.gamma_p = rng.uniform(gamma_lo, gamma_hi);
  return params;
}

std::vector<Thm1Instance> thm1_instances(std::uint64_t master_seed) {
  std::vector<Thm1Instance> out;
  std::uint64_t idx = 0;
  for (std::size_t n = 2; n <= 4; ++n) {
    for (int k = 0; k < 8; ++k) {
      for (int family = 0; family < 5; ++family) {
        if (family == 4 && n != 3) continue;
        const std::uint64_t seed = case_seed(master_seed, kThm1Salt, idx++);
        RandomStream rng(seed);
        switch (family) {
          case 0:
            out.push_back({"constant", seed, Schedule::constant(random_irreducible(rng, n))});
            break;
          case 1: {
            auto a = random_irreducible(rng, n);
            auto b = random_irreducible(rng, n);
            out.push_back({"interpolation", seed,
                           Schedule::interpolation(a, b, random_drift(rng, 0.5, 2.0))});
            break;
          }
          case 2: {
            std::vector<TransitionMatrix> mats;
            for (int m = 0; m < 3; ++m) mats.push_back(random_irreducible(rng, n));
            out.push_back({"cyclic", seed, Schedule::cyclic(mats, random_drift(rng, 0.2, 0.95))});
            break;
          }
          case 3: {
            auto a = random_irreducible(rng, n);
            auto b = random_irreducible(rng, n);
            const DriftParams params = random_drift(rng, 0.5, 2.0);
            const double beta = rng.uniform(0.3, 0.9);
            const double beta_hat = rng.uniform(beta + 0.01, 0.99);
            out.push_back({"restart-wrapped", seed,
                           Schedule::restart_wrapped(Schedule::interpolation(a, b, params), beta,
                                                     beta_hat, rng.below(n), params)});
            break;
          }
          case 4: {
            DriftParams params;
            params.c_pi = rng.uniform(0.05, 1.0 / 3.0);
            params.gamma_pi = rng.uniform(0.1, 1.0);
            params.c_p = 2.0 * params.c_pi * params.gamma_pi;
            params.gamma_p = 1.0 + params.gamma_pi;
            out.push_back({"shrinking-state", seed, Schedule::shrinking_state(params, 1024)});
            break;
          }
        }
      }
    }
  }
  return out;
}

std::vector<TransitionMatrix> first_matrices(const Schedule& s, Step count) {
  std::vector<TransitionMatrix> mats;
  mats.reserve(count);
  auto cursor = s.cursor();
  for (Step t = 1; t <= count; ++t) {
    mats.push_back(cursor.matrix());
    cursor.advance();
  }
  return mats;
}

/// max over point masses of ||e_x P(1)...P(T) - pi(T)|| and the matching
/// thm1c bound for that x, returned as the pair with the largest lhs - rhs.
std::pair<double, double> worst_thm1c(const Schedule& s, Step horizon, double sabotage) {
  const auto mats = first_matrices(s, horizon);
  const Distribution pi_t = stationary_distribution(mats.back());
  const double rho_t = ergodicity_coefficient(mats.back()) * sabotage;
  const auto phi = drift_envelope(s.params());
  std::pair<double, double> worst{0.0, std::numeric_limits<double>::infinity()};
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (State x = 0; x < s.n(); ++x) {
    const auto lam = Distribution::point_mass(s.n(), x);
    const double gap = tv_distance(propagate_marginal(lam, mats), pi_t);
    const double bound = thm1c_bound(phi, rho_t, horizon, tv_distance(lam, pi_t)).value;
    if (gap - bound > worst_margin) {
      worst_margin = gap - bound;
      worst = {gap, bound};
    }
  }
  return worst;
}

}  // namespace

SuiteReport thm1_suite(const VerifyOptions& opt) {
  Timer timer;
  constexpr Step kMaxT = 512;
  PropertyTally t1a_self{"1a_dominance_ref_final"}, t1a_first{"1a_dominance_ref_first"},
      t1c{"1c_dominance"}, t1b_dec{"1b_gap_decreasing"}, t1b_dom{"1b_below_1c_bound"};

  for (const auto& inst : thm1_instances(opt.master_seed)) {
    const Schedule& s = inst.schedule;
    const std::size_t n = s.n();
    const auto mats = first_matrices(s, kMaxT);
    const auto phi = drift_envelope(s.params());
    std::vector<Distribution> pis(kMaxT + 1);
    std::vector<double> rhos(kMaxT + 1);
    for (Step t = 2; t <= kMaxT; t += 2) {
      pis[t] = stationary_distribution(mats[t - 1]);
      rhos[t] = ergodicity_coefficient(mats[t - 1]);
    }
    for (State x = 0; x < n; ++x) {
      const auto lam = Distribution::point_mass(n, x);
      std::vector<double> cur(lam.probs().begin(), lam.probs().end());
      std::vector<double> homogeneous = cur;
      for (Step t = 1; t <= kMaxT; ++t) {
        cur = left_multiply(cur, mats[t - 1]);
        homogeneous = left_multiply(homogeneous, mats[0]);
        if (t % 2 != 0) continue;
        auto describe = [&] {
          return json{{"family", inst.family}, {"seed", inst.seed}, {"T", t}, {"x0", x},
                      {"schedule", io::to_json(s)}, {"P_T", io::to_json(mats[t - 1])}};
        };
        const std::span<const TransitionMatrix> prefix(mats.data(), t);
        const double gap = tv_distance(cur, pis[t].probs());
        t1a_self.record(gap, thm1a_bound(lam, pis[t], mats[t - 1], prefix) + kTol, describe);
        t1a_first.record(tv_distance(cur, homogeneous),
                         thm1a_bound(lam, lam, mats[0], prefix) + kTol, describe);
        const double rho_t = rhos[t] * opt.rho_sabotage;
        if (rho_t < 1.0) {
          t1c.record(gap, thm1c_bound(phi, rho_t, t, tv_distance(lam, pis[t])).value + kTol,
                     describe);
        }
      }
    }
  }

  // Non-convergent cyclic schedule with vanishing increments. Lazy rank-one
  // chains 0.5 I + 0.5 1 nu_k^T keep rho at 0.5 along every segment, so the gap
  // is driven by the drift alone rather than by rho passing near zero.
  auto lazy = [](std::vector<double> nu) {
    std::vector<std::vector<double>> rows(nu.size(), std::vector<double>(nu.size()));
    for (std::size_t x = 0; x < nu.size(); ++x) {
      for (std::size_t y = 0; y < nu.size(); ++y) rows[x][y] = 0.5 * nu[y] + (x == y ? 0.5 : 0.0);
    }
    return TransitionMatrix(rows);
  };
  DriftParams params;
  params.c_p = 0.2;
  params.gamma_p = 0.7;
  const Schedule cyc = Schedule::cyclic(
      {lazy({0.6, 0.2, 0.2}), lazy({0.2, 0.6, 0.2}), lazy({0.2, 0.2, 0.6})}, params);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (Step horizon : {Step{100}, Step{1000}, Step{10000}}) {
    const auto [gap, bound] = worst_thm1c(cyc, horizon, opt.rho_sabotage);
    auto describe = [&, gap = gap] {
      return json{{"T", horizon}, {"gap", gap}, {"previous_gap", prev_gap},
                  {"schedule", io::to_json(cyc)}};
    };
    t1b_dom.record(gap, bound + kTol, describe);
    if (std::isfinite(prev_gap)) {
      t1b_dec.record(gap, std::nextafter(prev_gap, 0.0), describe);
    }
    prev_gap = gap;
  }
  return make_report("thm1", opt, {t1a_self, t1a_first, t1c, t1b_dec, t1b_dom}, timer);
}

// ---------------------------------------------------------------------------

SuiteReport lemmas_suite(const VerifyOptions& opt) {
  Timer timer;
  PropertyTally contraction_f{"contraction_f"}, contraction_g{"contraction_g"},
      alpha_sum{"alpha_sum"}, zcomp{"zcomp_identity"}, zcomp_le{"zcomp_inequality"},
      zbound{"zbound_corrected"}, prod_split{"prodbound_split"},
      prod_power{"prodbound_power_law"}, atoa_id{"atoa_identity"}, atoa_cap{"atoa_growth_cap"},
      bounded{"lem_bound_ball"};
  std::uint64_t idx = 0;
  auto next_seed = [&] { return case_seed(opt.master_seed, kLemmaSalt, idx++); };

  // Contraction of F and G in the sup norm.
  for (int i = 0; i < 10'000; ++i) {
    const std::uint64_t seed = next_seed();
    RandomStream rng(seed);
    const double beta = rng.uniform(0.01, 0.99);
    const std::size_t n = 2 + rng.below(5);
    const TransitionMatrix p = random_irreducible(rng, n, 0.3);
    const RewardSpec spec{random_values(rng, n, -5.0, 5.0), beta};
    const ValueFunction a{random_values(rng, n, -10.0, 10.0)};
    const ValueFunction b{random_values(rng, n, -10.0, 10.0)};
    contraction_f.record(
        linalg::sup_distance(bellman_f(p, spec, a).values, bellman_f(p, spec, b).values),
        beta * linalg::sup_distance(a.values, b.values) + 1e-12, [&] {
          return json{{"seed", seed}, {"P", io::to_json(p)}, {"reward", io::to_json(spec)},
                      {"R", a.values}, {"R_prime", b.values}};
        });

    const std::size_t n_actions = 2 + rng.below(2);
    const std::size_t n_states = 2 + rng.below(2);
    const TransitionMatrix pq = random_irreducible(rng, n_states * n_actions, 0.3);
    const RewardSpec qspec{random_values(rng, n_states * n_actions, -5.0, 5.0), beta};
    QFunction qa(n_states, n_actions), qb(n_states, n_actions);
    qa.values = random_values(rng, qa.values.size(), -10.0, 10.0);
    qb.values = random_values(rng, qb.values.size(), -10.0, 10.0);
    contraction_g.record(linalg::sup_distance(bellman_g(pq, qspec, n_actions, qa).values,
                                              bellman_g(pq, qspec, n_actions, qb).values),
                         beta * linalg::sup_distance(qa.values, qb.values) + 1e-12, [&] {
                           return json{{"seed", seed}, {"P", io::to_json(pq)},
                                       {"reward", io::to_json(qspec)}, {"n_actions", n_actions},
                                       {"Q", qa.values}, {"Q_prime", qb.values}};
                         });
  }

  for (int i = 0; i < 300; ++i) {
    const std::uint64_t seed = next_seed();
    RandomStream rng(seed);
    const std::size_t horizon = 2 + rng.below(999);

    // alpha_sum
    {
      const Step t = 1 + rng.below(horizon);
      const Step s0 = 1 + rng.below(t);
      const double gamma = rng.uniform(0.05, 1.5);
      double direct = 0.0;
      for (Step k = s0; k <= t; ++k) direct += std::pow(static_cast<double>(k), -gamma);
      const auto [lo, hi] = alpha_sum_bounds(s0, t, gamma);
      alpha_sum.record(std::max(lo - direct, direct - hi), kTol, [&] {
        return json{{"seed", seed}, {"s", s0}, {"t", t}, {"gamma", gamma}, {"direct", direct},
                    {"lower", lo}, {"upper", hi}};
      });
    }

    // zcomp: direct iteration against the expansion, then an inequality recursion.
    {
      const double z0 = rng.uniform(0.0, 5.0);
      const auto a = power_law(horizon, rng.uniform(0.05, 0.95), rng.uniform(0.05, 1.0));
      const auto c = power_law(horizon, rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0));
      const auto expanded = zcomp_expand(z0, a, c);
      double z = z0;
      double worst = 0.0;
      std::vector<double> slack_path{z0};
      double zs = z0;
      for (std::size_t k = 0; k < horizon; ++k) {
        z = z * (1.0 - a[k]) + c[k];
        worst = std::max(worst, std::abs(z - expanded[k + 1]) / std::max(1.0, std::abs(z)));
        zs = (zs * (1.0 - a[k]) + c[k]) * rng.uniform(0.5, 1.0);
        slack_path.push_back(zs);
      }
      auto describe = [&] { return json{{"seed", seed}, {"T", horizon}, {"z0", z0}}; };
      zcomp.record(worst, kTol, describe);
      double worst_le = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k <= horizon; ++k) {
        worst_le = std::max(worst_le, slack_path[k] - expanded[k]);
      }
      zcomp_le.record(worst_le, kTol, describe);
    }

    // zboundLem in the form used by the tracking proof.
    {
      const double z0 = rng.uniform(0.1, 5.0);
      const double beta = rng.uniform(0.05, 0.95);
      const auto alpha = power_law(horizon, rng.uniform(0.05, 0.95), rng.uniform(0.05, 1.0));
      const auto c = power_law(horizon, rng.uniform(0.0, 1.0), rng.uniform(0.5, 2.0));
      std::vector<double> z{z0};
      double y = z0;  // right-hand side of the hypothesis for z_1
      z.push_back(y * rng.uniform(0.5, 1.0));
      for (std::size_t t = 1; t < horizon; ++t) {
        y = (1.0 - alpha[t - 1]) * y + alpha[t - 1] * beta * z[t] + c[t - 1];
        z.push_back(y * rng.uniform(0.5, 1.0));
      }
      const auto bound = zbound_recursion(z0, alpha, c, beta);
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < horizon; ++k) worst = std::max(worst, z[k + 1] - bound[k]);
      zbound.record(worst, kTol, [&] {
        return json{{"seed", seed}, {"T", horizon}, {"z0", z0}, {"beta", beta}};
      });
    }

    // prodbound, general decreasing b and power-law inputs.
    {
      std::vector<double> a(horizon), b(horizon);
      for (double& v : a) v = rng.uniform(0.001, 0.999);
      for (double& v : b) v = rng.uniform(0.0, 3.0);
      std::sort(b.begin(), b.end(), std::greater<>());
      const auto res = prodbound_check(a, b);
      prod_split.record(res.lhs, res.rhs_split + 1e-12, [&] {
        return json{{"seed", seed}, {"a", a}, {"b", b}};
      });

      const double c_a = rng.uniform(0.1, 0.9), g_a = rng.uniform(0.1, 0.9);
      const double c_b = rng.uniform(0.1, 5.0), g_b = rng.uniform(0.0, 2.0);
      const auto pw = prodbound_power_law(c_a, g_a, c_b, g_b, horizon);
      auto describe = [&] {
        return json{{"seed", seed}, {"c_a", c_a}, {"gamma_a", g_a}, {"c_b", c_b},
                    {"gamma_b", g_b}, {"T", horizon}, {"D", pw.d_ab}};
      };
      prod_split.record(pw.lhs, pw.rhs_split + 1e-12, describe);
      prod_power.record(pw.lhs, pw.rhs_power + 1e-12, describe);
    }

    // Atoa: identity and the decreasing power-law growth cap.
    {
      const double c_a = rng.uniform(0.1, 5.0), g_a = rng.uniform(0.0, 1.5);
      const double c_alpha = rng.uniform(0.05, 0.95), g_alpha = rng.uniform(0.05, 1.0);
      const auto big_a = power_law(horizon, c_a, g_a);
      const auto alpha = power_law(horizon, c_alpha, g_alpha);
      const auto a = atoa_transform(big_a, alpha);
      const auto back = atoa_reconstruct(a, alpha);
      double worst_id = 0.0;
      double worst_cap = -std::numeric_limits<double>::infinity();
      const double d = std::max(c_a / c_alpha, c_a * std::pow(2.0, g_a));
      for (std::size_t t = 1; t <= horizon; ++t) {
        worst_id = std::max(worst_id, std::abs(back[t - 1] - big_a[t - 1]) /
                                          std::max(1.0, std::abs(big_a[t - 1])));
        worst_cap = std::max(worst_cap, a[t - 1] * std::pow(static_cast<double>(t), g_a) - d);
      }
      auto describe = [&] {
        return json{{"seed", seed}, {"C_A", c_a}, {"gamma_A", g_a}, {"C_alpha", c_alpha},
                    {"gamma_alpha", g_alpha}, {"T", horizon}};
      };
      atoa_id.record(worst_id, kTol, describe);
      atoa_cap.record(worst_cap, kTol, describe);
    }
  }

  // Lem:Bound along short seeded runs, TD and Q, with injected noise.
  for (int i = 0; i < 40; ++i) {
    const std::uint64_t seed = next_seed();
    RandomStream rng(seed);
    const bool use_q = i % 2 == 1;
    const std::size_t n_actions = use_q ? 2 : 1;
    const std::size_t n = (2 + rng.below(2)) * n_actions;
    DriftParams params;
    params.c_p = 0.1;
    params.gamma_p = 1.0;
    const Schedule s = Schedule::interpolation(random_irreducible(rng, n),
                                               random_irreducible(rng, n), params);
    const RewardSpec spec{random_values(rng, n, -3.0, 3.0), rng.uniform(0.3, 0.95)};
    const LearningRate rate{rng.uniform(0.1, 0.99), rng.uniform(0.3, 0.9)};
    const NoiseModel noise{NoiseKind::uniform_iid, rng.uniform(0.0, 2.0)};
    const std::vector<Step> grid{3000};
    const TrackingTrace tr = use_q ? q_track(s, spec, n_actions, rate, noise, 3000, seed, grid)
                                   : td0_track(s, spec, rate, noise, 3000, seed, grid);
    const auto check = check_boundedness(tr);
    bounded.record(check.check.lhs, check.check.rhs, [&] {
      return json{{"seed", seed}, {"schedule", io::to_json(s)}, {"reward", io::to_json(spec)},
                  {"first_violation", check.first_violation.value_or(0)}};
    });
  }

  return make_report("lemmas", opt, {contraction_f, contraction_g, alpha_sum, zcomp, zcomp_le, zbound, prod_split,
                   prod_power, atoa_id, atoa_cap, bounded}, timer);
}

// ---------------------------------------------------------------------------

SuiteReport lipschitz_suite(const VerifyOptions& opt) {
  Timer timer;
  PropertyTally reward_tally{"rlem_a_reward"}, q_tally{"rlem_b_q"};
  constexpr double kBetas[] = {0.5, 0.9, 0.99};
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const std::uint64_t seed = case_seed(opt.master_seed, kLipSalt, i);
    RandomStream rng(seed);
    const double beta = kBetas[i % 3];
    const double r_max = rng.uniform(0.1, 10.0);
    {
      const std::size_t n = 2 + rng.below(4);
      const TransitionMatrix p = random_irreducible(rng, n);
      const TransitionMatrix q = TransitionMatrix::mix(p, random_irreducible(rng, n),
                                                       std::pow(rng.uniform01(), 3.0));
      const RewardSpec spec{random_values(rng, n, 0.0, r_max), beta};
      const auto res = check_lipschitz_reward(p, q, spec);
      reward_tally.record(res.lhs, res.rhs + 1e-10, [&] {
        return json{{"seed", seed}, {"P", io::to_json(p)}, {"P_tilde", io::to_json(q)},
                    {"reward", io::to_json(spec)}};
      });
    }
    {
      const std::size_t n_actions = 2 + rng.below(2);
      const std::size_t n = (2 + rng.below(2)) * n_actions;
      const TransitionMatrix p = random_irreducible(rng, n);
      const TransitionMatrix q = TransitionMatrix::mix(p, random_irreducible(rng, n),
                                                       std::pow(rng.uniform01(), 3.0));
      const RewardSpec spec{random_values(rng, n, 0.0, r_max), beta};
      const auto res = check_lipschitz_q(p, q, spec, n_actions);
      q_tally.record(res.lhs, res.rhs + 3e-10, [&] {
        return json{{"seed", seed}, {"P", io::to_json(p)}, {"P_tilde", io::to_json(q)},
                    {"reward", io::to_json(spec)}, {"n_actions", n_actions}};
      });
    }
  }
  return make_report("lipschitz", opt, {reward_tally, q_tally}, timer);
}

SuiteReport restart_suite(const VerifyOptions& opt) {
  Timer timer;
  PropertyTally identity{"restart_identity"}, rho{"restart_rho"};
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::uint64_t seed = case_seed(opt.master_seed, kRestartSalt, i);
    RandomStream rng(seed);
    const std::size_t n = 2 + rng.below(5);
    const TransitionMatrix p = random_irreducible(rng, n, i % 2 == 0 ? 0.0 : 0.5);
    const double beta = rng.uniform(0.05, 0.95);
    const double beta_hat = rng.uniform(beta + 0.001, 0.995);
    const State x_restart = rng.below(n);
    const RewardSpec spec{random_values(rng, n, 0.0, rng.uniform(0.1, 10.0)), beta};
    const auto res = check_restart_identity(p, spec, beta_hat, x_restart);
    auto describe = [&] {
      return json{{"seed", seed}, {"P", io::to_json(p)}, {"reward", io::to_json(spec)},
                  {"beta_hat", beta_hat}, {"x_restart", x_restart}};
    };
    identity.record(res.identity.lhs, res.identity.rhs, describe);
    rho.record(res.rho.lhs, res.rho.rhs + 1e-12, describe);
  }
  return make_report("restart", opt, {identity, rho}, timer);
}

// ---------------------------------------------------------------------------

SuiteReport mixing_suite(const VerifyOptions& opt) {
  Timer timer;
  constexpr Step kHorizon = 4096;
  PropertyTally interp{"lem7_interpolation"}, constant{"lem7_constant"};
  std::uint64_t idx = 0;
  for (int i = 0; i < 24; ++i) {
    const bool use_constant = i % 2 == 1;
    Schedule s = Schedule::constant(TransitionMatrix::identity(1));
    std::uint64_t seed = 0;
    // Redraw until tau fits well inside the horizon.
    for (;;) {
      seed = case_seed(opt.master_seed, kMixSalt, idx++);
      RandomStream rng(seed);
      auto a = random_irreducible(rng, 3);
      if (use_constant) {
        s = Schedule::constant(a);
      } else {
        s = Schedule::interpolation(a, random_irreducible(rng, 3), random_drift(rng, 0.5, 2.0));
      }
      if (s.rho_cap() > 0.0 && lem7_tau(kHorizon, s.rho_cap()) <= kHorizon / 2) break;
    }
    const double rho = s.rho_cap();
    const Step tau = lem7_tau(kHorizon, rho);
    std::vector<Step> points{tau};
    for (Step t : log_checkpoint_grid(kHorizon, 20)) {
      if (t > tau) points.push_back(t);
    }
    PropertyTally& tally = use_constant ? constant : interp;
    for (Step t : points) {
      const auto res = lem7_mixing_check(s, t, kHorizon, rho);
      tally.record(res.lhs, res.rhs, [&] {
        return json{{"seed", seed}, {"t", t}, {"tau", tau}, {"rho", rho},
                    {"schedule", io::to_json(s)}};
      });
    }
  }
  return make_report("mixing", opt, {interp, constant}, timer);
}

SuiteReport coverage_suite(const VerifyOptions& opt) {
  Timer timer;
  PropertyTally coverage{"ah_coverage"}, zero{"ah_zero_noise"}, monotone{"ah_envelope_monotone"};

  AhCoverageConfig cfg;
  cfg.master_seed = case_seed(opt.master_seed, kCoverSalt, 0);
  const auto res = ah_coverage_check(cfg);
  coverage.record(res.fraction, res.threshold, [&] {
    return json{{"master_seed", cfg.master_seed}, {"violations", res.violations},
                {"replications", res.replications}, {"worst_ratio", res.worst_ratio}};
  });

  AhCoverageConfig quiet = cfg;
  quiet.noise = {NoiseKind::zero, 0.0};
  quiet.replications = 50;
  const auto quiet_res = ah_coverage_check(quiet);
  zero.record(static_cast<double>(quiet_res.violations), 0.0, [&] { return json{{"violations", quiet_res.violations}}; });

  AhCoverageConfig tight = cfg;
  tight.delta = 0.01;
  const auto wide = ah_envelope(tight);
  const auto base = ah_envelope(cfg);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < base.size(); ++k) worst = std::max(worst, base[k] - wide[k]);
  monotone.record(worst, 0.0, [] { return json{{"delta_small", 0.01}, {"delta", 0.05}}; });

  return make_report("coverage", opt, {coverage, zero, monotone}, timer);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"prop1",   "thm1",   "lemmas",  "lipschitz",
                                              "restart", "mixing", "coverage"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& options) {
  static const std::map<std::string, SuiteReport (*)(const VerifyOptions&)> table{
      {"prop1", prop1_suite},     {"thm1", thm1_suite},       {"lemmas", lemmas_suite},
      {"lipschitz", lipschitz_suite}, {"restart", restart_suite}, {"mixing", mixing_suite},
      {"coverage", coverage_suite}};
  const auto it = table.find(name);
  if (it == table.end()) throw InvalidArgument("unknown suite '" + name + "'");
  return it->second(options);
}

}  // namespace adiatrack::verify
