#include "adiatrack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>

namespace adiatrack::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::uint64_t> seeds_from_json(const json& j) {
  std::vector<std::uint64_t> seeds;
  if (j.is_array()) {
    for (const auto& s : j) seeds.push_back(s.get<std::uint64_t>());
  } else if (j.is_object()) {
    const auto first = j.at("first").get<std::uint64_t>();
    const auto count = j.at("count").get<std::uint64_t>();
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(first + i);
  } else {
    throw InvalidArgument("config: 'seeds' must be a list or {\"first\", \"count\"}");
  }
  if (seeds.empty()) throw InvalidArgument("config: seed list is empty");
  return seeds;
}

/// Runs f(i) for i in [0, n) on a small pool; results are written by index so
/// the merge is independent of scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::pair<TransitionMatrix, std::optional<TransitionMatrix>> endpoints(const json& schedule) {
  if (schedule.contains("p_start")) {
    return {io::matrix_from_json(schedule.at("p_start")),
            io::matrix_from_json(schedule.at("p_end"))};
  }
  if (schedule.contains("mats")) {
    const auto& mats = schedule.at("mats");
    if (mats.size() >= 2) return {io::matrix_from_json(mats[0]), io::matrix_from_json(mats[1])};
    if (mats.size() == 1) return {io::matrix_from_json(mats[0]), std::nullopt};
  }
  if (schedule.contains("p")) return {io::matrix_from_json(schedule.at("p")), std::nullopt};
  throw InvalidArgument("sweep: base schedule carries no matrices");
}

json quantile_rows_json(std::span<const QuantileRow> rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"t", r.t}, {"median", r.median}, {"q25", r.q25}, {"q75", r.q75}});
  }
  return out;
}

json slope_json(const SlopeEstimate& s) {
  return {{"slope", std::isnan(s.slope) ? json() : json(s.slope)},
          {"intercept", std::isnan(s.intercept) ? json() : json(s.intercept)},
          {"t_lo", s.t_lo},
          {"t_hi", s.t_hi},
          {"n_points", s.n_points},
          {"residual_rms", s.residual_rms}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  ExperimentConfig c;
  if (!j.contains("schedule")) throw InvalidArgument("config: missing 'schedule'");
  c.schedule = io::to_json(io::schedule_from_json(j.at("schedule")));
  if (!j.contains("reward")) throw InvalidArgument("config: missing 'reward'");
  c.reward = io::reward_from_json(j.at("reward"));
  c.rate = io::rate_from_json(j.value("rate", json()));
  c.noise = io::noise_from_json(j.value("noise", json()));
  c.t_max = j.value("t_max", c.t_max);
  c.checkpoints_per_decade = j.value("checkpoints_per_decade", c.checkpoints_per_decade);
  c.seeds = seeds_from_json(j.value("seeds", json::array({1})));
  const std::string learner = j.value("learner", std::string("td0"));
  if (learner == "td0") {
    c.learner = Learner::td0;
  } else if (learner == "q") {
    c.learner = Learner::q;
  } else {
    throw InvalidArgument("config: learner must be \"td0\" or \"q\"");
  }
  c.n_actions = j.value("n_actions", std::size_t{1});
  const std::string bootstrap = j.value("bootstrap", std::string("sampled"));
  if (bootstrap == "sampled") {
    c.bootstrap = Bootstrap::sampled;
  } else if (bootstrap == "expected") {
    c.bootstrap = Bootstrap::expected;
  } else {
    throw InvalidArgument("config: bootstrap must be \"sampled\" or \"expected\"");
  }
  c.x0 = j.value("x0", State{0});
  if (c.t_max < 1) throw InvalidArgument("config: t_max must be positive");
  if (c.checkpoints_per_decade < 1) throw InvalidArgument("config: checkpoints_per_decade must be positive");
  if (c.learner == Learner::td0 && c.n_actions != 1) {
    throw InvalidArgument("config: td0 runs take n_actions = 1");
  }
  const std::size_t n = io::schedule_from_json(c.schedule).n();
  if (c.reward.r.size() != n) {
    throw InvalidArgument("config: reward has " + std::to_string(c.reward.r.size()) +
                          " entries, schedule has " + std::to_string(n) + " states");
  }
  if (c.x0 >= n) throw InvalidArgument("config: x0 out of range");
  return c;
}

json ExperimentConfig::to_json() const {
  return {{"schedule", schedule},
          {"reward", io::to_json(reward)},
          {"rate", io::to_json(rate)},
          {"noise", io::to_json(noise)},
          {"t_max", t_max},
          {"checkpoints_per_decade", checkpoints_per_decade},
          {"seeds", seeds},
          {"learner", learner == Learner::td0 ? "td0" : "q"},
          {"n_actions", n_actions},
          {"bootstrap", bootstrap == Bootstrap::sampled ? "sampled" : "expected"},
          {"x0", x0}};
}

ExponentTriple ExperimentConfig::exponents() const {
  const DriftParams params = io::drift_params_from_json(schedule.at("params"));
  return {params.gamma_p, rate.gamma_alpha, params.gamma_pi};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile: no values");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<QuantileRow> summarize(std::span<const TrackingTrace> traces) {
  std::vector<QuantileRow> rows;
  if (traces.empty()) return rows;
  const std::size_t n_cp = traces.front().checkpoints.size();
  for (const auto& tr : traces) {
    if (tr.checkpoints.size() != n_cp) throw InvalidArgument("summarize: traces use different grids");
  }
  for (std::size_t k = 0; k < n_cp; ++k) {
    std::vector<double> errs;
    errs.reserve(traces.size());
    for (const auto& tr : traces) errs.push_back(tr.checkpoints[k].sup_error);
    rows.push_back({traces.front().checkpoints[k].t, quantile(errs, 0.5), quantile(errs, 0.25),
                    quantile(errs, 0.75)});
  }
  return rows;
}

SlopeEstimate estimate_slope(std::span<const QuantileRow> rows, Step t_lo, Step t_hi) {
  SlopeEstimate out;
  out.t_lo = t_lo;
  out.t_hi = t_hi;
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.t < t_lo || r.t > t_hi || !(r.median > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(r.t)));
    ys.push_back(std::log(r.median));
  }
  out.n_points = xs.size();
  if (xs.size() < 2) {
    out.slope = out.intercept = kNaN;
    return out;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (out.intercept + out.slope * xs[i]);
    ss += r * r;
  }
  out.residual_rms = std::sqrt(ss / n);
  return out;
}

double window_mean(std::span<const QuantileRow> rows, Step t_lo, Step t_hi) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : rows) {
    if (r.t < t_lo || r.t > t_hi) continue;
    sum += r.median;
    ++count;
  }
  return count == 0 ? kNaN : sum / static_cast<double>(count);
}

Thm2Constants default_constants(const ExperimentConfig& config, const Schedule& schedule) {
  Thm2Constants c;
  const double beta = config.reward.beta;
  const double r_max = config.reward.r_max();
  c.beta = beta;
  c.rho = std::clamp(schedule.rho_cap(), 1e-12, 1.0 - 1e-12);
  c.c_alpha = config.rate.c_alpha;
  c.c_pi = schedule.params().c_pi;
  c.c_p = schedule.params().c_p;
  c.r_max_eff = r_max / (1.0 - beta);
  c.k = beta * r_max / ((1.0 - beta) * (1.0 - beta));
  return c;
}

TrackResult run_track(const ExperimentConfig& config, unsigned threads) {
  const Schedule schedule = config.build_schedule();
  TrackResult result;
  result.hash = config.hash();
  result.drift = verify_drift(schedule, std::max<Step>(config.t_max, 2));
  result.drift.throw_if_failed();

  const auto grid = config.grid();
  const std::string echo = io::canonical_dump(config.to_json());
  result.traces.resize(config.seeds.size());
  parallel_for(config.seeds.size(), threads, [&](std::size_t i) {
    TrackOptions options;
    options.x0 = config.x0;
    options.bootstrap = config.bootstrap;
    options.config_echo = echo;
    const std::uint64_t seed = config.seeds[i];
    result.traces[i] =
        config.learner == Learner::td0
            ? td0_track(schedule, config.reward, config.rate, config.noise, config.t_max, seed,
                        grid, options)
            : q_track(schedule, config.reward, config.n_actions, config.rate, config.noise,
                      config.t_max, seed, grid, options);
  });

  result.summary = summarize(result.traces);
  result.slope = estimate_slope(result.summary, config.t_max / 100, config.t_max);

  json& s = result.summary_json;
  s["spec_version"] = io::kSpecVersion;
  s["config_hash"] = result.hash;
  s["config"] = config.to_json();
  s["drift_report"] = io::to_json(result.drift);
  s["checkpoints"] = quantile_rows_json(result.summary);
  s["final_median"] = result.summary.empty() ? 0.0 : result.summary.back().median;
  s["slope"] = slope_json(result.slope);

  double max_norm = 0.0;
  bool inside = true;
  for (const auto& tr : result.traces) {
    max_norm = std::max(max_norm, tr.max_iterate_norm);
    inside = inside && !tr.first_ball_exit;
  }
  s["boundedness"] = {{"ball_radius", result.traces.front().ball_radius},
                      {"max_iterate_norm", max_norm},
                      {"inside", inside}};

  const ExponentTriple exps = config.exponents();
  const RegimeClass regime = classify_regime(exps);
  s["exponents"] = io::to_json(exps);
  s["regime"] = to_string(regime.regime);
  s["same_rate_as_static"] = regime.same_rate_as_static;
  s["conjectured_adiabatic"] = regime.conjectured_adiabatic;
  try {
    const Thm2Constants consts = default_constants(config, schedule);
    s["thm2_constants"] = io::to_json(consts);
    s["thm2"] = io::to_json(thm2_bound(consts, exps, std::max<Step>(config.t_max, 2)));
  } catch (const InvalidArgument& e) {
    s["thm2"] = nullptr;
    s["thm2_error"] = e.what();
  }
  return result;
}

TrackResult cmd_track(const ExperimentConfig& config, const std::filesystem::path& out,
                      unsigned threads) {
  TrackResult result = run_track(config, threads);
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    io::write_text(out / io::trace_file_name(result.hash, config.seeds[i]),
                   io::trace_csv(result.traces[i]));
  }
  io::write_text(out / "summary.json", result.summary_json.dump(2) + "\n");
  return result;
}

SweepGrid SweepGrid::from_json(const json& j) {
  SweepGrid g;
  auto list = [&](const char* key, std::vector<double>& dst, bool allow_inf) {
    if (!j.contains(key)) throw InvalidArgument(std::string("grid: missing '") + key + "'");
    for (const auto& v : j.at(key)) {
      dst.push_back(allow_inf ? io::exponent_from_json(v) : v.get<double>());
    }
    if (dst.empty()) throw InvalidArgument(std::string("grid: '") + key + "' is empty");
  };
  list("gamma_p", g.gamma_p, true);
  list("gamma_alpha", g.gamma_alpha, false);
  list("gamma_pi", g.gamma_pi, false);
  return g;
}

ExperimentConfig cell_config(const ExperimentConfig& base, const ExponentTriple& exps) {
  exps.validate();
  ExperimentConfig cell = base;
  cell.rate.gamma_alpha = exps.gamma_alpha;
  cell.rate.validate();

  DriftParams params = io::drift_params_from_json(base.schedule.at("params"));
  params.gamma_p = exps.gamma_p;
  params.gamma_pi = exps.gamma_pi;

  if (exps.gamma_pi > 0.0) {
    cell.schedule = io::to_json(Schedule::shrinking_state(params));
  } else {
    auto [a, b] = endpoints(base.schedule);
    if (std::isinf(exps.gamma_p)) {
      cell.schedule = io::to_json(Schedule::constant(a, params));
    } else if (!b) {
      throw InvalidArgument("base schedule has a single matrix; drifting cells need two");
    } else if (exps.gamma_p >= 1.0) {
      cell.schedule = io::to_json(Schedule::interpolation(a, *b, params));
    } else {
      cell.schedule = io::to_json(Schedule::cyclic({a, *b}, params));
    }
  }
  const std::size_t n = io::schedule_from_json(cell.schedule).n();
  if (cell.reward.r.size() != n) {
    throw InvalidArgument("reward has " + std::to_string(cell.reward.r.size()) +
                          " entries but the cell schedule has " + std::to_string(n) + " states");
  }
  return cell;
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, const ExperimentConfig& base,
                                const std::optional<std::filesystem::path>& out,
                                unsigned threads) {
  std::vector<ExponentTriple> cells;
  for (double gp : grid.gamma_p) {
    for (double ga : grid.gamma_alpha) {
      for (double gpi : grid.gamma_pi) cells.push_back({gp, ga, gpi});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const ExponentTriple& x, const ExponentTriple& y) {
    return std::tie(x.gamma_p, x.gamma_alpha, x.gamma_pi) <
           std::tie(y.gamma_p, y.gamma_alpha, y.gamma_pi);
  });

  std::vector<SweepRow> rows(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    SweepRow& row = rows[i];
    row.exps = cells[i];
    const RegimeClass regime = classify_regime(cells[i]);
    row.regime = to_string(regime.regime);
    row.same_rate_as_static = regime.same_rate_as_static;
    row.conjectured_adiabatic = regime.conjectured_adiabatic;
    try {
      const ExperimentConfig cell = cell_config(base, cells[i]);
      row.kind = cell.schedule.at("kind").get<std::string>();
      const TrackResult res =
          out ? cmd_track(cell, *out / cell.hash(), threads) : run_track(cell, threads);
      row.hash = res.hash;
      row.status = "ok";
      row.final_median = res.summary.back().median;
      row.slope = res.slope;
      row.first_decade = window_mean(res.summary, cell.t_max / 100, cell.t_max / 10);
      row.last_decade = window_mean(res.summary, cell.t_max / 10, cell.t_max);
    } catch (const std::exception& e) {
      row.status = "skipped";
      row.reason = e.what();
      row.final_median = row.first_decade = row.last_decade = kNaN;
      row.slope.slope = row.slope.intercept = kNaN;
    }
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  auto num = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
  auto exponent = [](double v) { return std::isinf(v) ? std::string("inf") : io::format_double(v); };
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out =
      "gamma_p,gamma_alpha,gamma_pi,kind,regime,same_rate_as_static,conjectured_adiabatic,"
      "status,final_median,slope,slope_points,first_decade,last_decade,config_hash,reason\n";
  for (const auto& r : rows) {
    out += exponent(r.exps.gamma_p) + "," + io::format_double(r.exps.gamma_alpha) + "," +
           io::format_double(r.exps.gamma_pi) + "," + r.kind + "," + r.regime + "," +
           (r.same_rate_as_static ? "true" : "false") + "," +
           (r.conjectured_adiabatic ? "true" : "false") + "," + r.status + "," +
           num(r.final_median) + "," + num(r.slope.slope) + "," +
           std::to_string(r.slope.n_points) + "," + num(r.first_decade) + "," +
           num(r.last_decade) + "," + r.hash + "," + quote(r.reason) + "\n";
  }
  return out;
}

}  // namespace adiatrack::harness
