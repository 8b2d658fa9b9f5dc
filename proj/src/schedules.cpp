#include "adiatrack/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace adiatrack {

namespace {

constexpr double kCertificateRelTol = 1e-9;
constexpr double kCertificateAbsTol = 1e-15;

void require_irreducible(const TransitionMatrix& p, const char* what) {
  if (!is_irreducible(p)) {
    throw InvalidArgument(std::string(what) + ": reducible matrix " + p.to_string());
  }
}

void require_irreducible_segment(const TransitionMatrix& a, const TransitionMatrix& b,
                                 const char* what) {
  if (a.size() != b.size()) throw InvalidArgument(std::string(what) + ": dimension mismatch");
  for (double w : {0.0, 0.5, 1.0}) require_irreducible(TransitionMatrix::mix(a, b, w), what);
}

double step_increment(const DriftParams& params, Step t) { return params.drift_cap(t); }

}  // namespace

void DriftParams::validate() const {
  if (!(c_p > 0.0)) throw InvalidArgument("DriftParams: c_p must be positive");
  if (!(gamma_p >= 0.0)) throw InvalidArgument("DriftParams: gamma_p must be non-negative");
  if (!(c_pi > 0.0 && c_pi <= 1.0)) throw InvalidArgument("DriftParams: c_pi must lie in (0,1]");
  if (!(gamma_pi >= 0.0)) throw InvalidArgument("DriftParams: gamma_pi must be non-negative");
}

double DriftParams::drift_cap(Step t) const {
  if (std::isinf(gamma_p)) return 0.0;
  return c_p / std::pow(static_cast<double>(t), gamma_p);
}

double DriftParams::pi_floor(Step t) const {
  return c_pi / std::pow(static_cast<double>(t), gamma_pi);
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::interpolation: return "interpolation";
    case ScheduleKind::cyclic: return "cyclic";
    case ScheduleKind::shrinking_state: return "shrinking-state";
    case ScheduleKind::restart_wrapped: return "restart-wrapped";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  for (auto k : {ScheduleKind::constant, ScheduleKind::interpolation, ScheduleKind::cyclic,
                 ScheduleKind::shrinking_state, ScheduleKind::restart_wrapped}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown schedule kind '" + name + "'");
}

TransitionMatrix restart_wrap(const TransitionMatrix& p, double beta, double beta_hat,
                              State x_restart) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("restart_wrap: beta must lie in (0,1)");
  if (!(beta_hat > beta && beta_hat < 1.0)) {
    throw InvalidArgument("restart_wrap: beta_hat must lie in (beta, 1)");
  }
  if (x_restart >= p.size()) throw InvalidArgument("restart_wrap: x_restart out of range");
  const std::size_t n = p.size();
  const double keep = beta / beta_hat;
  std::vector<double> e(n * n);
  for (State x = 0; x < n; ++x) {
    for (State y = 0; y < n; ++y) {
      e[x * n + y] = keep * p(x, y) + (y == x_restart ? 1.0 - keep : 0.0);
    }
  }
  for (double& v : e) v = std::clamp(v, 0.0, 1.0);
  return TransitionMatrix(n, std::move(e));
}

Schedule Schedule::constant(TransitionMatrix p, DriftParams params) {
  params.validate();
  require_irreducible(p, "constant schedule");
  Schedule s;
  s.kind_ = ScheduleKind::constant;
  s.n_ = p.size();
  s.params_ = params;
  s.rho_cap_ = ergodicity_coefficient(p);
  s.mats_.push_back(std::move(p));
  return s;
}

Schedule Schedule::interpolation(TransitionMatrix p_start, TransitionMatrix p_end,
                                 DriftParams params) {
  params.validate();
  require_irreducible_segment(p_start, p_end, "interpolation schedule");
  const double length = matrix_tv_distance(p_start, p_end);
  if (length == 0.0) return constant(std::move(p_start), params);
  Schedule s;
  s.kind_ = ScheduleKind::interpolation;
  s.n_ = p_start.size();
  s.params_ = params;
  // rho is convex in P, so the segment maximum sits at an endpoint.
  s.rho_cap_ = std::max(ergodicity_coefficient(p_start), ergodicity_coefficient(p_end));
  s.segment_lengths_ = {length};
  s.perimeter_ = length;
  s.mats_ = {std::move(p_start), std::move(p_end)};
  return s;
}

Schedule Schedule::cyclic(std::vector<TransitionMatrix> mats, DriftParams params) {
  params.validate();
  if (mats.size() < 2) throw InvalidArgument("cyclic schedule: need at least two matrices");
  if (!(params.gamma_p > 0.0 && params.gamma_p < 1.0)) {
    throw InvalidArgument("cyclic schedule: gamma_p must lie in (0,1)");
  }
  Schedule s;
  s.kind_ = ScheduleKind::cyclic;
  s.n_ = mats.front().size();
  s.params_ = params;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const auto& a = mats[i];
    const auto& b = mats[(i + 1) % mats.size()];
    require_irreducible_segment(a, b, "cyclic schedule");
    s.segment_lengths_.push_back(matrix_tv_distance(a, b));
    s.perimeter_ += s.segment_lengths_.back();
    s.rho_cap_ = std::max(s.rho_cap_, ergodicity_coefficient(a));
  }
  if (s.perimeter_ == 0.0) return constant(std::move(mats.front()), params);
  s.mats_ = std::move(mats);
  return s;
}

Schedule Schedule::shrinking_state(DriftParams params, Step drift_scan) {
  params.validate();
  if (!(params.gamma_pi > 0.0)) {
    throw InvalidArgument("shrinking-state schedule: gamma_pi must be positive");
  }
  if (params.c_pi > 1.0 / 3.0) {
    throw InvalidArgument("shrinking-state schedule: c_pi must be at most 1/3");
  }
  Schedule s;
  s.kind_ = ScheduleKind::shrinking_state;
  s.n_ = 3;
  s.params_ = params;
  s.rho_cap_ = 1.0 / 3.0;
  TransitionMatrix prev = s.shrinking_matrix(1);
  for (Step t = 1; t <= drift_scan; ++t) {
    TransitionMatrix next = s.shrinking_matrix(t + 1);
    const double drift = matrix_tv_distance(prev, next);
    const double cap = params.drift_cap(t);
    if (drift > cap * (1.0 + kCertificateRelTol) + kCertificateAbsTol) {
      throw CertificateViolation("drift", t, drift, cap);
    }
    prev = std::move(next);
  }
  return s;
}

Schedule Schedule::restart_wrapped(Schedule inner, double beta, double beta_hat,
                                   State x_restart, DriftParams params) {
  params.validate();
  // Validates beta, beta_hat and x_restart.
  const TransitionMatrix first = restart_wrap(inner.matrix_at(1), beta, beta_hat, x_restart);
  require_irreducible(first, "restart-wrapped schedule");
  Schedule s;
  s.kind_ = ScheduleKind::restart_wrapped;
  s.n_ = inner.n();
  s.params_ = params;
  s.rho_cap_ = (beta / beta_hat) * inner.rho_cap();
  s.beta_ = beta;
  s.beta_hat_ = beta_hat;
  s.x_restart_ = x_restart;
  s.inner_ = std::make_shared<const Schedule>(std::move(inner));
  return s;
}

TransitionMatrix Schedule::shrinking_matrix(Step t) const {
  const double m = params_.pi_floor(t);
  const double big = 0.5 * (1.0 - m);
  const double third = 1.0 / 3.0;
  // Metropolis acceptance with a uniform proposal over all three states.
  const double to_small = third * (m / big);
  const double stay_big = 1.0 - third - to_small;
  return TransitionMatrix(3, {stay_big, third, to_small,  //
                              third, stay_big, to_small,  //
                              third, third, third});
}

TransitionMatrix Schedule::matrix_from_progress(Step t, double progress) const {
  switch (kind_) {
    case ScheduleKind::constant:
      return mats_.front();
    case ScheduleKind::interpolation:
      return TransitionMatrix::mix(mats_[0], mats_[1], progress);
    case ScheduleKind::cyclic: {
      double pos = std::fmod(progress, perimeter_);
      for (std::size_t i = 0; i < mats_.size(); ++i) {
        const double len = segment_lengths_[i];
        if (len > 0.0 && pos < len) {
          return TransitionMatrix::mix(mats_[i], mats_[(i + 1) % mats_.size()],
                                       std::min(pos / len, 1.0));
        }
        pos -= len;
      }
      return mats_.front();
    }
    case ScheduleKind::shrinking_state:
      return shrinking_matrix(t);
    case ScheduleKind::restart_wrapped:
      break;
  }
  throw InvalidArgument("matrix_from_progress: unsupported kind");
}

TransitionMatrix Schedule::matrix_at(Step t) const {
  if (t == 0) throw InvalidArgument("matrix_at: steps are indexed from t = 1");
  Cursor c(*this);
  while (c.t() < t) c.advance();
  return c.matrix();
}

Schedule::Cursor::Cursor(const Schedule& s) : schedule_(&s) {
  if (s.kind_ == ScheduleKind::restart_wrapped) {
    inner_ = std::unique_ptr<Cursor>(new Cursor(*s.inner_));
  }
  refresh();
}

void Schedule::Cursor::advance() {
  const Schedule& s = *schedule_;
  switch (s.kind_) {
    case ScheduleKind::interpolation:
      progress_ = std::min(1.0, progress_ + step_increment(s.params_, t_) / s.perimeter_);
      break;
    case ScheduleKind::cyclic:
      progress_ += step_increment(s.params_, t_);
      break;
    case ScheduleKind::restart_wrapped:
      inner_->advance();
      break;
    default:
      break;
  }
  ++t_;
  refresh();
}

void Schedule::Cursor::refresh() {
  const Schedule& s = *schedule_;
  if (s.kind_ == ScheduleKind::restart_wrapped) {
    matrix_ = restart_wrap(inner_->matrix(), s.beta_, s.beta_hat_, s.x_restart_);
  } else if (s.kind_ == ScheduleKind::constant) {
    if (matrix_.size() == 0) matrix_ = s.mats_.front();
  } else {
    matrix_ = s.matrix_from_progress(t_, progress_);
  }
}

void DriftReport::throw_if_failed() const {
  if (violation) {
    throw CertificateViolation(violation->bound, violation->t, violation->measured,
                               violation->declared);
  }
}

DriftReport verify_drift(const Schedule& s, Step t_max, Step exact_limit) {
  if (t_max < 2) throw InvalidArgument("verify_drift: t_max must be at least 2");
  const DriftParams& params = s.params();
  DriftReport report;
  report.t_max = t_max;
  report.exact_until = std::min(t_max, exact_limit);

  std::set<Step> pi_steps;
  for (Step t = 1; t <= report.exact_until; ++t) pi_steps.insert(t);
  if (t_max > exact_limit) {
    const double lo = std::log10(static_cast<double>(exact_limit));
    const double hi = std::log10(static_cast<double>(t_max));
    const int per_decade = 50;
    const int count = static_cast<int>(std::ceil((hi - lo) * per_decade));
    for (int k = 1; k <= count; ++k) {
      const double e = lo + (hi - lo) * k / count;
      pi_steps.insert(std::min<Step>(t_max, static_cast<Step>(std::llround(std::pow(10.0, e)))));
    }
    pi_steps.insert(t_max);
  }

  auto record = [&](const char* bound, Step t, double measured, double declared) {
    if (!report.violation) report.violation = DriftViolation{bound, t, measured, declared};
  };

  auto cursor = s.cursor();
  TransitionMatrix current = cursor.matrix();
  for (Step t = 1; t <= t_max; ++t) {
    const double rho = ergodicity_coefficient(current);
    report.max_rho = std::max(report.max_rho, rho);
    if (rho > s.rho_cap() * (1.0 + kCertificateRelTol) + kCertificateAbsTol) {
      record("rho", t, rho, s.rho_cap());
    }
    if (pi_steps.contains(t)) {
      const double pi_min = stationary_distribution(current, 1e-10).min();
      const double floor = params.pi_floor(t);
      report.min_scaled_pi = std::min(
          report.min_scaled_pi, pi_min * std::pow(static_cast<double>(t), params.gamma_pi));
      ++report.pi_checkpoints;
      if (pi_min < floor * (1.0 - kCertificateRelTol)) record("pi_min", t, pi_min, floor);
    }
    if (t == t_max) break;
    cursor.advance();
    TransitionMatrix next = cursor.matrix();
    const double drift = matrix_tv_distance(current, next);
    const double cap = params.drift_cap(t);
    const double scaled = std::isinf(params.gamma_p)
                              ? drift
                              : drift * std::pow(static_cast<double>(t), params.gamma_p);
    report.max_scaled_drift = std::max(report.max_scaled_drift, scaled);
    if (drift > cap * (1.0 + kCertificateRelTol) + kCertificateAbsTol) {
      record("drift", t, drift, cap);
    }
    current = std::move(next);
  }
  return report;
}

}  // namespace adiatrack
