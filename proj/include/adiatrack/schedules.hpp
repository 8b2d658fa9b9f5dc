#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adiatrack/markov.hpp"

namespace adiatrack {

inline constexpr double kInfiniteExponent = std::numeric_limits<double>::infinity();

/// Declared drift certificate: ||P(t+1) - P(t)|| <= c_p / t^gamma_p and
/// pi_min(t) >= c_pi / t^gamma_pi for every t >= 1.
struct DriftParams {
  double c_p = 1.0;
  double gamma_p = kInfiniteExponent;
  double c_pi = 1.0;
  double gamma_pi = 0.0;

  void validate() const;
  double drift_cap(Step t) const;
  double pi_floor(Step t) const;
};

enum class ScheduleKind { constant, interpolation, cyclic, shrinking_state, restart_wrapped };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

/// P~ = (beta/beta_hat) P + (1 - beta/beta_hat) * (all mass to x_restart).
TransitionMatrix restart_wrap(const TransitionMatrix& p, double beta, double beta_hat,
                              State x_restart);

/// Immutable generator of the sequence P(1), P(2), ...
///
/// matrix_at(t) is a pure function of the construction parameters and t. For
/// sequential access use cursor(), which produces bit-identical matrices in
/// O(1) per step; matrix_at replays the same arithmetic from t = 1.
class Schedule {
 public:
  class Cursor {
   public:
    Step t() const { return t_; }
    const TransitionMatrix& matrix() const { return matrix_; }
    void advance();

   private:
    friend class Schedule;
    explicit Cursor(const Schedule& s);
    void refresh();

    const Schedule* schedule_;
    Step t_ = 1;
    double progress_ = 0.0;  // interpolation weight or cyclic arc length
    std::unique_ptr<Cursor> inner_;
    TransitionMatrix matrix_;
  };

  static Schedule constant(TransitionMatrix p, DriftParams params = {});
  static Schedule interpolation(TransitionMatrix p_start, TransitionMatrix p_end,
                                DriftParams params);
  static Schedule cyclic(std::vector<TransitionMatrix> mats, DriftParams params);
  /// 3-state reversible chain whose stationary law is ((1-m)/2, (1-m)/2, m) with
  /// m = c_pi / t^gamma_pi. Throws if the measured drift over t <= drift_scan
  /// exceeds the declared c_p / t^gamma_p.
  static Schedule shrinking_state(DriftParams params, Step drift_scan = 10'000);
  static Schedule restart_wrapped(Schedule inner, double beta, double beta_hat,
                                  State x_restart, DriftParams params);

  ScheduleKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  const DriftParams& params() const { return params_; }
  /// Certified uniform upper bound on the ergodicity coefficient of every P(t).
  double rho_cap() const { return rho_cap_; }

  TransitionMatrix matrix_at(Step t) const;
  Cursor cursor() const { return Cursor(*this); }

  // Kind-specific data, exposed for serialization.
  const std::vector<TransitionMatrix>& mats() const { return mats_; }
  const Schedule* inner() const { return inner_.get(); }
  double beta() const { return beta_; }
  double beta_hat() const { return beta_hat_; }
  State x_restart() const { return x_restart_; }

 private:
  Schedule() = default;
  TransitionMatrix matrix_from_progress(Step t, double progress) const;
  TransitionMatrix shrinking_matrix(Step t) const;

  ScheduleKind kind_ = ScheduleKind::constant;
  std::size_t n_ = 0;
  DriftParams params_;
  double rho_cap_ = 0.0;
  std::vector<TransitionMatrix> mats_;
  std::vector<double> segment_lengths_;
  double perimeter_ = 0.0;
  std::shared_ptr<const Schedule> inner_;
  double beta_ = 0.0;
  double beta_hat_ = 0.0;
  State x_restart_ = 0;
};

struct DriftViolation {
  std::string bound;  // "drift", "pi_min" or "rho"
  Step t = 0;
  double measured = 0.0;
  double declared = 0.0;
};

struct DriftReport {
  Step t_max = 0;
  double max_scaled_drift = 0.0;  // max_t t^gamma_p * ||P(t+1) - P(t)|| (raw drift if gamma_p = inf)
  double min_scaled_pi = std::numeric_limits<double>::infinity();  // min_t t^gamma_pi * pi_min(t)
  double max_rho = 0.0;
  Step exact_until = 0;        // stationary laws solved at every t up to here
  std::size_t pi_checkpoints = 0;  // stationary solves performed in total
  std::optional<DriftViolation> violation;

  bool passed() const { return !violation.has_value(); }
  /// Throws CertificateViolation naming t and the bound.
  void throw_if_failed() const;
};

/// Scans t = 1..t_max. Drift and rho are checked at every step; stationary laws
/// at every step up to exact_limit and at logarithmically spaced checkpoints beyond.
DriftReport verify_drift(const Schedule& s, Step t_max, Step exact_limit = 10'000);

}  // namespace adiatrack
