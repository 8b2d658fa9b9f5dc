#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adiatrack/error.hpp"
#include "adiatrack/rng.hpp"

namespace adiatrack {

using State = std::size_t;
using Step = std::uint64_t;

/// Tolerance on row sums and probability-vector sums at construction.
inline constexpr double kStochasticTol = 1e-12;

/// Probability vector over a finite state space.
class Distribution {
 public:
  Distribution() = default;
  /// Throws InvalidArgument unless entries lie in [0,1] and sum to 1 within kStochasticTol.
  explicit Distribution(std::vector<double> probs);

  static Distribution point_mass(std::size_t n, State x);
  static Distribution uniform(std::size_t n);

  std::size_t size() const { return probs_.size(); }
  double operator[](State x) const { return probs_[x]; }
  std::span<const double> probs() const { return probs_; }
  double min() const;

 private:
  std::vector<double> probs_;
};

/// Dense row-stochastic matrix, row-major.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  /// Throws InvalidArgument unless every entry is in [0,1] and every row sums
  /// to 1 within kStochasticTol. Rows are never renormalized.
  TransitionMatrix(std::size_t n, std::vector<double> entries);
  explicit TransitionMatrix(const std::vector<std::vector<double>>& rows);

  static TransitionMatrix identity(std::size_t n);
  /// Every row equal to `row`.
  static TransitionMatrix rank_one(const Distribution& row);
  /// (1-w)·a + w·b; w in [0,1].
  static TransitionMatrix mix(const TransitionMatrix& a, const TransitionMatrix& b,
                              double w);

  std::size_t size() const { return n_; }
  double operator()(State x, State y) const { return entries_[x * n_ + y]; }
  std::span<const double> row(State x) const {
    return {entries_.data() + x * n_, n_};
  }
  std::span<const double> entries() const { return entries_; }

  TransitionMatrix operator*(const TransitionMatrix& rhs) const;
  bool operator==(const TransitionMatrix&) const = default;

  std::string to_string() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

/// Row vector times matrix without re-validation (intermediate folds).
std::vector<double> left_multiply(std::span<const double> v, const TransitionMatrix& p);

/// Half the l1 distance.
double tv_distance(const Distribution& lam, const Distribution& mu);
double tv_distance(std::span<const double> a, std::span<const double> b);

/// Maximum over rows of the row-wise total variation distance.
double matrix_tv_distance(const TransitionMatrix& p, const TransitionMatrix& q);

/// Dobrushin coefficient: max over row pairs of their TV distance. Cross-checked
/// internally against ergodicity_coefficient_overlap.
double ergodicity_coefficient(const TransitionMatrix& p);

/// 1 - min over row pairs of sum_y min(P[x1,y], P[x2,y]).
double ergodicity_coefficient_overlap(const TransitionMatrix& p);

/// Strong connectivity of the support graph {(x,y) : P[x,y] > 0}.
bool is_irreducible(const TransitionMatrix& p);

/// Unique pi with pi P = pi for irreducible P, by direct solve of (P^T - I) pi = 0
/// with the last equation replaced by sum(pi) = 1.
Distribution stationary_distribution(const TransitionMatrix& p, double tol = 1e-12);

/// trace(P) - 1; only defined for 2x2.
double second_eigenvalue_2x2(const TransitionMatrix& p);

/// lam0 · mats[0] · mats[1] · ...
Distribution propagate_marginal(const Distribution& lam0,
                                std::span<const TransitionMatrix> mats);

/// Sampled path of a time-inhomogeneous chain; states[k] for k = 0..T.
struct ChainPath {
  std::vector<State> states;
  std::uint64_t seed = 0;
};

class Schedule;

/// Inverse-CDF sampler owning one random stream. Each call to next() consumes
/// exactly one uniform draw.
class ChainSampler {
 public:
  ChainSampler(State x0, std::uint64_t seed);
  State state() const { return state_; }
  State next(const TransitionMatrix& p);

 private:
  State state_;
  RandomStream rng_;
};

/// Transition k (1 <= k <= t_max) draws x_k from row x_{k-1} of schedule.matrix_at(k).
ChainPath simulate(const Schedule& schedule, Step t_max, State x0, std::uint64_t seed);

}  // namespace adiatrack
