#include "adiatrack/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "adiatrack/linalg.hpp"
#include "adiatrack/schedules.hpp"

namespace adiatrack {

namespace {

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidArgument("Distribution: empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("Distribution: entry outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTol) {
    throw InvalidArgument("Distribution: entries sum to " + std::to_string(sum));
  }
}

Distribution Distribution::point_mass(std::size_t n, State x) {
  if (x >= n) throw InvalidArgument("point_mass: state out of range");
  std::vector<double> p(n, 0.0);
  p[x] = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::uniform(std::size_t n) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double Distribution::min() const { return *std::min_element(probs_.begin(), probs_.end()); }

TransitionMatrix::TransitionMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ == 0) throw InvalidArgument("TransitionMatrix: empty");
  if (entries_.size() != n_ * n_) {
    throw InvalidArgument("TransitionMatrix: expected " + std::to_string(n_ * n_) +
                          " entries, got " + std::to_string(entries_.size()));
  }
  for (State x = 0; x < n_; ++x) {
    double sum = 0.0;
    for (double p : row(x)) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("TransitionMatrix: entry outside [0,1] in row " +
                              std::to_string(x));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
      throw InvalidArgument("TransitionMatrix: row " + std::to_string(x) + " sums to " +
                            std::to_string(sum));
    }
  }
}

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<double>>& rows)
    : TransitionMatrix(rows.size(), [&] {
        std::vector<double> flat;
        flat.reserve(rows.size() * rows.size());
        for (const auto& r : rows) {
          if (r.size() != rows.size()) {
            throw InvalidArgument("TransitionMatrix: rows must be square");
          }
          flat.insert(flat.end(), r.begin(), r.end());
        }
        return flat;
      }()) {}

TransitionMatrix TransitionMatrix::identity(std::size_t n) {
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return TransitionMatrix(n, std::move(e));
}

TransitionMatrix TransitionMatrix::rank_one(const Distribution& row) {
  const std::size_t n = row.size();
  std::vector<double> e;
  e.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) e.insert(e.end(), row.probs().begin(), row.probs().end());
  return TransitionMatrix(n, std::move(e));
}

TransitionMatrix TransitionMatrix::mix(const TransitionMatrix& a, const TransitionMatrix& b,
                                       double w) {
  check_same_size(a.size(), b.size(), "TransitionMatrix::mix");
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("TransitionMatrix::mix: weight outside [0,1]");
  if (w == 0.0) return a;
  if (w == 1.0) return b;
  std::vector<double> e(a.entries_.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = (1.0 - w) * a.entries_[i] + w * b.entries_[i];
  }
  return TransitionMatrix(a.n_, std::move(e));
}

TransitionMatrix TransitionMatrix::operator*(const TransitionMatrix& rhs) const {
  check_same_size(n_, rhs.n_, "TransitionMatrix::operator*");
  std::vector<double> e(n_ * n_, 0.0);
  for (State x = 0; x < n_; ++x) {
    for (State k = 0; k < n_; ++k) {
      const double pxk = (*this)(x, k);
      if (pxk == 0.0) continue;
      for (State y = 0; y < n_; ++y) e[x * n_ + y] += pxk * rhs(k, y);
    }
  }
  // Products of stochastic matrices drift by a few ulps; clamp into range.
  for (double& v : e) v = std::clamp(v, 0.0, 1.0);
  return TransitionMatrix(n_, std::move(e));
}

std::string TransitionMatrix::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (State x = 0; x < n_; ++x) {
    os << (x ? ",[" : "[");
    for (State y = 0; y < n_; ++y) os << (y ? "," : "") << (*this)(x, y);
    os << ']';
  }
  os << ']';
  return os.str();
}

std::vector<double> left_multiply(std::span<const double> v, const TransitionMatrix& p) {
  check_same_size(v.size(), p.size(), "left_multiply");
  const std::size_t n = p.size();
  std::vector<double> out(n, 0.0);
  for (State x = 0; x < n; ++x) {
    if (v[x] == 0.0) continue;
    const auto r = p.row(x);
    for (State y = 0; y < n; ++y) out[y] += v[x] * r[y];
  }
  return out;
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size(), "tv_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

double tv_distance(const Distribution& lam, const Distribution& mu) {
  return tv_distance(lam.probs(), mu.probs());
}

double matrix_tv_distance(const TransitionMatrix& p, const TransitionMatrix& q) {
  check_same_size(p.size(), q.size(), "matrix_tv_distance");
  double m = 0.0;
  for (State x = 0; x < p.size(); ++x) m = std::max(m, tv_distance(p.row(x), q.row(x)));
  return m;
}

double ergodicity_coefficient_overlap(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  double min_overlap = 1.0;
  for (State a = 0; a < n; ++a) {
    for (State b = a + 1; b < n; ++b) {
      double overlap = 0.0;
      for (State y = 0; y < n; ++y) overlap += std::min(p(a, y), p(b, y));
      min_overlap = std::min(min_overlap, overlap);
    }
  }
  return n < 2 ? 0.0 : 1.0 - min_overlap;
}

double ergodicity_coefficient(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  double rho = 0.0;
  for (State a = 0; a < n; ++a) {
    for (State b = a + 1; b < n; ++b) rho = std::max(rho, tv_distance(p.row(a), p.row(b)));
  }
  if (std::abs(rho - ergodicity_coefficient_overlap(p)) > 1e-12) {
    throw NumericalError("ergodicity_coefficient: row-pair and overlap forms disagree for " +
                         p.to_string());
  }
  return rho;
}

bool is_irreducible(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<State> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const State x = stack.back();
      stack.pop_back();
      for (State y = 0; y < n; ++y) {
        const double w = transpose ? p(y, x) : p(x, y);
        if (w > 0.0 && !seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

Distribution stationary_distribution(const TransitionMatrix& p, double tol) {
  if (!is_irreducible(p)) {
    throw InvalidArgument("stationary_distribution: reducible matrix " + p.to_string());
  }
  const std::size_t n = p.size();
  std::vector<double> a(n * n);
  for (State y = 0; y < n; ++y) {
    for (State x = 0; x < n; ++x) a[y * n + x] = p(x, y) - (x == y ? 1.0 : 0.0);
  }
  std::vector<double> b(n, 0.0);
  for (State x = 0; x < n; ++x) a[(n - 1) * n + x] = 1.0;
  b[n - 1] = 1.0;
  auto pi = linalg::solve(std::move(a), std::move(b), n);
  for (double& v : pi) {
    if (v < 0.0 && v > -1e-14) v = 0.0;
  }
  Distribution result(std::move(pi));
  const double residual = tv_distance(left_multiply(result.probs(), p), result.probs());
  if (residual > tol) {
    throw NumericalError("stationary_distribution: residual " + std::to_string(residual) +
                         " exceeds tolerance");
  }
  return result;
}

double second_eigenvalue_2x2(const TransitionMatrix& p) {
  if (p.size() != 2) throw InvalidArgument("second_eigenvalue_2x2: matrix is not 2x2");
  return p(0, 0) + p(1, 1) - 1.0;
}

Distribution propagate_marginal(const Distribution& lam0, std::span<const TransitionMatrix> mats) {
  std::vector<double> v(lam0.probs().begin(), lam0.probs().end());
  for (const auto& m : mats) v = left_multiply(v, m);
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  if (std::abs(sum - 1.0) >= 1e-9) {
    throw NumericalError("propagate_marginal: mass drifted to " + std::to_string(sum));
  }
  for (double& x : v) x = std::clamp(x / sum, 0.0, 1.0);
  return Distribution(std::move(v));
}

ChainSampler::ChainSampler(State x0, std::uint64_t seed) : state_(x0), rng_(seed) {}

State ChainSampler::next(const TransitionMatrix& p) {
  if (state_ >= p.size()) throw InvalidArgument("ChainSampler: state out of range");
  const double u = rng_.uniform01();
  const auto r = p.row(state_);
  double cum = 0.0;
  State last_positive = 0;
  for (State y = 0; y < r.size(); ++y) {
    if (r[y] <= 0.0) continue;
    last_positive = y;
    cum += r[y];
    if (u < cum) {
      state_ = y;
      return y;
    }
  }
  // Row sums a hair below one.
  state_ = last_positive;
  return state_;
}

ChainPath simulate(const Schedule& schedule, Step t_max, State x0, std::uint64_t seed) {
  if (x0 >= schedule.n()) throw InvalidArgument("simulate: x0 out of range");
  ChainPath path;
  path.seed = seed;
  path.states.reserve(t_max + 1);
  path.states.push_back(x0);
  ChainSampler sampler(x0, seed);
  auto cursor = schedule.cursor();
  for (Step k = 1; k <= t_max; ++k, cursor.advance()) {
    path.states.push_back(sampler.next(cursor.matrix()));
  }
  return path;
}

}  // namespace adiatrack
