#include "adiatrack/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "adiatrack/error.hpp"

namespace adiatrack::linalg {

std::vector<double> solve(std::vector<double> a, std::vector<double> b, std::size_t n,
                          double pivot_tol) {
  if (a.size() != n * n || b.size() != n) {
    throw InvalidArgument("linalg::solve: dimension mismatch");
  }
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw NumericalError("linalg::solve: zero matrix");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) <= pivot_tol * scale) {
      throw NumericalError("linalg::solve: singular system at column " +
                           std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    const double diag = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / diag;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * x[c];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("sup_distance: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace adiatrack::linalg
