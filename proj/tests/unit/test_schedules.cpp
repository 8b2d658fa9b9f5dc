#include "doctest.h"

#include <cmath>

#include "adiatrack/schedules.hpp"

using namespace adiatrack;

namespace {

const TransitionMatrix kA({{0.9, 0.1}, {0.2, 0.8}});
const TransitionMatrix kB({{0.3, 0.7}, {0.6, 0.4}});
const TransitionMatrix kHalf({{0.5, 0.5}, {0.5, 0.5}});

DriftParams params(double c_p, double gamma_p, double c_pi = 0.1, double gamma_pi = 0.0) {
  DriftParams p;
  p.c_p = c_p;
  p.gamma_p = gamma_p;
  p.c_pi = c_pi;
  p.gamma_pi = gamma_pi;
  return p;
}

void check_cursor_matches(const Schedule& s, Step t_max) {
  auto cur = s.cursor();
  for (Step t = 1; t <= t_max; ++t) {
    REQUIRE(cur.t() == t);
    CHECK(cur.matrix() == s.matrix_at(t));
    cur.advance();
  }
}

}  // namespace

TEST_SUITE("schedules") {

TEST_CASE("matrix_at rejects t = 0") {
  CHECK_THROWS_AS(Schedule::constant(kA).matrix_at(0), InvalidArgument);
}

TEST_CASE("constant schedule") {
  const auto s = Schedule::constant(kA, params(1.0, kInfiniteExponent, 1.0 / 3.0));
  CHECK(s.matrix_at(1) == kA);
  CHECK(s.matrix_at(12345) == kA);
  const auto report = verify_drift(s, 200);
  CHECK(report.passed());
  CHECK(report.max_scaled_drift == 0.0);
  // pi_min = 1/3 here, so a floor of 0.4 is a false certificate.
  const auto over = Schedule::constant(kA, params(1.0, kInfiniteExponent, 0.4));
  const auto bad = verify_drift(over, 10);
  REQUIRE_FALSE(bad.passed());
  CHECK(bad.violation->bound == "pi_min");
  CHECK(bad.violation->t == 1);
}

TEST_CASE("interpolation first increment and clamped endpoint") {
  const auto s = Schedule::interpolation(kA, kHalf, params(0.1, 1.0));
  CHECK(matrix_tv_distance(s.matrix_at(1), s.matrix_at(2)) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.matrix_at(1) == kA);
  CHECK(verify_drift(s, 100).passed());

  const auto fast = Schedule::interpolation(kA, kHalf, params(5.0, 1.0));
  CHECK(fast.matrix_at(2) == kHalf);
  CHECK(fast.matrix_at(50) == kHalf);
}

TEST_CASE("interpolation with equal endpoints is constant") {
  const auto s = Schedule::interpolation(kA, kA, params(0.1, 1.0));
  for (Step t = 1; t < 20; ++t) CHECK(s.matrix_at(t) == kA);
}

TEST_CASE("cyclic schedule drift certificate and non-convergence") {
  const auto s = Schedule::cyclic({kA, kB}, params(0.05, 0.5));
  const double diameter = matrix_tv_distance(kA, kB);
  auto cur = s.cursor();
  TransitionMatrix prev = cur.matrix();
  double farthest = 0.0;
  const TransitionMatrix first = prev;
  for (Step t = 1; t < 10000; ++t) {
    cur.advance();
    const double d = matrix_tv_distance(prev, cur.matrix());
    CHECK(d <= 0.05 / std::sqrt(static_cast<double>(t)) * (1 + 1e-9));
    farthest = std::max(farthest, matrix_tv_distance(first, cur.matrix()));
    prev = cur.matrix();
  }
  CHECK(farthest >= 0.5 * diameter);
  CHECK_THROWS_AS(Schedule::cyclic({kA, kB}, params(0.05, 1.0)), InvalidArgument);
}

TEST_CASE("cyclic of identical matrices is constant") {
  const auto s = Schedule::cyclic({kA, kA}, params(0.05, 0.5));
  for (Step t = 1; t < 20; ++t) CHECK(s.matrix_at(t) == kA);
}

TEST_CASE("shrinking state pi_min") {
  DriftParams p = params(1.0, 1.5, 0.2, 0.5);
  const auto s = Schedule::shrinking_state(p, 2000);
  CHECK(s.n() == 3);
  const auto pi16 = stationary_distribution(s.matrix_at(16));
  CHECK(pi16.min() == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(stationary_distribution(s.matrix_at(1)).min() == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(s.rho_cap() < 1.0);
  for (Step t = 1; t < 100; ++t) CHECK(ergodicity_coefficient(s.matrix_at(t)) <= s.rho_cap() + 1e-12);
}

TEST_CASE("shrinking state rejects an understated drift cap") {
  CHECK_THROWS(Schedule::shrinking_state(params(1e-4, 1.5, 0.2, 0.5), 2000));
}

TEST_CASE("restart wrap example") {
  const TransitionMatrix flip({{0.0, 1.0}, {1.0, 0.0}});
  const auto w = restart_wrap(flip, 0.5, 0.8, 0);
  CHECK(w(0, 0) == doctest::Approx(0.375));
  CHECK(w(0, 1) == doctest::Approx(0.625));
  CHECK(w(1, 0) == doctest::Approx(1.0));
  CHECK(w(1, 1) == doctest::Approx(0.0));
  CHECK(ergodicity_coefficient(w) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK_THROWS_AS(restart_wrap(flip, 0.5, 0.5, 0), InvalidArgument);
  CHECK_THROWS_AS(restart_wrap(flip, 0.5, 0.4, 0), InvalidArgument);
}

TEST_CASE("restart wrapped schedule wraps every step") {
  const auto inner = Schedule::interpolation(kA, kB, params(0.02, 1.0));
  const auto s = Schedule::restart_wrapped(inner, 0.5, 0.8, 1, params(0.02, 1.0));
  for (Step t = 1; t < 30; ++t) {
    const auto expect = restart_wrap(inner.matrix_at(t), 0.5, 0.8, 1);
    CHECK(matrix_tv_distance(s.matrix_at(t), expect) <= 1e-15);
  }
  CHECK(s.rho_cap() <= 0.625 + 1e-12);
}

TEST_CASE("cursor is bit-identical to matrix_at") {
  check_cursor_matches(Schedule::constant(kA), 50);
  check_cursor_matches(Schedule::interpolation(kA, kB, params(0.05, 1.0)), 300);
  check_cursor_matches(Schedule::cyclic({kA, kB, kHalf}, params(0.1, 0.4)), 300);
  check_cursor_matches(Schedule::shrinking_state(params(1.0, 1.5, 0.2, 0.5), 500), 300);
  check_cursor_matches(Schedule::restart_wrapped(Schedule::cyclic({kA, kB}, params(0.1, 0.4)), 0.5,
                                                 0.9, 0, params(0.1, 0.4)),
                       300);
}

TEST_CASE("verify_drift names t = 1 for a mis-declared C_P") {
  // The wrapper declares its own certificate. The true first step is
  // 0.625 * 0.1; declare half of it.
  const auto inner = Schedule::interpolation(kA, kHalf, params(0.1, 1.0));
  const double true_cp = 0.625 * 0.1;
  const auto honest = Schedule::restart_wrapped(inner, 0.5, 0.8, 0, params(true_cp, 1.0));
  CHECK(verify_drift(honest, 100).passed());
  const auto lying = Schedule::restart_wrapped(inner, 0.5, 0.8, 0, params(0.5 * true_cp, 1.0));
  const auto report = verify_drift(lying, 100);
  REQUIRE_FALSE(report.passed());
  CHECK(report.violation->bound == "drift");
  CHECK(report.violation->t == 1);
  CHECK_THROWS_AS(report.throw_if_failed(), CertificateViolation);
}

TEST_CASE("drift params validation") {
  CHECK_THROWS_AS(params(-1.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(params(1.0, 1.0, 0.0).validate(), InvalidArgument);
  CHECK(params(1.0, 1.0).drift_cap(4) == doctest::Approx(0.25));
  CHECK(params(1.0, kInfiniteExponent).drift_cap(4) == 0.0);
  CHECK(params(1.0, 1.0, 0.2, 0.5).pi_floor(16) == doctest::Approx(0.05));
}

}
