#include "doctest.h"

#include <cmath>
#include <vector>

#include "adiatrack/markov.hpp"
#include "adiatrack/schedules.hpp"
#include "adiatrack/verify.hpp"

using namespace adiatrack;

namespace {

const TransitionMatrix kA({{0.9, 0.1}, {0.2, 0.8}});
const TransitionMatrix kFlip({{0.0, 1.0}, {1.0, 0.0}});

// Brute-force power iteration; independent of the direct solve.
std::vector<double> power_stationary(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  // Lazy version avoids periodicity.
  for (int it = 0; it < 20000; ++it) {
    auto w = left_multiply(v, p);
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 * v[i] + 0.5 * w[i];
  }
  return v;
}

}  // namespace

TEST_SUITE("markov") {

TEST_CASE("tv distance examples") {
  CHECK(tv_distance(Distribution({0.5, 0.5}), Distribution({0.5, 0.5})) == 0.0);
  CHECK(tv_distance(Distribution({1.0, 0.0}), Distribution({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(tv_distance(Distribution({0.5, 0.5}), Distribution({0.9, 0.1})) ==
        doctest::Approx(0.4).epsilon(1e-14));
  CHECK_THROWS_AS(tv_distance(Distribution({1.0}), Distribution({0.5, 0.5})), InvalidArgument);
}

TEST_CASE("distribution and matrix validation") {
  CHECK_THROWS_AS(Distribution({0.6, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(Distribution({1.2, -0.2}), InvalidArgument);
  CHECK_THROWS_AS(TransitionMatrix({{0.5, 0.6}, {0.5, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(TransitionMatrix(std::vector<std::vector<double>>{{1.0}, {0.5, 0.5}}), InvalidArgument);
}

TEST_CASE("matrix tv distance examples") {
  CHECK(matrix_tv_distance(kA, kA) == 0.0);
  CHECK(matrix_tv_distance(TransitionMatrix::identity(2), kFlip) == doctest::Approx(1.0));
  const TransitionMatrix b({{0.8, 0.2}, {0.2, 0.8}});
  CHECK(matrix_tv_distance(kA, b) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("ergodicity coefficient examples") {
  CHECK(ergodicity_coefficient(TransitionMatrix::identity(2)) == doctest::Approx(1.0));
  CHECK(ergodicity_coefficient(TransitionMatrix::rank_one(Distribution({0.2, 0.3, 0.5}))) ==
        doctest::Approx(0.0));
  CHECK(ergodicity_coefficient(kA) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("ergodicity coefficient forms agree on random matrices") {
  RandomStream rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto p = verify::random_irreducible(rng, 2 + i % 5, (i % 2) ? 0.4 : 0.0);
    CHECK(std::abs(ergodicity_coefficient(p) - ergodicity_coefficient_overlap(p)) <= 1e-12);
  }
}

TEST_CASE("stationary distribution examples") {
  const auto pi = stationary_distribution(kA);
  CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  const auto half = stationary_distribution(kFlip);
  CHECK(half[0] == doctest::Approx(0.5));
  const Distribution q({0.1, 0.7, 0.2});
  const auto pq = stationary_distribution(TransitionMatrix::rank_one(q));
  for (State x = 0; x < 3; ++x) CHECK(pq[x] == doctest::Approx(q[x]).epsilon(1e-13));
  CHECK_THROWS_AS(stationary_distribution(TransitionMatrix::identity(2)), InvalidArgument);
}

TEST_CASE("stationary distribution matches power iteration") {
  RandomStream rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto p = verify::random_irreducible(rng, 2 + i % 6, 0.3);
    const auto pi = stationary_distribution(p);
    const auto ref = power_stationary(p);
    for (State x = 0; x < p.size(); ++x) CHECK(std::abs(pi[x] - ref[x]) <= 1e-9);
  }
}

TEST_CASE("irreducibility examples") {
  CHECK(is_irreducible(kFlip));
  CHECK_FALSE(is_irreducible(TransitionMatrix::identity(2)));
  CHECK_FALSE(is_irreducible(TransitionMatrix({{0.5, 0.5}, {0.0, 1.0}})));
}

TEST_CASE("second eigenvalue 2x2") {
  CHECK(second_eigenvalue_2x2(kA) == doctest::Approx(0.7));
  CHECK(second_eigenvalue_2x2(kFlip) == doctest::Approx(-1.0));
  CHECK(second_eigenvalue_2x2(TransitionMatrix::rank_one(Distribution({0.3, 0.7}))) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(second_eigenvalue_2x2(TransitionMatrix::identity(3)), InvalidArgument);
}

TEST_CASE("propagate marginal examples") {
  const auto e0 = Distribution::point_mass(2, 0);
  const auto same = propagate_marginal(e0, std::span<const TransitionMatrix>{});
  CHECK(same[0] == 1.0);
  const std::vector<TransitionMatrix> twice{kFlip, kFlip};
  CHECK(propagate_marginal(e0, twice)[0] == doctest::Approx(1.0));
  const std::vector<TransitionMatrix> once{kA};
  const auto m = propagate_marginal(e0, once);
  CHECK(m[0] == doctest::Approx(0.9));
  CHECK(m[1] == doctest::Approx(0.1));
  const std::vector<TransitionMatrix> wrong{TransitionMatrix::identity(3)};
  CHECK_THROWS_AS(propagate_marginal(e0, wrong), InvalidArgument);
}

TEST_CASE("simulate examples") {
  const auto flip = Schedule::constant(kFlip);
  const auto path = simulate(flip, 4, 0, 99);
  CHECK(path.states == std::vector<State>{0, 1, 0, 1, 0});
  CHECK(simulate(flip, 0, 1, 5).states == std::vector<State>{1});
}

TEST_CASE("simulate is deterministic and matches empirical frequencies") {
  const auto s = Schedule::constant(kA);
  const auto a = simulate(s, 20000, 0, 3);
  const auto b = simulate(s, 20000, 0, 3);
  CHECK(a.states == b.states);
  double ones = 0.0;
  for (State x : a.states) ones += (x == 1);
  CHECK(ones / static_cast<double>(a.states.size()) == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

}
