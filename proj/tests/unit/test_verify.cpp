#include "doctest.h"

#include "adiatrack/verify.hpp"

using namespace adiatrack;

TEST_SUITE("verify") {

TEST_CASE("case seeds are deterministic and distinct") {
  CHECK(verify::case_seed(1, 2, 3) == verify::case_seed(1, 2, 3));
  CHECK(verify::case_seed(1, 2, 3) != verify::case_seed(1, 2, 4));
  CHECK(verify::case_seed(1, 2, 3) != verify::case_seed(2, 2, 3));
}

TEST_CASE("random generators produce valid irreducible matrices") {
  RandomStream rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto p = verify::random_irreducible(rng, 2 + i % 5, 0.5);
    CHECK(is_irreducible(p));
    const auto d = verify::random_distribution(rng, 4);
    CHECK(d.size() == 4);
  }
}

TEST_CASE("restart suite passes and reports") {
  const auto r = verify::run_suite("restart");
  CHECK(r.pass());
  CHECK(r.cases() > 0);
  const auto j = r.to_json();
  CHECK(j.at("spec_version") == io::kSpecVersion);
  CHECK(j.at("suite") == "restart");
}

TEST_CASE("sabotaged rho makes prop1 fail with a counterexample") {
  verify::VerifyOptions opt;
  opt.rho_sabotage = 0.5;
  const auto r = verify::run_suite("prop1", opt);
  CHECK_FALSE(r.pass());
  CHECK(r.violations() > 0);
  const auto j = r.to_json();
  REQUIRE(j.contains("counterexample"));
  CHECK(j.dump().find("rows") != std::string::npos);
}

TEST_CASE("unknown suite") {
  CHECK_THROWS_AS(verify::run_suite("nonsense"), InvalidArgument);
  CHECK(verify::suite_names().size() == 7);
}

}
