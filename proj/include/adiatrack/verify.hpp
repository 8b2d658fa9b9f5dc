#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adiatrack/io.hpp"

namespace adiatrack::verify {

using io::json;

struct VerifyOptions {
  std::uint64_t master_seed = 20240601;
  /// Test hook: the ergodicity coefficients entering the prop1 right-hand sides
  /// and the thm1c bound are multiplied by this. 1 in normal operation.
  double rho_sabotage = 1.0;
};

/// One named inequality or identity checked over many cases.
struct PropertyTally {
  explicit PropertyTally(std::string property_name) : name(std::move(property_name)) {}

  std::string name;
  std::size_t cases = 0;
  std::size_t violations = 0;
  /// max over cases of lhs - rhs (after tolerance); negative when every case passes.
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::optional<json> counterexample;  // first violating case, inputs verbatim

  void record(double lhs, double rhs, const std::function<json()>& describe);
};

struct SuiteReport {
  std::string suite;
  std::uint64_t master_seed = 0;
  std::vector<PropertyTally> properties;
  double seconds = 0.0;

  bool pass() const;
  std::size_t cases() const;
  std::size_t violations() const;
  const PropertyTally& property(const std::string& name) const;
  /// Includes "spec_version"; names the first counterexample when one exists.
  json to_json() const;
};

/// prop1, thm1, lemmas, lipschitz, restart, mixing, coverage.
const std::vector<std::string>& suite_names();

/// Throws InvalidArgument for an unknown suite.
SuiteReport run_suite(const std::string& name, const VerifyOptions& options = {});

SuiteReport prop1_suite(const VerifyOptions& options);
SuiteReport thm1_suite(const VerifyOptions& options);
SuiteReport lemmas_suite(const VerifyOptions& options);
SuiteReport lipschitz_suite(const VerifyOptions& options);
SuiteReport restart_suite(const VerifyOptions& options);
SuiteReport mixing_suite(const VerifyOptions& options);
SuiteReport coverage_suite(const VerifyOptions& options);

/// Seed of case `index` in a suite: splitmix64 mixing of master seed, salt and index.
std::uint64_t case_seed(std::uint64_t master_seed, std::uint64_t salt, std::uint64_t index);

// Random instance generators shared with the unit tests.
Distribution random_distribution(RandomStream& rng, std::size_t n);
/// Rows drawn uniformly from the simplex; each entry is zeroed with probability
/// `sparsity` (one entry per row always survives). Irreducible, by rejection.
TransitionMatrix random_irreducible(RandomStream& rng, std::size_t n, double sparsity = 0.0);

}  // namespace adiatrack::verify
