#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace latfrac::harness {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool passed() const;
};

/// matrix1, split, freudenthal, profile, monotone, oracles.
const std::vector<std::string>& suite_names();

/// Runs the selected invariant suites (all of them for an empty selection). Suite
/// failures, including exceptions inside a suite, become report entries. Throws
/// std::invalid_argument for an unknown selector.
VerifyReport run_verify(const std::vector<std::string>& selectors, std::uint64_t seed = 1);

nlohmann::json to_json(const VerifyReport& report);

}  // namespace latfrac::harness
