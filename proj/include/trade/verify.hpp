#pragma once

#include <string>
#include <vector>

namespace trade {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // measured values, shown next to the verdict
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// Suites: core, adversaries, estimator, learners, mat, harness, all.
std::vector<std::string> verify_suite_names();
VerifyReport verify_suite(const std::string& suite);

}  // namespace trade
