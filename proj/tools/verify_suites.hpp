#pragma once

#include <string>
#include <vector>

namespace fairrank {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Self-contained verification suites: simplex projection against an
/// independent feasible-probe oracle, solver KKT residuals, ledger
/// closed-form recomputation, and seeded simulator determinism.
std::vector<SuiteResult> run_verification_suites();

}  // namespace fairrank
