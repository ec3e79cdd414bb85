#pragma once

// The bundled check suite. Each check is a self-contained scenario with a
// closed-form or convergence oracle and a fixed tolerance.

#include <string>
#include <vector>

namespace extlab {

struct CheckResult {
  std::string name;
  std::string suite;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double runtime_s = 0.0;  // wall clock; not part of the report text
};

struct CheckInfo {
  std::string name;
  std::string suite;
  std::string summary;
};

/// Every check, in report order.
const std::vector<CheckInfo>& check_catalog();

/// Suite names: geometry, csf, ramp, comparison, all.
const std::vector<std::string>& suite_names();

/// Runs the checks of `suite` ("all" for every check) on up to `jobs`
/// threads; results come back in catalog order. Throws ConfigError for an
/// unknown suite.
std::vector<CheckResult> run_checks(const std::string& suite, int jobs = 1);

/// Runs one check by name.
CheckResult run_check(const std::string& name);

/// Deterministic text: one line per check, reals with 17 significant digits, no timings.
std::string format_report(const std::vector<CheckResult>& results);

}  // namespace extlab
