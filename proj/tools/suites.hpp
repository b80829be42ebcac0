#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace accelode::tools {

/// Outcome of one verification check.
struct CheckResult {
  std::string name;
  std::string suite;
  bool pass = false;
  double seconds = 0.0;
  /// Wall-clock budget; 0 means none. Exceeding it fails the check.
  double budget_seconds = 0.0;
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();
};

CheckResult check_nesterov_equivalence();
CheckResult check_coefficient_identity();
CheckResult check_continuous_rate();
CheckResult check_sublinear_rate();
CheckResult check_piecewise_experiment();
CheckResult check_area_identity();
CheckResult check_area_sandwich();
CheckResult check_continuous_vs_discrete_area();
CheckResult check_homeomorphism();
CheckResult check_discrete_rate();
CheckResult check_integrator_hygiene();

/// All checks in a fixed order.
std::vector<CheckResult> run_all_checks();

/// Suite names accepted by run_suite: continuous, discrete, equivalence,
/// geometry, all.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& suite);

nlohmann::json to_json(const std::vector<CheckResult>& results);

}  // namespace accelode::tools
