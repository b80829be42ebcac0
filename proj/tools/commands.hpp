#pragma once

#include "accelode/objective.hpp"

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace accelode::tools {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kUsageError = 2, kIoError = 3 };

/// Raised when an output file or directory cannot be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings shared by the experiment subcommands. Loaded from a flat
/// key=value file and overridden from the command line; keys match the
/// field names.
struct ExperimentConfig {
  /// "piecewise" or "quadratic".
  std::string objective = "piecewise";
  /// Condition number of the piecewise objective.
  double objective_kappa = 5.0;
  /// Hessian diagonal of the quadratic objective.
  std::vector<double> diag{1.0};
  /// Schedule condition number; 0 takes the objective's own.
  double kappa = 0.0;

  std::vector<double> step_sizes{0.1, 0.5, 1.0, 1.2};
  double q_min = -2.0;
  double q_max = 5.0;
  double q_step = 0.2;
  double p0 = 0.0;
  long steps = 100;

  /// contour: "circle" or "levelset".
  std::string shape = "circle";
  double radius = 1.0;
  double center_q = 0.0;
  double center_p = 0.0;
  std::vector<double> energies{0.5, 1.0, 2.0};
  int vertices = 2000;
  double step_size = 0.5;
  bool zero_damping = false;

  std::string output_dir = "accelode_out";

  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

/// Applies one key=value setting; throws std::invalid_argument on unknown
/// keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines; blank lines and lines starting with '#' are
/// skipped. Throws IoError if the file cannot be opened.
void load_config_file(ExperimentConfig& cfg, const std::string& path);

Objective make_objective(const ExperimentConfig& cfg);
double schedule_kappa(const ExperimentConfig& cfg, const Objective& obj);

/// ACCELODE_OUT, when set and non-empty, replaces `dir`.
std::string resolve_output_dir(const std::string& dir);

int cmd_constants(const std::vector<double>& kappas, const std::string& output_dir, std::ostream& out);
int cmd_phase_portrait(const ExperimentConfig& cfg, std::ostream& out);
int cmd_contour(const ExperimentConfig& cfg, std::ostream& out);
int cmd_verify(const std::string& suite, const std::string& output_dir, bool json_to_stdout, std::ostream& out);

}  // namespace accelode::tools
