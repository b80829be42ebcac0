#include "commands.hpp"
#include "suites.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace accelode::tools;

namespace {

/// Options shared by phase-portrait and contour: a config file, generic
/// key=value overrides and a few direct flags (applied last).
struct ConfigOptions {
  std::string config_file;
  std::vector<std::string> settings;
  std::vector<std::pair<std::string, std::string>> direct;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_file, "key=value config file");
    cmd->add_option("-s,--set", settings, "override a setting, KEY=VALUE (repeatable)");
  }

  void flag(CLI::App* cmd, const std::string& name, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        name, [this, key](const std::string& v) { direct.emplace_back(key, v); }, help);
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg;
    if (!config_file.empty()) load_config_file(cfg, config_file);
    for (const std::string& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects KEY=VALUE, got '" + s + "'");
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [k, v] : direct) apply_setting(cfg, k, v);
    cfg.output_dir = resolve_output_dir(cfg.output_dir);
    return cfg;
  }
};

void common_flags(ConfigOptions& o, CLI::App* cmd) {
  o.add_to(cmd);
  o.flag(cmd, "--objective", "objective", "piecewise | quadratic");
  o.flag(cmd, "--objective-kappa", "objective_kappa", "condition number of the piecewise objective");
  o.flag(cmd, "--diag", "diag", "quadratic Hessian diagonal, comma separated");
  o.flag(cmd, "--kappa", "kappa", "schedule condition number (default: the objective's)");
  o.flag(cmd, "--steps", "steps", "number of steps");
  o.flag(cmd, "-o,--output-dir", "output_dir", "output directory (ACCELODE_OUT overrides)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated-gradient dynamics toolkit: constants, phase portraits, contours, verification"};
  app.require_subcommand(1);

  auto* constants = app.add_subcommand("constants", "Tabulate 2d, beta and 2d + beta against kappa");
  std::vector<double> kappas{1, 3.1622776601683795, 10, 31.622776601683793, 100, 316.22776601683796, 1000,
                             3162.2776601683795, 10000, 31622.776601683792, 100000, 316227.76601683791, 1000000};
  std::string constants_dir = "accelode_out";
  constants->add_option("-k,--kappa", kappas, "condition numbers (>= 1)")->delimiter(',');
  constants->add_option("-o,--output-dir", constants_dir, "output directory (ACCELODE_OUT overrides)");

  auto* portrait = app.add_subcommand("phase-portrait", "Trajectories of the discrete scheme from a grid of (q0, p0)");
  ConfigOptions portrait_opts;
  common_flags(portrait_opts, portrait);
  portrait_opts.flag(portrait, "--step-sizes", "step_sizes", "comma-separated step sizes");
  portrait_opts.flag(portrait, "--q-min", "q_min", "first q0");
  portrait_opts.flag(portrait, "--q-max", "q_max", "last q0");
  portrait_opts.flag(portrait, "--q-step", "q_step", "q0 spacing");
  portrait_opts.flag(portrait, "--p0", "p0", "initial momentum");

  auto* contour = app.add_subcommand("contour", "Evolve a phase-space contour and track its area");
  ConfigOptions contour_opts;
  common_flags(contour_opts, contour);
  contour_opts.flag(contour, "--shape", "shape", "circle | levelset");
  contour_opts.flag(contour, "--radius", "radius", "circle radius");
  contour_opts.flag(contour, "--center-q", "center_q", "circle center q");
  contour_opts.flag(contour, "--center-p", "center_p", "circle center p");
  contour_opts.flag(contour, "--energies", "energies", "level-set energies, comma separated (first one is evolved)");
  contour_opts.flag(contour, "--vertices", "vertices", "initial vertex count");
  contour_opts.flag(contour, "--step-size", "step_size", "step size T_s");
  contour_opts.flag(contour, "--zero-damping", "zero_damping", "true to drop all non-potential forces");

  auto* verify = app.add_subcommand("verify", "Run verification checks and write a JSON report");
  std::string suite = "all";
  std::string verify_dir = "accelode_out";
  bool json = false;
  verify->add_option("suite", suite, "continuous | discrete | equivalence | geometry | all")
      ->check(CLI::IsMember(suite_names()));
  verify->add_option("-o,--output-dir", verify_dir, "output directory (ACCELODE_OUT overrides)");
  verify->add_flag("--json", json, "print the JSON report to stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*constants) return cmd_constants(kappas, resolve_output_dir(constants_dir), std::cout);
    if (*portrait) return cmd_phase_portrait(portrait_opts.build(), std::cout);
    if (*contour) return cmd_contour(contour_opts.build(), std::cout);
    if (*verify) return cmd_verify(suite, resolve_output_dir(verify_dir), json, std::cout);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerificationFailure;
  }
  return kUsageError;
}
