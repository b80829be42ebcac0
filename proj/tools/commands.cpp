#include "commands.hpp"

#include "suites.hpp"
#include "svg.hpp"

#include "accelode/accelode.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace accelode::tools {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

long parse_long(const std::string& value) {
  const double v = parse_double(value);
  if (v != std::floor(v)) throw std::invalid_argument("not an integer: '" + value + "'");
  return static_cast<long>(v);
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("not a boolean: '" + value + "'");
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

class OutputFile {
 public:
  explicit OutputFile(const fs::path& path) : path_(path), os_(path, std::ios::binary) {
    if (!os_) throw IoError("cannot open '" + path.string() + "' for writing");
  }
  std::ostream& stream() { return os_; }
  const fs::path& path() const { return path_; }
  void close() {
    os_.close();
    if (!os_) throw IoError("error writing '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream os_;
};

DampingSchedule make_schedule(const ExperimentConfig& cfg, const Objective& obj) {
  if (cfg.zero_damping) return DampingSchedule::undamped();
  return DampingSchedule::strongly_convex(schedule_kappa(cfg, obj));
}

}  // namespace

void ExperimentConfig::validate() const {
  detail::require(objective == "piecewise" || objective == "quadratic",
                  "objective must be 'piecewise' or 'quadratic'");
  detail::require(objective_kappa >= 1.0, "objective_kappa must be >= 1");
  detail::require(kappa == 0.0 || kappa >= 1.0, "kappa must be >= 1 (or 0 for the objective's own)");
  detail::require(q_min < q_max, "q_min must be less than q_max");
  detail::require(q_step > 0.0, "q_step must be positive");
  detail::require(steps >= 1, "steps must be >= 1");
  for (double h : step_sizes) detail::require(h > 0.0, "step sizes must be positive");
  detail::require(!step_sizes.empty(), "step_sizes must not be empty");
  detail::require(shape == "circle" || shape == "levelset", "shape must be 'circle' or 'levelset'");
  detail::require(radius > 0.0, "radius must be positive");
  for (double e : energies) detail::require(e > 0.0, "energies must be positive");
  detail::require(vertices >= 16, "vertices must be >= 16");
  detail::require(step_size > 0.0, "step_size must be positive");
  detail::require(!output_dir.empty(), "output_dir must not be empty");
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  try {
    if (key == "objective") cfg.objective = value;
    else if (key == "objective_kappa") cfg.objective_kappa = parse_double(value);
    else if (key == "diag") cfg.diag = parse_list(value);
    else if (key == "kappa") cfg.kappa = parse_double(value);
    else if (key == "step_sizes") cfg.step_sizes = parse_list(value);
    else if (key == "q_min") cfg.q_min = parse_double(value);
    else if (key == "q_max") cfg.q_max = parse_double(value);
    else if (key == "q_step") cfg.q_step = parse_double(value);
    else if (key == "p0") cfg.p0 = parse_double(value);
    else if (key == "steps") cfg.steps = parse_long(value);
    else if (key == "shape") cfg.shape = value;
    else if (key == "radius") cfg.radius = parse_double(value);
    else if (key == "center_q") cfg.center_q = parse_double(value);
    else if (key == "center_p") cfg.center_p = parse_double(value);
    else if (key == "energies") cfg.energies = parse_list(value);
    else if (key == "vertices") cfg.vertices = static_cast<int>(parse_long(value));
    else if (key == "step_size") cfg.step_size = parse_double(value);
    else if (key == "zero_damping") cfg.zero_damping = parse_bool(value);
    else if (key == "output_dir") cfg.output_dir = value;
    else throw std::invalid_argument("unknown setting");
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("setting '" + key + "': " + e.what());
  }
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(cfg, t.substr(0, eq), t.substr(eq + 1));
  }
}

Objective make_objective(const ExperimentConfig& cfg) {
  if (cfg.objective == "piecewise") return make_piecewise_gradient(cfg.objective_kappa);
  return make_quadratic(std::span<const double>(cfg.diag));
}

double schedule_kappa(const ExperimentConfig& cfg, const Objective& obj) {
  return cfg.kappa > 0.0 ? cfg.kappa : obj.kappa();
}

std::string resolve_output_dir(const std::string& dir) {
  const char* env = std::getenv("ACCELODE_OUT");
  return env != nullptr && *env != '\0' ? std::string(env) : dir;
}

int cmd_constants(const std::vector<double>& kappas, const std::string& output_dir, std::ostream& out) {
  for (double k : kappas) detail::require(k >= 1.0, "kappa must be >= 1");
  std::ostringstream csv;
  csv << "kappa,two_d,beta,sum\n";
  for (double k : kappas) {
    const Coefficients c = coefficients(DampingSchedule::strongly_convex(k), 0.0);
    csv << format_double(k) << ',' << format_double(2.0 * c.d) << ',' << format_double(c.beta) << ','
        << format_double(2.0 * c.d + c.beta) << '\n';
  }
  const fs::path dir = prepare_dir(output_dir);
  OutputFile file(dir / "constants.csv");
  file.stream() << csv.str();
  file.close();
  out << csv.str();
  return kSuccess;
}

int cmd_phase_portrait(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const Objective obj = make_objective(cfg);
  detail::require(obj.dim() == 1, "phase-portrait needs a one-dimensional objective");
  const DampingSchedule sched = make_schedule(cfg, obj);
  const fs::path dir = prepare_dir(cfg.output_dir);

  std::vector<double> grid;
  const long count = static_cast<long>(std::floor((cfg.q_max - cfg.q_min) / cfg.q_step + 1e-9));
  // Snap to 1e-12 so that e.g. -2 + 11 * 0.2 is written as 0.2.
  for (long i = 0; i <= count; ++i) {
    grid.push_back(std::round((cfg.q_min + static_cast<double>(i) * cfg.q_step) * 1e12) / 1e12);
  }

  OutputFile summary(dir / "phase_portrait_summary.csv");
  summary.stream() << "step_size,trajectory_id,q0,p0,status,steps\n";
  for (double h : cfg.step_sizes) {
    const std::string tag = "phase_portrait_Ts" + format_double(h);
    OutputFile csv(dir / (tag + ".csv"));
    csv.stream() << "trajectory_id,k,q,p,in_middle_band\n";
    PhasePlot plot;
    int converged = 0, diverged = 0;
    for (std::size_t id = 0; id < grid.size(); ++id) {
      const TrajectoryRecord rec =
          simulate(obj, sched, PhasePoint::scalar(grid[id], cfg.p0), cfg.steps, StepperConfig::with_step(h));
      PhasePlot::Series series;
      for (std::size_t k = 0; k < rec.points.size(); ++k) {
        const double q = rec.points[k].q[0];
        const double p = rec.points[k].p[0];
        const double y = q + coefficients(sched, rec.times[k]).beta * p;
        const bool band = y >= 1.0 && y < 2.0;
        csv.stream() << id << ',' << k << ',' << format_double(q) << ',' << format_double(p) << ','
                     << (band ? "true" : "false") << '\n';
        series.points.push_back({q, p});
        series.highlight.push_back(band);
      }
      plot.add(std::move(series));
      summary.stream() << format_double(h) << ',' << id << ',' << format_double(grid[id]) << ','
                       << format_double(cfg.p0) << ',' << to_string(rec.status) << ',' << rec.steps() << '\n';
      converged += rec.status == TrajectoryStatus::Converged;
      diverged += rec.status == TrajectoryStatus::Diverged;
    }
    csv.close();
    OutputFile svg(dir / (tag + ".svg"));
    plot.write(svg.stream(), "T_s = " + format_double(h));
    svg.close();
    out << "T_s=" << format_double(h) << ": " << grid.size() << " trajectories, " << converged << " converged, "
        << diverged << " diverged -> " << csv.path().string() << '\n';
  }
  summary.close();
  return kSuccess;
}

int cmd_contour(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const Objective obj = make_objective(cfg);
  detail::require(obj.dim() == 1, "contour needs a one-dimensional objective");
  const DampingSchedule sched = make_schedule(cfg, obj);
  const double h = cfg.step_size;
  const fs::path dir = prepare_dir(cfg.output_dir);

  Contour c = cfg.shape == "circle" ? circle_contour({cfg.center_q, cfg.center_p}, cfg.radius, cfg.vertices)
                                    : level_set_contour(obj, cfg.energies.front(), cfg.vertices);
  const Coefficients co = coefficients(sched, 0.0);
  const bool strongly_convex = sched.mode == DampingMode::StronglyConvex;
  const double factor = strongly_convex ? 1.0 - h * (2.0 * co.d + co.beta / sched.kappa) : 1.0;
  const bool check_radius = strongly_convex && cfg.shape == "circle" && cfg.center_q == 0.0 &&
                            cfg.center_p == 0.0 && h > 0.0 && h < 1.0;

  auto radius_of = [](const Contour& cc) {
    double r = 0.0;
    for (const Point2& x : cc.vertices()) r = std::max(r, std::hypot(x.q, x.p));
    return r;
  };
  const double r0 = radius_of(c);

  bool identity_ok = true;
  bool radius_ok = true;
  OutputFile csv(dir / "contour.csv");
  csv.stream() << "k,area,line_integral,region_integral,max_radius,R_k_bound\n";
  csv.stream() << 0 << ',' << format_double(signed_area(c)) << ",,," << format_double(r0) << ','
               << format_double(r0) << '\n';
  for (long k = 1; k <= cfg.steps; ++k) {
    const AreaContractionReport rep =
        area_contraction_report(obj, sched, c, static_cast<double>(k - 1) * h, StepperConfig::with_step(h));
    const double tol = 1e-3 * std::abs(rep.area_before);
    if (!is_degenerate(rep.preimage) &&
        (std::abs(rep.lhs - rep.line_integral) > tol || std::abs(rep.lhs - rep.region_integral) > tol)) {
      identity_ok = false;
    }
    c = rep.image;
    const double rk = r0 * std::pow(factor, 0.5 * static_cast<double>(k));
    const double rmax = radius_of(c);
    if (check_radius && rmax < rk * (1.0 - kRadiusTolerance)) radius_ok = false;
    csv.stream() << k << ',' << format_double(rep.area_after) << ',' << format_double(rep.line_integral) << ','
                 << format_double(rep.region_integral) << ',' << format_double(rmax) << ',' << format_double(rk)
                 << '\n';
  }
  csv.close();
  out << "contour: " << cfg.steps << " steps -> " << csv.path().string() << '\n';
  out << "area identity: " << (identity_ok ? "pass" : "FAIL") << '\n';
  if (check_radius) out << "radius bound: " << (radius_ok ? "pass" : "FAIL") << '\n';

  bool levelset_ok = true;
  if (cfg.shape == "levelset") {
    OutputFile levelset_csv(dir / "contour_levelset_comparison.csv");
    levelset_csv.stream() << "energy,step_size,initial_area,continuous_area,discrete_area,margin\n";
    for (double e : cfg.energies) {
      const AreaComparison cmp = prop4_compare(obj, sched, e, h, std::min(cfg.vertices, 1024));
      if (cmp.margin() < -1e-4 * cmp.initial_area) levelset_ok = false;
      levelset_csv.stream() << format_double(e) << ',' << format_double(h) << ',' << format_double(cmp.initial_area) << ','
                  << format_double(cmp.continuous_area) << ',' << format_double(cmp.discrete_area) << ','
                  << format_double(cmp.margin()) << '\n';
    }
    levelset_csv.close();
    out << "continuous >= discrete one-step area: " << (levelset_ok ? "pass" : "FAIL") << " -> " << levelset_csv.path().string()
        << '\n';
  }
  return identity_ok && radius_ok && levelset_ok ? kSuccess : kVerificationFailure;
}

int cmd_verify(const std::string& suite, const std::string& output_dir, bool json_to_stdout, std::ostream& out) {
  const std::vector<CheckResult> results = run_suite(suite);
  const nlohmann::json report = to_json(results);
  const fs::path dir = prepare_dir(output_dir);
  OutputFile file(dir / ("verify_" + suite + ".json"));
  file.stream() << report.dump(2) << '\n';
  file.close();
  if (json_to_stdout) {
    out << report.dump(2) << '\n';
  } else {
    for (const CheckResult& r : results) {
      out << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << format_double(std::round(r.seconds * 100) / 100)
          << " s): " << r.detail << '\n';
    }
    out << "report -> " << file.path().string() << '\n';
  }
  return report.at("pass").get<bool>() ? kSuccess : kVerificationFailure;
}

}  // namespace accelode::tools
