#include "accelode/io.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace accelode {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("accelode_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("ACCELODE_OUT");
  }
  void TearDown() override {
    unsetenv("ACCELODE_OUT");
    fs::remove_all(dir_);
  }

  int run(const std::string& args) const {
    const std::string cmd = std::string(ACCELODE_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  /// Rows of a CSV as maps from header name to cell.
  static std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
    std::ifstream is(p);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
    auto split = [](const std::string& s) {
      std::vector<std::string> cells;
      std::stringstream ss(s);
      std::string c;
      while (std::getline(ss, c, ',')) cells.push_back(c);
      if (!s.empty() && s.back() == ',') cells.emplace_back();
      return cells;
    };
    if (std::getline(is, line)) header = split(line);
    while (std::getline(is, line)) {
      const auto cells = split(line);
      std::map<std::string, std::string> row;
      for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
      rows.push_back(row);
    }
    return rows;
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(run("--help"), 0);
  for (const char* sub : {"constants", "phase-portrait", "contour", "verify"}) {
    EXPECT_EQ(run(std::string(sub) + " --help"), 0) << sub;
  }
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("verify nonsense -o " + out("v")), 2);
  EXPECT_EQ(run("constants -k 0.5 -o " + out("c")), 2);
  EXPECT_EQ(run("phase-portrait --set colour=blue -o " + out("p")), 2);
  EXPECT_EQ(run("phase-portrait --q-min 3 --q-max 1 -o " + out("p")), 2);
  EXPECT_EQ(run("phase-portrait --objective quadratic --diag 2,1 -o " + out("p")), 2);
  EXPECT_EQ(run("contour --shape square -o " + out("p")), 2);
}

TEST_F(CliTest, ConstantsTable) {
  ASSERT_EQ(run("constants -k 1,9,1e6 -o " + out("c")), 0);
  const auto rows = read_csv(dir_ / "c" / "constants.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].at("two_d"), "1");
  EXPECT_EQ(rows[0].at("beta"), "0");
  EXPECT_EQ(rows[1].at("two_d"), "0.5");
  EXPECT_EQ(rows[1].at("beta"), "0.5");
  EXPECT_NEAR(parse_double(rows[2].at("two_d")), 2e-3, 1e-5);
  EXPECT_NEAR(parse_double(rows[2].at("beta")), 0.998, 1e-5);
  for (const auto& r : rows) EXPECT_NEAR(parse_double(r.at("sum")), 1.0, 1e-15);
  EXPECT_EQ(slurp(dir_ / "stdout.txt"), slurp(dir_ / "c" / "constants.csv"));
}

TEST_F(CliTest, EnvironmentOverridesOutputDir) {
  setenv("ACCELODE_OUT", out("env").c_str(), 1);
  ASSERT_EQ(run("constants -k 2 -o " + out("flag")), 0);
  EXPECT_TRUE(fs::exists(dir_ / "env" / "constants.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "flag"));
}

TEST_F(CliTest, IoErrors) {
  std::ofstream(dir_ / "blocker") << "x";
  EXPECT_EQ(run("constants -o " + out("blocker/sub")), 3);
  EXPECT_EQ(run("phase-portrait --config " + out("missing.cfg") + " -o " + out("p")), 3);
}

TEST_F(CliTest, PhasePortraitDefaultsAndDeterminism) {
  ASSERT_EQ(run("phase-portrait -o " + out("a")), 0);
  ASSERT_EQ(run("phase-portrait -o " + out("b")), 0);
  for (const char* name : {"phase_portrait_Ts0.1.csv", "phase_portrait_Ts0.5.csv", "phase_portrait_Ts1.csv",
                           "phase_portrait_Ts1.2.csv", "phase_portrait_summary.csv"}) {
    const std::string a = slurp(dir_ / "a" / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, slurp(dir_ / "b" / name)) << name;
    const std::string svg = std::string(name).substr(0, std::string(name).size() - 4) + ".svg";
    if (std::string(name).find("summary") == std::string::npos) {
      EXPECT_TRUE(fs::exists(dir_ / "a" / svg)) << svg;
    }
  }

  const auto summary = read_csv(dir_ / "a" / "phase_portrait_summary.csv");
  EXPECT_EQ(summary.size(), 4u * 36u);
  for (const auto& r : summary) {
    if (r.at("step_size") != "1") continue;
    const double q0 = parse_double(r.at("q0"));
    if (q0 >= 1.0) continue;
    EXPECT_EQ(r.at("status"), "converged") << q0;
    EXPECT_EQ(r.at("steps"), q0 == 0.0 ? "0" : "2") << q0;
  }
}

TEST_F(CliTest, PhasePortraitBandFlag) {
  ASSERT_EQ(run("phase-portrait --step-sizes 0.5 -o " + out("a")), 0);
  const double beta = (std::sqrt(5.0) - 1.0) / (std::sqrt(5.0) + 1.0);
  int flagged = 0;
  for (const auto& r : read_csv(dir_ / "a" / "phase_portrait_Ts0.5.csv")) {
    const double y = parse_double(r.at("q")) + beta * parse_double(r.at("p"));
    const bool band = y >= 1.0 && y < 2.0;
    EXPECT_EQ(r.at("in_middle_band"), band ? "true" : "false");
    flagged += band;
  }
  EXPECT_GT(flagged, 0);
}

TEST_F(CliTest, PhasePortraitDivergence) {
  ASSERT_EQ(run("phase-portrait --step-sizes 1.3 --q-min 4.4 --q-max 5 --steps 500 -o " + out("a")), 0);
  const auto summary = read_csv(dir_ / "a" / "phase_portrait_summary.csv");
  ASSERT_EQ(summary.size(), 4u);
  for (const auto& r : summary) EXPECT_EQ(r.at("status"), "diverged");
}

TEST_F(CliTest, ConfigFileAndOverrides) {
  std::ofstream(dir_ / "run.cfg") << "# experiment\nstep_sizes = 1\nq_min=-1\nq_max = 1\n\nq_step=0.5\nsteps=10\n";
  ASSERT_EQ(run("phase-portrait -c " + out("run.cfg") + " --set q_max=0.5 -o " + out("a")), 0);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "phase_portrait_Ts1.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "a" / "phase_portrait_Ts0.5.csv"));
  EXPECT_EQ(read_csv(dir_ / "a" / "phase_portrait_summary.csv").size(), 4u);
}

TEST_F(CliTest, ContourQuadraticCircle) {
  ASSERT_EQ(run("contour --objective quadratic --diag 3 --step-size 0.5 --steps 8 -o " + out("a")), 0);
  const auto rows = read_csv(dir_ / "a" / "contour.csv");
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double ratio = parse_double(rows[k].at("area")) / parse_double(rows[k - 1].at("area"));
    EXPECT_NEAR(ratio, 0.5, 1e-9);
    EXPECT_GE(parse_double(rows[k].at("max_radius")), parse_double(rows[k].at("R_k_bound")));
  }
}

TEST_F(CliTest, ContourZeroDamping) {
  ASSERT_EQ(run("contour --zero-damping true --step-size 0.5 --steps 10 -o " + out("a")), 0);
  const auto rows = read_csv(dir_ / "a" / "contour.csv");
  const double a0 = parse_double(rows.front().at("area"));
  for (const auto& r : rows) EXPECT_NEAR(parse_double(r.at("area")) / a0, 1.0, 1e-6);
}

TEST_F(CliTest, ContourLevelSetComparison) {
  ASSERT_EQ(run("contour --shape levelset --step-size 0.5 --steps 2 --vertices 512 -o " + out("a")), 0);
  const auto rows = read_csv(dir_ / "a" / "contour_levelset_comparison.csv");
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_GE(parse_double(r.at("margin")), 0.0);
}

TEST_F(CliTest, ContourReportsRadiusBoundFailure) {
  // On the piecewise objective every vertex falls inside R_k after a few
  // steps; the command reports this through its exit status.
  EXPECT_EQ(run("contour --step-size 0.5 --steps 6 -o " + out("a")), 1);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("radius bound: FAIL"), std::string::npos);
}

TEST_F(CliTest, VerifyEquivalence) {
  ASSERT_EQ(run("verify equivalence --json -o " + out("v")), 0);
  const auto report = nlohmann::json::parse(slurp(dir_ / "v" / "verify_equivalence.json"));
  EXPECT_TRUE(report.at("pass").get<bool>());
  EXPECT_EQ(report.at("checks").size(), 2u);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "stdout.txt")), report);
}

}  // namespace
}  // namespace accelode
