#include "extlab/error.hpp"
#include "extlab/scenario.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

using namespace extlab;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal = R"({
  "version": "v1",
  "background": "t3_flat",
  "curve": {"kind": "circle", "r": 1.0},
  "interval": [0.0, 0.1]
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
  return s;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("extlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

#ifdef EXTLAB_CLI
int cli(const std::string& args, const fs::path& out) {
  const std::string cmd = "EXTLAB_OUT='" + out.string() + "/' '" EXTLAB_CLI "' " + args + " > '" + out.string() +
                          "/stdout.txt' 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string config(const std::string& name) { return std::string(EXTLAB_CONFIG_DIR) + "/" + name; }
#endif

}  // namespace

TEST(ParseScenario, MinimalDefaults) {
  const auto cfg = parse_scenario(kMinimal);
  EXPECT_EQ(cfg.background, "t3_flat");
  ASSERT_EQ(cfg.curves.size(), 1u);
  EXPECT_EQ(cfg.curves[0].kind, CurveSpec::Kind::Circle);
  EXPECT_EQ(cfg.n, 128);
  EXPECT_FALSE(cfg.lambda.has_value());
  EXPECT_TRUE(cfg.flow.redistribute);
  EXPECT_EQ(cfg.output, "extlab_out/");
}

TEST(ParseScenario, RejectsMalformedInput) {
  EXPECT_THROW(parse_scenario("{"), ConfigError);
  EXPECT_THROW(parse_scenario("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "\"v1\"", "\"v2\"")), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "\"interval\"", "\"extra\": 1, \"interval\"")), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "t3_flat", "t9_flat")), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "[0.0, 0.1]", "[0.1, 0.0]")), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "\"circle\"", "\"spiral\"")), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "\"r\": 1.0", "\"r\": \"big\"")), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "\"interval\"", "\"N\": 8, \"interval\"")), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "\"interval\"", "\"lambda\": 1.5, \"interval\"")), ConfigError);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "\"interval\"", "\"checks\": [\"nope\"], \"interval\"")), ConfigError);
}

TEST(ParseScenario, ValidatesAgainstBackground) {
  // Past the singular time of the shrinking sphere.
  std::string s = replace(kMinimal, "t3_flat", "s3_shrinking");
  s = replace(s, "{\"kind\": \"circle\", \"r\": 1.0}", "{\"kind\": \"great_circle\"}");
  EXPECT_NO_THROW(parse_scenario(s));
  EXPECT_THROW(parse_scenario(replace(s, "[0.0, 0.1]", "[0.0, 0.3]")), ConfigError);
}

TEST(ParseScenario, FamilyNeedsLambda) {
  const std::string fam = replace(kMinimal, "\"curve\": {\"kind\": \"circle\", \"r\": 1.0}",
                                  "\"family\": [{\"kind\": \"constant\"}, {\"kind\": \"circle\", \"r\": 0.5}]");
  EXPECT_THROW(parse_scenario(fam), ConfigError);
  const auto cfg = parse_scenario(replace(fam, "\"interval\"", "\"lambda\": 0.2, \"interval\""));
  EXPECT_TRUE(cfg.is_family);
  EXPECT_EQ(cfg.curves.size(), 2u);
}

TEST(ParseScenario, BundledConfigsParse) {
#ifdef EXTLAB_CONFIG_DIR
  int count = 0;
  for (const auto& e : fs::directory_iterator(EXTLAB_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario(e.path())) << e.path();
    ++count;
  }
  EXPECT_GE(count, 5);
#else
  GTEST_SKIP();
#endif
}

TEST(BuildCurve, PolylineJitterIsSeeded) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  CurveSpec s;
  s.kind = CurveSpec::Kind::Polyline;
  s.anchors = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
  s.jitter = 0.05;
  const auto a = build_curve(s, bg, 48, 11);
  const auto b = build_curve(s, bg, 48, 11);
  const auto c = build_curve(s, bg, 48, 12);
  for (int i = 0; i < 48; ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_GT((a[0] - c[0]).norm(), 0.0);
}

TEST(RunScenario, ShrinkingCircleFinalLength) {
  const fs::path out = scratch("shrinking");
  auto cfg = parse_scenario(replace(kMinimal, "\"interval\"",
                                    "\"checks\": [\"circle_length\"], \"output\": \"" + out.string() +
                                        "/\", \"sample_dt\": 0.01, \"interval\""));
  unsetenv("EXTLAB_OUT");
  const auto r = run_scenario(cfg);
  EXPECT_TRUE(r.ok());
  ASSERT_FALSE(r.traj.samples.empty());
  EXPECT_NEAR(r.traj.samples.back().monitor.L, 2.0 * kPi * std::sqrt(0.8), 5e-3 * 2.0 * kPi * std::sqrt(0.8));
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_EQ(slurp(out / "trajectory.csv").rfind("t,L,theta,k2int,k_max,status", 0), 0u);
}

TEST(RunScenario, EnvironmentOverridesOutputPrefix) {
  const fs::path out = scratch("env");
  setenv("EXTLAB_OUT", (out.string() + "/x_").c_str(), 1);
  const auto cfg = parse_scenario(kMinimal);
  EXPECT_EQ(output_prefix(cfg), out.string() + "/x_");
  const auto r = run_scenario(cfg);
  unsetenv("EXTLAB_OUT");
  EXPECT_TRUE(fs::exists(out / "x_summary.json"));
  for (const auto& f : r.files) EXPECT_EQ(f.rfind(out.string() + "/x_", 0), 0u) << f;
}

TEST(RunScenario, FailedAssertionIsReported) {
  const fs::path out = scratch("fail");
  const auto cfg = parse_scenario(replace(kMinimal, "\"interval\"",
                                          "\"checks\": [\"constant\"], \"output\": \"" + out.string() +
                                              "/\", \"interval\""));
  unsetenv("EXTLAB_OUT");
  const auto r = run_scenario(cfg);
  EXPECT_FALSE(r.ok());
}

TEST(RunScenario, SweepWritesJson) {
  const fs::path out = scratch("sweep");
  const auto cfg = parse_scenario(replace(kMinimal, "\"interval\"",
                                          "\"N\": 32, \"output\": \"" + out.string() + "/\", \"interval\""));
  unsetenv("EXTLAB_OUT");
  run_sweep(cfg, {0.2, 0.1, 0.05}, 2);
  const std::string j = slurp(out / "sweep.json");
  EXPECT_NE(j.find("\"lambda\""), std::string::npos);
  EXPECT_NE(j.find("pairwise"), std::string::npos);
}

#ifdef EXTLAB_CLI

TEST(Cli, RunBundledConfigSucceeds) {
  const fs::path out = scratch("cli_ok");
  EXPECT_EQ(cli("run '" + config("shrinking_circle.json") + "'", out), 0) << slurp(out / "stdout.txt");
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "width.csv"));
}

TEST(Cli, ConfigErrorExitsTwo) {
  const fs::path out = scratch("cli_bad");
  {
    std::ofstream f(out / "bad.json");
    f << replace(kMinimal, "\"v1\"", "\"v0\"");
  }
  EXPECT_EQ(cli("run '" + (out / "bad.json").string() + "'", out), 2);
  EXPECT_EQ(cli("run '" + (out / "missing.json").string() + "'", out), 2);
  EXPECT_EQ(cli("frobnicate", out), 2);
  EXPECT_EQ(cli("check nosuchsuite", out), 2);
  EXPECT_EQ(cli("sweep '" + config("sweep_circle.json") + "' --lambda 0.1,abc", out), 2);
}

TEST(Cli, ViolationExitsOne) {
  const fs::path out = scratch("cli_violation");
  {
    std::ofstream f(out / "violation.json");
    f << replace(kMinimal, "\"interval\"", "\"checks\": [\"constant\"], \"interval\"");
  }
  EXPECT_EQ(cli("run '" + (out / "violation.json").string() + "'", out), 1);
}

TEST(Cli, SweepWritesOutputs) {
  const fs::path out = scratch("cli_sweep");
  EXPECT_EQ(cli("sweep '" + config("sweep_circle.json") + "' --lambda 0.2,0.1,0.05", out), 0)
      << slurp(out / "stdout.txt");
  EXPECT_TRUE(fs::exists(out / "sweep.json"));
}

TEST(Cli, CheckSuiteWritesReport) {
  const fs::path out = scratch("cli_check");
  EXPECT_EQ(cli("check geometry", out), 0) << slurp(out / "stdout.txt");
  const std::string report = slurp(out / "check_geometry.txt");
  EXPECT_EQ(report.rfind("PASS geometry/scalar_bound_equality", 0), 0u) << report;
}

#endif
