// extlab: run scenarios, lambda sweeps and the bundled check suite.
//
// Exit codes: 0 success, 1 invariant violation or failed check, 2 config error.

#include "extlab/checks.hpp"
#include "extlab/error.hpp"
#include "extlab/io.hpp"
#include "extlab/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kConfig = 2;

std::vector<double> parse_lambdas(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw extlab::ConfigError("bad lambda value '" + item + "'");
    }
    if (used != item.size()) throw extlab::ConfigError("bad lambda value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw extlab::ConfigError("--lambda needs a comma separated list");
  return out;
}

int report_scenario(const extlab::ScenarioResult& r) {
  if (!r.traj.samples.empty()) {
    std::cout << "status " << extlab::to_string(r.traj.status) << " t_end " << extlab::format_real(r.traj.t_end())
              << " steps " << r.traj.steps << '\n';
  }
  for (const auto& c : r.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << extlab::format_real(c.measured)
              << " tolerance=" << extlab::format_real(c.tolerance) << '\n';
  }
  for (const auto& f : r.files) std::cout << "wrote " << f << '\n';
  return r.ok() ? kOk : kViolation;
}

std::string check_prefix() {
  if (const char* env = std::getenv("EXTLAB_OUT"); env != nullptr && *env != '\0') return env;
  return "extlab_out/";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curve shortening flow and width comparison laboratory"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config, "Scenario JSON file")->required();

  std::string sweep_config;
  std::string lambdas;
  int sweep_jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Lambda sweep of a scenario's curve");
  sweep->add_option("config", sweep_config, "Scenario JSON file")->required();
  sweep->add_option("--lambda", lambdas, "Decreasing lambda values, comma separated")->required();
  sweep->add_option("--jobs", sweep_jobs, "Parallel sweep members")->check(CLI::PositiveNumber);

  std::string suite = "all";
  int jobs = 1;
  auto* check = app.add_subcommand("check", "Run the bundled check suite");
  check->add_option("suite", suite, "geometry, csf, ramp, comparison or all");
  check->add_option("--jobs", jobs, "Checks run concurrently")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (run->parsed()) {
      const extlab::ScenarioConfig cfg = extlab::load_scenario(config);
      return report_scenario(extlab::run_scenario(cfg));
    }
    if (sweep->parsed()) {
      const auto list = parse_lambdas(lambdas);
      const extlab::ScenarioConfig cfg = extlab::load_scenario(sweep_config);
      return report_scenario(extlab::run_sweep(cfg, list, sweep_jobs));
    }
    const auto results = extlab::run_checks(suite, jobs);
    const std::string text = extlab::format_report(results);
    const std::string path = check_prefix() + "check_" + suite + ".txt";
    extlab::write_text(path, text);
    std::cout << text;
    for (const auto& r : results) {
      std::cerr << r.name << ": " << extlab::format_real(r.runtime_s) << " s\n";
    }
    std::cout << "wrote " << path << '\n';
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    return all ? kOk : kViolation;
  } catch (const extlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const extlab::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  }
}
