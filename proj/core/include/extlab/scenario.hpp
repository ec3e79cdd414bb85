#pragma once

// Scenario files (JSON, "version": "v1") and the run / sweep pipelines.

#include "extlab/family.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace extlab {

struct CurveSpec {
  enum class Kind { Circle, GreatCircle, CapCircle, Constant, Polyline, BackAndForth, TorusGeodesic };
  Kind kind = Kind::Circle;
  double r = 1.0;                  // circle radius
  int plane_a = 0;                 // circle plane axes
  int plane_b = 1;
  double phi = 1.0;                // cap angular radius
  double arc = 0.3;                // back-and-forth arc length
  double bend = 1.0;               // back-and-forth bend radius (flat)
  int axis = 0;                    // torus geodesic axis
  std::vector<std::vector<double>> anchors;  // polyline anchors (embedding coordinates)
  double jitter = 0.0;             // polyline: seeded uniform perturbation of the anchors
};

struct ScenarioConfig {
  std::string background;
  std::vector<CurveSpec> curves;    // one curve, or a family when `family` was given
  bool is_family = false;
  std::optional<double> lambda;
  double t0 = 0.0;
  double t1 = 0.0;
  int n = 128;
  int polygon_anchors = 0;          // > 0: geodesic polygon preprocessing
  FlowConfig flow;
  std::vector<std::string> checks;
  std::string output = "extlab_out/";
  unsigned long long seed = 0;
  double xi = 0.0;                  // family threshold; 0 -> default
  double tolerance = 1e-2;          // relative tolerance of the scenario assertions
};

/// Names accepted in "checks".
const std::vector<std::string>& scenario_check_names();

/// Parses and validates a config. Throws ConfigError on malformed input,
/// unknown names, or values out of range.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Builds the initial curve of a spec (seeded for polyline jitter).
DiscreteCurve build_curve(const CurveSpec& spec, const MetricBackground& bg, int n, unsigned long long seed);

struct ScenarioCheck {
  std::string name;
  bool passed = true;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct ScenarioResult {
  FlowTrajectory traj;               // empty for families
  std::vector<std::string> files;    // written outputs, in write order
  std::vector<ScenarioCheck> checks;
  [[nodiscard]] bool ok() const;
};

/// EXTLAB_OUT when set, else cfg.output.
std::string output_prefix(const ScenarioConfig& cfg);

/// Runs the pipeline and writes outputs under the prefix. Assertion failures
/// are reported in the result; ramp positivity failures throw InvariantViolation.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// lambda_sweep of the scenario's curve; writes <prefix>sweep.json.
ScenarioResult run_sweep(const ScenarioConfig& cfg, const std::vector<double>& lambdas, int jobs = 1);

}  // namespace extlab
