#pragma once

// Finite-family deformation: every loop is resampled as a geodesic polygon,
// lifted to a ramp, flowed in M x S^1_lambda and projected back. Each loop
// ends either with width under the comparison barrier or with short length.

#include "extlab/comparison.hpp"
#include "extlab/ramp.hpp"

#include <string>
#include <vector>

namespace extlab {

struct FamilyConfig {
  double lambda = 0.2;
  int anchors = 0;         // geodesic polygon vertices; 0 keeps every vertex
  double xi = 0.0;         // 0 -> 1e-2 * max initial length
  double fit_tol = 1e-4;   // roundness tolerance of the width oracle
  double ode_dt = 1e-4;
  int jobs = 0;            // 0 -> hardware concurrency
  FlowConfig flow;
};

enum class Verdict { WidthBounded, Short };

std::string to_string(Verdict v);

struct CurveOutcome {
  int curve_id = 0;
  Verdict verdict = Verdict::Short;
  double final_area = 0.0;    // oracle width at the end (WidthBounded)
  double final_length = 0.0;  // projected length at the end
  double bound = 0.0;         // w_c(t1) + xi, or xi for Short
  double t_end = 0.0;
  FlowStatus status = FlowStatus::Completed;
};

struct FamilyOutcome {
  std::vector<CurveOutcome> curves;  // input order
  double xi = 0.0;
};

/// Throws InvariantViolation when a loop satisfies neither branch or a
/// constant map stops being constant.
FamilyOutcome deform_family(const std::vector<DiscreteCurve>& family, const MetricBackground& bg, double t0,
                            double t1, const FamilyConfig& cfg);

}  // namespace extlab
