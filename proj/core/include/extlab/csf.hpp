#pragma once

#include "extlab/curve.hpp"

#include <string>
#include <vector>

namespace extlab {

struct FlowConfig {
  double cfl = 0.2;             // dt <= cfl * h^2
  bool redistribute = true;     // uniform-arclength resampling after every step
  double sample_dt = 0.0;       // trajectory sampling interval; 0 -> (t1 - t0) / 100
  double ceiling_factor = 1e3;  // curvature_blowup once k_max * L(t0) exceeds this
  double extinct_length = 0.0;  // > 0: stop with extinct_short once L drops below
  bool keep_curves = true;      // store the curve at every sample
  long max_steps = 200'000'000;
  double c0 = 10.0;             // ambient constant C = c0 * rm_bound
};

struct MonitorSample {
  double t = 0.0;
  double L = 0.0;
  double theta = 0.0;            // sum k ds
  double k2int = 0.0;            // sum k^2 ds
  double k_max = 0.0;
  double swept_area_rate = 0.0;  // sum |H| ds: area swept per unit time
  double swept_area = 0.0;       // accumulated along the trajectory
};

enum class FlowStatus { Completed, CurvatureBlowup, ExtinctShort };

std::string to_string(FlowStatus s);

struct FlowSample {
  double t = 0.0;
  DiscreteCurve curve;  // empty when keep_curves is off
  MonitorSample monitor;
};

struct FlowTrajectory {
  std::vector<FlowSample> samples;
  FlowStatus status = FlowStatus::Completed;
  long steps = 0;
  double k_ceiling = kInf;
  std::string message;

  [[nodiscard]] double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
};

/// Ambient constant of the evolution inequalities on [t0, t1].
double ambient_constant(const MetricBackground& bg, double t0, double t1, const FlowConfig& cfg);

MonitorSample monitors(const DiscreteCurve& c, const MetricBackground& bg, double t);
MonitorSample monitors(const CurveGeometry& g, double t);

/// One Heun (RK2) step of dc/dt = H with H evaluated at t and t + dt, then
/// optional arclength redistribution. Throws CflViolation or CurvatureCeiling.
DiscreteCurve csf_step(const DiscreteCurve& c, const MetricBackground& bg, double t, double dt, const FlowConfig& cfg,
                       double k_ceiling = kInf);

/// Resample to uniform metric chord spacing with a periodic cubic spline; vertex 0 is kept.
DiscreteCurve redistribute(const DiscreteCurve& c, const MetricBackground& bg, double t);

/// Flow on [t0, t1]. Constant maps are stationary. Stops early on curvature
/// blow-up (status CurvatureBlowup) or when extinct_length is reached.
FlowTrajectory run_flow(const DiscreteCurve& c0, const MetricBackground& bg, double t0, double t1,
                        const FlowConfig& cfg);

}  // namespace extlab
