#pragma once

// Loops of M lifted to ramps of M x S^1_lambda: the circle coordinate
// advances by one period along the loop, so the lift is embedded even when
// the loop is not immersed, and its curve shortening flow stays smooth.

#include "extlab/csf.hpp"
#include "extlab/monitors.hpp"

#include <optional>
#include <vector>

namespace extlab {

struct RampCurve {
  DiscreteCurve base;
  std::vector<double> theta;  // circle coordinate in [0, lambda)
  int winding = 1;
  double lambda = 0.0;
};

struct RampMonitors {
  std::vector<double> u;  // g(S, U)
  double u_min = 0.0;
  double ku_max = 0.0;    // max k/u
};

/// theta_i = lambda i / N.
RampCurve lift(const DiscreteCurve& c, double lambda);
/// Drops the circle coordinate.
DiscreteCurve project(const RampCurve& r);

/// The ramp as a closed curve of the product (circle coordinate unwrapped, one deck period).
DiscreteCurve assemble(const RampCurve& r, const MetricBackground& product);
RampCurve disassemble(const DiscreteCurve& c, const MetricBackground& product);

RampMonitors ramp_quantity(const RampCurve& r, const MetricBackground& product, double t);
RampMonitors ramp_quantity(const DiscreteCurve& assembled, const MetricBackground& product, double t);

/// Smallest distance between two distinct vertices of the assembled curve.
double min_vertex_separation(const DiscreteCurve& assembled, const MetricBackground& product, double t);

/// max_i |du/dt - u'' - (k^2 + Ric(S,S)) u| per interior sample (redistribution off).
Series u_evolution_residual(const FlowTrajectory& traj, const MetricBackground& product);

struct RampSample {
  double t = 0.0;
  double u_min = 0.0;
  double ku_max = 0.0;
  double separation = 0.0;
};

struct RampRun {
  MetricBackground product;
  FlowTrajectory traj;  // assembled curves in the product
  std::vector<RampSample> ramp;
  double ambient = 0.0;
  /// max over samples of ku_max(t) / (ku_max(t0) e^{C (t - t0)}).
  double envelope_ratio = 0.0;
  /// min over samples of u_min(t) / (u_min(t0) e^{-C (t - t0)}).
  double u_floor_ratio = kInf;

  [[nodiscard]] DiscreteCurve projected(std::size_t sample) const;
};

/// Lift, flow in product_with_circle(bg, lambda), monitor u. Throws
/// InvariantViolation if u_min ever drops to zero.
RampRun ramp_flow_run(const DiscreteCurve& c, double lambda, const MetricBackground& bg, double t0, double t1,
                      const FlowConfig& cfg);

struct SweepMember {
  double lambda = 0.0;
  double final_length = 0.0;  // projected
  double u_min_lo = 0.0;      // extrema of the u_min history
  double u_min_hi = 0.0;
  std::optional<double> distance_to_direct;
  FlowStatus status = FlowStatus::Completed;
  DiscreteCurve final_projected;
};

struct ConvergenceReport {
  std::vector<SweepMember> members;              // ordered as the lambda list
  std::vector<std::vector<double>> pairwise;     // Hausdorff between projected finals
  std::optional<FlowStatus> direct_status;       // empty when no direct reference was run
  std::optional<double> fitted_order;            // p in distance ~ C lambda^p
  double t_final = 0.0;
};

/// Runs one ramp flow per lambda (in parallel, merged in list order) and,
/// for immersed inputs, compares projected finals with direct CSF.
ConvergenceReport lambda_sweep(const DiscreteCurve& c, const std::vector<double>& lambdas, const MetricBackground& bg,
                               double t0, double t1, const FlowConfig& cfg, int jobs = 0);

/// Least-squares slope of log(distance) against log(lambda).
std::optional<double> fit_order(const std::vector<double>& lambdas, const std::vector<double>& distances);

}  // namespace extlab
