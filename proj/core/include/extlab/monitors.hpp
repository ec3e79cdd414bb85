#pragma once

// Residuals of the evolution identities along sampled trajectories. Time
// derivatives are centered differences between neighbouring samples at a
// fixed parameter index, so trajectories must be produced with
// redistribution off.

#include "extlab/csf.hpp"

#include <vector>

namespace extlab {

struct SeriesPoint {
  double t = 0.0;
  double value = 0.0;
};
using Series = std::vector<SeriesPoint>;

[[nodiscard]] double series_max(const Series& s);
[[nodiscard]] double series_max_abs(const Series& s);

/// |d/dt g(X,X) + 2 Ric(X,X) + 2 g(X,X) k^2| at one vertex.
Series speed_identity_residual(const FlowTrajectory& traj, const MetricBackground& bg, int vertex);

/// |dL/dt + sum (k^2 + Ric(S,S)) ds|.
Series length_identity_residual(const FlowTrajectory& traj, const MetricBackground& bg);

/// max_i [dk/dt - k'' - k^3 - C (k + 1)] with C the ambient constant.
Series curvature_inequality_monitor(const FlowTrajectory& traj, const MetricBackground& bg, double ambient);

/// log L(t) - log L(t0) - C (t - t0) and the same for theta; both should stay <= tolerance.
struct GrowthReport {
  double worst_length_excess = -kInf;
  double worst_theta_excess = -kInf;
};
GrowthReport exponential_growth(const FlowTrajectory& traj, double ambient);

struct TimeInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ScalingStat {
  double t_star = 0.0;
  double sup_k2_dt = 0.0;  // sup of k_max^2 (t - t*) over (t*, t* + eps r^2]
};

struct ConcentrationReport {
  double measure_i_b = 0.0;              // measure of {t : int k^2 ds <= B}
  std::vector<TimeInterval> i_b;
  std::vector<TimeInterval> j_b;         // every arc of length r has int k ds <= eps
  std::vector<ScalingStat> scaling;
};

ConcentrationReport curvature_concentration(const FlowTrajectory& traj, const MetricBackground& bg, double b,
                                            double eps, double r);

/// Three-point second derivative in arclength of a cyclic vertex field.
double arclength_second_derivative(const std::vector<double>& f, const std::vector<double>& ds, std::size_t i);

/// Largest total curvature over arcs of length at most r (kInf if L < r).
double max_arc_curvature(const CurveGeometry& g, double r);

}  // namespace extlab
