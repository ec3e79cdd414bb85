#pragma once

// Width of loops with closed-form minimal disks, the comparison ODE
// dw/dt = -2 pi - R_min w / 2 and everything built on it.

#include "extlab/csf.hpp"
#include "extlab/monitors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace extlab {

struct DiskOracle {
  enum class Kind { FlatCircle, SphericalCap };
  Kind kind = Kind::FlatCircle;
  double r = 0.0;    // flat radius
  double phi = 0.0;  // cap angular radius
  double a = 1.0;    // sphere radius

  static DiskOracle flat_circle(double r) { return {Kind::FlatCircle, r, 0.0, 1.0}; }
  static DiskOracle spherical_cap(double phi, double a) { return {Kind::SphericalCap, 0.0, phi, a}; }
};

/// pi r^2, or 2 pi a^2 (1 - cos phi) for a totally geodesic cap.
double disk_area_oracle(const DiskOracle& d);

/// Fits a round circle to the curve and returns the area of its minimal disk:
/// a planar disk in flat factors, the smaller totally geodesic cap in a sphere
/// factor. Empty when the curve is not round to relative tolerance `tol`.
/// Constant maps have width 0.
std::optional<double> oracle_width(const DiscreteCurve& c, const MetricBackground& bg, double t, double tol = 1e-6);

/// Supremum of member widths. Throws DomainError on a member without an oracle.
double family_width(const std::vector<DiscreteCurve>& family, const MetricBackground& bg, double t,
                    double tol = 1e-6);

using WidthSeries = Series;

/// Oracle width of every sample (throws DomainError when a sample is not round).
WidthSeries width_series(const FlowTrajectory& traj, const MetricBackground& bg, double tol = 1e-6);

struct ComparisonSolution {
  std::vector<SeriesPoint> w;
  double const_used = 1.0;              // shift c of the normalized width A / (t + c)
  std::optional<double> extinction_t;   // first zero of w
  bool unique_crossing = true;          // w stays negative after its first zero
};

/// Shift c with R_min(t) >= -(3/2)/(t + c) from initial data; 1 when R_min(t0) >= 0.
double normalization_const(const MetricBackground& bg, double t0);

/// RK4 on [t0, t1] (t1 clipped to the background domain) with step <= dt,
/// shortened near singular times so that h R_min / 2 <= 0.2.
ComparisonSolution comparison_ode(double w0, const MetricBackground& bg, double t0, double t1, double dt);

struct CapSample {
  double t = 0.0;
  double phi = 0.0;
  double area = 0.0;
};

struct CapReduction {
  std::vector<CapSample> samples;
  std::optional<double> extinction_t;  // phi reached 0
  /// Max over interior samples of |dA/dt - (-2 pi - R_min A / 2)| / |-2 pi - R_min A / 2|,
  /// dA/dt from centered differences of the samples.
  double worst_relative_defect = 0.0;
};

/// RK4 on d phi/dt = -cot(phi) / a(t)^2 for a totally geodesic cap in a
/// shrinking round 3-sphere, A = 2 pi a^2 (1 - cos phi).
CapReduction cap_flow_reduction(double phi0, const MetricBackground& bg, double t0, double t1, double dt);

/// Forward difference of A minus (-2 pi - R_min A / 2) at each sample but the last.
Series comparison_margin(const WidthSeries& ws, const MetricBackground& bg);

/// Forward difference of A / (t + c) plus 2 pi / (t + c).
Series normalized_width_check(const WidthSeries& ws, double shift);

struct ExtinctionBound {
  double t = kInf;
  /// "ode": zero of the comparison solution; "background": the background's
  /// own singular time came first; "normalized": the normalized-width bound.
  std::string source;
};

/// Time by which the width of a loop with initial width A0 at t0 must vanish.
ExtinctionBound extinction_bound(double a0, const MetricBackground& bg, double shift, double t0 = 0.0,
                                 double dt = 1e-4);

/// |int_D K dA + int_dD k_g ds - 2 pi| for a cap of angular radius phi on a sphere of radius a.
double gauss_bonnet_check(double phi, double a);

// ---- annulus proxy -------------------------------------------------------------

/// Area of the ruled surface made of quads between corresponding vertices of
/// two loops, each quad as half the cross product of its diagonals in the
/// metric. Symmetric in the two curves.
double annulus_proxy_area(const DiscreteCurve& c1, const DiscreteCurve& c2, const MetricBackground& bg, double t);

/// The proxy along two synchronized trajectories.
Series annulus_proxy(const FlowTrajectory& traj1, const FlowTrajectory& traj2, const MetricBackground& bg);

/// max_t [log mu(t) - log mu(t0) - (2n - 1) |Rm| (t - t0)], n the dimension of bg.
double annulus_growth_excess(const Series& mu, const MetricBackground& bg);

}  // namespace extlab
