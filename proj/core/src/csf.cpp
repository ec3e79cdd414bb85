#include "extlab/csf.hpp"

#include "extlab/error.hpp"
#include "extlab/spline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace extlab {

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::Completed:
      return "completed";
    case FlowStatus::CurvatureBlowup:
      return "curvature_blowup";
    case FlowStatus::ExtinctShort:
      return "extinct_short";
  }
  return "unknown";
}

double ambient_constant(const MetricBackground& bg, double t0, double t1, const FlowConfig& cfg) {
  return cfg.c0 * bg.rm_bound_sup(t0, t1);
}

MonitorSample monitors(const CurveGeometry& g, double t) {
  MonitorSample m;
  m.t = t;
  for (std::size_t i = 0; i < g.k.size(); ++i) {
    m.L += g.ds[i];
    if (g.ds[i] == 0.0) continue;  // non-immersed vertex carries no arclength
    m.theta += g.k[i] * g.ds[i];
    m.k2int += g.k[i] * g.k[i] * g.ds[i];
  }
  m.k_max = g.k_max();
  m.swept_area_rate = m.theta;
  return m;
}

MonitorSample monitors(const DiscreteCurve& c, const MetricBackground& bg, double t) {
  bg.require_time(t);
  if (c.is_constant()) {
    MonitorSample m;
    m.t = t;
    return m;
  }
  return monitors(curve_geometry(c, bg, t), t);
}

namespace {

DiscreteCurve heun(const DiscreteCurve& c, const CurveGeometry& g1, const MetricBackground& bg, double t, double dt) {
  const int n = c.size();
  std::vector<Vec> stage(n);
  for (int i = 0; i < n; ++i) {
    stage[i] = c[i] + dt * g1.H[i];
    retract(bg, stage[i]);
  }
  const DiscreteCurve predictor(stage, c.wrap());
  const CurveGeometry g2 = curve_geometry(predictor, bg, t + dt);
  for (int i = 0; i < n; ++i) {
    stage[i] = c[i] + (0.5 * dt) * (g1.H[i] + g2.H[i]);
    retract(bg, stage[i]);
  }
  return DiscreteCurve(std::move(stage), c.wrap());
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

DiscreteCurve redistribute(const DiscreteCurve& c, const MetricBackground& bg, double t) {
  const int n = c.size();
  std::vector<double> knots(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    knots[i] = s;
    s += chord_distance(bg, t, c[i], c.vertex(i + 1));
  }
  const double total = s;
  if (!(total > 0.0)) return c;
  std::vector<Vec> periodic(n);
  for (int i = 0; i < n; ++i) periodic[i] = c[i] - (knots[i] / total) * c.wrap();
  const PeriodicSpline spline(std::move(knots), total, std::move(periodic));
  std::vector<Vec> out(n);
  out[0] = c[0];
  for (int j = 1; j < n; ++j) {
    const double target = total * j / n;
    out[j] = spline(target) + (target / total) * c.wrap();
    retract(bg, out[j]);
  }
  return DiscreteCurve(std::move(out), c.wrap());
}

DiscreteCurve csf_step(const DiscreteCurve& c, const MetricBackground& bg, double t, double dt, const FlowConfig& cfg,
                       double k_ceiling) {
  if (!(dt > 0.0)) throw CflViolation("time step must be positive");
  bg.require_time(t);
  bg.require_time(t + dt);
  if (c.is_constant()) return c;
  const CurveGeometry g = curve_geometry(c, bg, t);
  if (g.k_max() > k_ceiling) throw CurvatureCeiling("k_max " + describe(g.k_max()) + " exceeds ceiling");
  const double limit = cfg.cfl * g.h_min * g.h_min;
  if (dt > limit * (1.0 + 1e-12)) {
    throw CflViolation("dt " + describe(dt) + " exceeds cfl*h^2 = " + describe(limit));
  }
  DiscreteCurve next = heun(c, g, bg, t, dt);
  if (cfg.redistribute) next = redistribute(next, bg, t + dt);
  return next;
}

FlowTrajectory run_flow(const DiscreteCurve& c0, const MetricBackground& bg, double t0, double t1,
                        const FlowConfig& cfg) {
  if (!(t1 > t0)) throw DomainError("flow interval must have t1 > t0");
  bg.require_time(t0);
  bg.require_time(t1);
  const double sample_dt = cfg.sample_dt > 0.0 ? cfg.sample_dt : (t1 - t0) / 100.0;
  const long last = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / sample_dt - 1e-9)));
  const auto sample_time = [&](long j) { return j >= last ? t1 : t0 + static_cast<double>(j) * sample_dt; };

  FlowTrajectory traj;
  const auto record = [&](double t, const DiscreteCurve& c, MonitorSample m) {
    if (!traj.samples.empty()) {
      const auto& prev = traj.samples.back().monitor;
      m.swept_area = prev.swept_area + 0.5 * (prev.swept_area_rate + m.swept_area_rate) * (t - prev.t);
    }
    traj.samples.push_back({t, cfg.keep_curves ? c : DiscreteCurve(), m});
  };

  if (c0.is_constant()) {
    MonitorSample zero;
    for (long j = 0; j <= last; ++j) {
      zero.t = sample_time(j);
      record(zero.t, c0, zero);
    }
    return traj;
  }

  DiscreteCurve c = c0;
  double t = t0;
  CurveGeometry g = curve_geometry(c, bg, t);
  const double l0 = g.length();
  traj.k_ceiling = cfg.ceiling_factor / l0;
  record(t, c, monitors(g, t));
  if (g.k_max() > traj.k_ceiling) {
    traj.status = FlowStatus::CurvatureBlowup;
    traj.message = "initial curvature exceeds ceiling (k_max = " + describe(g.k_max()) + ")";
    return traj;
  }

  long j = 1;
  double next = sample_time(j);
  while (true) {
    if (traj.steps >= cfg.max_steps) throw InvariantViolation("run_flow exceeded max_steps");
    const double limit = cfg.cfl * g.h_min * g.h_min;
    const bool lands = next - t <= limit;
    const double dt = lands ? next - t : limit;
    c = heun(c, g, bg, t, dt);
    if (cfg.redistribute) c = redistribute(c, bg, lands ? next : t + dt);
    t = lands ? next : t + dt;
    ++traj.steps;
    g = curve_geometry(c, bg, t);
    const MonitorSample m = monitors(g, t);
    if (m.k_max > traj.k_ceiling) {
      record(t, c, m);
      traj.status = FlowStatus::CurvatureBlowup;
      traj.message = "k_max exceeded ceiling at t = " + describe(t);
      break;
    }
    if (cfg.extinct_length > 0.0 && m.L < cfg.extinct_length) {
      record(t, c, m);
      traj.status = FlowStatus::ExtinctShort;
      break;
    }
    if (lands) {
      record(t, c, m);
      if (j >= last) break;
      next = sample_time(++j);
    }
  }
  return traj;
}

}  // namespace extlab
