#include "extlab/monitors.hpp"

#include "extlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace extlab {

namespace {

std::vector<CurveGeometry> sample_geometries(const FlowTrajectory& traj, const MetricBackground& bg) {
  if (traj.samples.size() < 3) throw DomainError("residual needs at least three trajectory samples");
  std::vector<CurveGeometry> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    if (s.curve.size() == 0) throw DomainError("residual needs stored curves (keep_curves)");
    out.push_back(curve_geometry(s.curve, bg, s.t));
  }
  return out;
}

std::vector<TimeInterval> runs(const FlowTrajectory& traj, const std::vector<bool>& good, bool include_last) {
  std::vector<TimeInterval> out;
  const std::size_t n = good.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (!good[j]) continue;
    const bool is_last = j + 1 == n;
    if (is_last && !include_last) continue;
    const double lo = traj.samples[j].t;
    const double hi = is_last ? lo : traj.samples[j + 1].t;
    if (!out.empty() && out.back().hi == lo) {
      out.back().hi = hi;
    } else {
      out.push_back({lo, hi});
    }
  }
  return out;
}

}  // namespace

double arclength_second_derivative(const std::vector<double>& f, const std::vector<double>& ds, std::size_t i) {
  const std::size_t n = f.size();
  const std::size_t ip = (i + 1) % n;
  const std::size_t im = (i + n - 1) % n;
  const double hp = 0.5 * (ds[i] + ds[ip]);
  const double hm = 0.5 * (ds[im] + ds[i]);
  return 2.0 * ((f[ip] - f[i]) / hp - (f[i] - f[im]) / hm) / (hp + hm);
}

double series_max(const Series& s) {
  double m = -kInf;
  for (const auto& p : s) m = std::max(m, p.value);
  return m;
}

double series_max_abs(const Series& s) {
  double m = 0.0;
  for (const auto& p : s) m = std::max(m, std::abs(p.value));
  return m;
}

Series speed_identity_residual(const FlowTrajectory& traj, const MetricBackground& bg, int vertex) {
  const auto geo = sample_geometries(traj, bg);
  const auto n = static_cast<int>(geo.front().k.size());
  if (vertex < 0 || vertex >= n) throw DomainError("vertex index out of range");
  const auto gxx = [&](std::size_t j) {
    const Vec& x = geo[j].X[static_cast<std::size_t>(vertex)];
    return inner(bg, traj.samples[j].t, x, x);
  };
  Series out;
  for (std::size_t j = 1; j + 1 < geo.size(); ++j) {
    const double t = traj.samples[j].t;
    const double dgdt = (gxx(j + 1) - gxx(j - 1)) / (traj.samples[j + 1].t - traj.samples[j - 1].t);
    const Vec& x = geo[j].X[static_cast<std::size_t>(vertex)];
    const double k = geo[j].k[static_cast<std::size_t>(vertex)];
    const double rhs = -2.0 * ricci_form(bg, x, x) - 2.0 * gxx(j) * k * k;
    out.push_back({t, std::abs(dgdt - rhs)});
  }
  return out;
}

Series length_identity_residual(const FlowTrajectory& traj, const MetricBackground& bg) {
  const auto geo = sample_geometries(traj, bg);
  Series out;
  for (std::size_t j = 1; j + 1 < geo.size(); ++j) {
    const double dldt =
        (geo[j + 1].length() - geo[j - 1].length()) / (traj.samples[j + 1].t - traj.samples[j - 1].t);
    double rhs = 0.0;
    const auto& g = geo[j];
    for (std::size_t i = 0; i < g.k.size(); ++i) {
      rhs -= (g.k[i] * g.k[i] + ricci_form(bg, g.S[i], g.S[i])) * g.ds[i];
    }
    out.push_back({traj.samples[j].t, std::abs(dldt - rhs)});
  }
  return out;
}

Series curvature_inequality_monitor(const FlowTrajectory& traj, const MetricBackground& bg, double ambient) {
  const auto geo = sample_geometries(traj, bg);
  for (const auto& g : geo) {
    if (!g.immersed || !std::isfinite(g.k_max())) throw DomainError("curvature monitor needs a smooth trajectory");
  }
  Series out;
  for (std::size_t j = 1; j + 1 < geo.size(); ++j) {
    const double span = traj.samples[j + 1].t - traj.samples[j - 1].t;
    const auto& g = geo[j];
    double worst = -kInf;
    for (std::size_t i = 0; i < g.k.size(); ++i) {
      const double dkdt = (geo[j + 1].k[i] - geo[j - 1].k[i]) / span;
      const double kpp = arclength_second_derivative(g.k, g.ds, i);
      const double k = g.k[i];
      worst = std::max(worst, dkdt - kpp - k * k * k - ambient * (k + 1.0));
    }
    out.push_back({traj.samples[j].t, worst});
  }
  return out;
}

GrowthReport exponential_growth(const FlowTrajectory& traj, double ambient) {
  GrowthReport r;
  if (traj.samples.empty()) return r;
  const auto& first = traj.samples.front().monitor;
  for (const auto& s : traj.samples) {
    const double dt = s.t - first.t;
    if (first.L > 0.0 && s.monitor.L > 0.0) {
      r.worst_length_excess = std::max(r.worst_length_excess, std::log(s.monitor.L / first.L) - ambient * dt);
    }
    if (first.theta > 0.0 && s.monitor.theta > 0.0) {
      r.worst_theta_excess = std::max(r.worst_theta_excess, std::log(s.monitor.theta / first.theta) - ambient * dt);
    }
  }
  return r;
}

double max_arc_curvature(const CurveGeometry& g, double r) {
  const std::size_t n = g.k.size();
  if (g.length() < r) return kInf;
  double worst = 0.0;
  for (std::size_t start = 0; start < n; ++start) {
    double len = 0.0;
    double total = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const std::size_t i = (start + m) % n;
      if (len + g.ds[i] > r) break;
      len += g.ds[i];
      total += std::isfinite(g.k[i]) ? g.k[i] * g.ds[i] : kInf;
    }
    worst = std::max(worst, total);
  }
  return worst;
}

ConcentrationReport curvature_concentration(const FlowTrajectory& traj, const MetricBackground& bg, double b,
                                            double eps, double r) {
  if (!(b > 0.0) || !(eps > 0.0) || !(r > 0.0)) throw DomainError("B, eps and r must be positive");
  ConcentrationReport rep;
  const std::size_t n = traj.samples.size();
  std::vector<bool> in_i(n);
  std::vector<bool> in_j(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = traj.samples[j];
    in_i[j] = s.monitor.k2int <= b;
    if (s.curve.size() != 0 && !s.curve.is_constant()) {
      in_j[j] = max_arc_curvature(curve_geometry(s.curve, bg, s.t), r) <= eps;
    } else {
      in_j[j] = s.curve.size() != 0;  // constant map: no curvature anywhere
    }
    if (in_i[j] && j + 1 < n) rep.measure_i_b += traj.samples[j + 1].t - s.t;
  }
  rep.i_b = runs(traj, in_i, false);
  rep.j_b = runs(traj, in_j, true);
  for (const auto& iv : rep.j_b) {
    ScalingStat st{iv.lo, 0.0};
    for (const auto& s : traj.samples) {
      if (s.t <= iv.lo || s.t > iv.lo + eps * r * r) continue;
      st.sup_k2_dt = std::max(st.sup_k2_dt, s.monitor.k_max * s.monitor.k_max * (s.t - iv.lo));
    }
    rep.scaling.push_back(st);
  }
  return rep;
}

}  // namespace extlab
