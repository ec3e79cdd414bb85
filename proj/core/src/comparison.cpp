#include "extlab/comparison.hpp"

#include "extlab/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace extlab {

double disk_area_oracle(const DiskOracle& d) {
  switch (d.kind) {
    case DiskOracle::Kind::FlatCircle:
      if (!(d.r > 0.0) || !std::isfinite(d.r)) throw DomainError("flat disk needs r > 0");
      return kPi * d.r * d.r;
    case DiskOracle::Kind::SphericalCap: {
      if (!(d.phi > 0.0 && d.phi < kPi)) throw DomainError("cap needs phi in (0, pi)");
      if (!(d.a > 0.0) || !std::isfinite(d.a)) throw DomainError("cap needs a > 0");
      const double s = std::sin(0.5 * d.phi);
      return 4.0 * kPi * d.a * d.a * s * s;  // 2 pi a^2 (1 - cos phi) without cancellation
    }
  }
  return 0.0;
}

namespace {

using Dyn = Eigen::MatrixXd;

struct BlockFit {
  Eigen::VectorXd center;
  double radius = 0.0;
  double deviation = 0.0;  // relative
};

// Principal plane of the vertex cloud; nullopt if the cloud is not planar.
std::optional<std::pair<Eigen::VectorXd, Dyn>> principal_plane(const Dyn& pts, double tol) {
  const Eigen::VectorXd mean = pts.rowwise().mean();
  const Dyn centered = pts.colwise() - mean;
  const Dyn cov = centered * centered.transpose() / static_cast<double>(pts.cols());
  Eigen::SelfAdjointEigenSolver<Dyn> es(cov);
  const auto& ev = es.eigenvalues();  // ascending
  const Eigen::Index d = ev.size();
  if (d < 2 || !(ev(d - 2) > 0.0)) return std::nullopt;
  if (d > 2 && std::sqrt(std::max(0.0, ev(d - 3))) > tol * std::sqrt(ev(d - 1))) return std::nullopt;
  return std::make_pair(mean, Dyn(es.eigenvectors().rightCols(2)));
}

std::optional<BlockFit> fit_flat_circle(const Dyn& pts, double tol) {
  const auto plane = principal_plane(pts, tol);
  if (!plane) return std::nullopt;
  const auto& [mean, basis] = *plane;
  const Eigen::Index n = pts.cols();
  // Algebraic circle fit in the plane: x^2 + y^2 + D x + E y + F = 0.
  Dyn a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d q = basis.transpose() * (pts.col(i) - mean);
    a(i, 0) = q.x();
    a(i, 1) = q.y();
    a(i, 2) = 1.0;
    b(i) = -q.squaredNorm();
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const Eigen::Vector2d c2(-0.5 * sol(0), -0.5 * sol(1));
  const double r2 = c2.squaredNorm() - sol(2);
  if (!(r2 > 0.0)) return std::nullopt;
  BlockFit fit;
  fit.center = mean + basis * c2;
  fit.radius = std::sqrt(r2);
  for (Eigen::Index i = 0; i < n; ++i) {
    fit.deviation = std::max(fit.deviation, std::abs((pts.col(i) - fit.center).norm() - fit.radius) / fit.radius);
  }
  return fit;
}

// Circle on the unit sphere: the plane's foot point from the origin is its center.
std::optional<BlockFit> fit_sphere_circle(const Dyn& pts, double tol) {
  const auto plane = principal_plane(pts, tol);
  if (!plane) return std::nullopt;
  const auto& [mean, basis] = *plane;
  BlockFit fit;
  fit.center = mean - basis * (basis.transpose() * mean);
  const double cosphi = std::min(1.0, fit.center.norm());
  fit.radius = std::sqrt(std::max(0.0, 1.0 - cosphi * cosphi));
  if (!(fit.radius > 0.0)) return std::nullopt;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    fit.deviation = std::max(fit.deviation, std::abs((pts.col(i) - fit.center).norm() - fit.radius) / fit.radius);
  }
  return fit;
}

}  // namespace

std::optional<double> oracle_width(const DiscreteCurve& c, const MetricBackground& bg, double t, double tol) {
  bg.require_time(t);
  if (c.is_constant()) return 0.0;
  if (c.wrap().size() != 0 && c.wrap().norm() != 0.0) return std::nullopt;  // not contractible as sampled
  const int n = c.size();
  const Factor* moving = nullptr;
  for (const auto& f : bg.factors()) {
    const int e = f.embed_dim();
    double spread = 0.0;
    for (int i = 1; i < n; ++i) spread = std::max(spread, (c[i].segment(f.offset, e) - c[0].segment(f.offset, e)).norm());
    if (spread == 0.0) continue;
    if (moving != nullptr) return std::nullopt;  // two factors move: no product oracle
    moving = &f;
  }
  if (moving == nullptr || moving->kind == Factor::Kind::Circle) return std::nullopt;

  const int e = moving->embed_dim();
  Dyn pts(e, n);
  for (int i = 0; i < n; ++i) pts.col(i) = c[i].segment(moving->offset, e);

  if (moving->kind == Factor::Kind::Flat) {
    const auto fit = fit_flat_circle(pts, tol);
    if (!fit || fit->deviation > tol) return std::nullopt;
    return disk_area_oracle(DiskOracle::flat_circle(fit->radius));
  }
  const auto fit = fit_sphere_circle(pts, tol);
  if (!fit || fit->deviation > tol) return std::nullopt;
  const double phi = std::asin(std::min(1.0, fit->radius));  // smaller cap
  if (!(phi > 0.0)) return std::nullopt;
  return disk_area_oracle(DiskOracle::spherical_cap(phi, std::sqrt(moving->scale2(t))));
}

double family_width(const std::vector<DiscreteCurve>& family, const MetricBackground& bg, double t, double tol) {
  if (family.empty()) throw DomainError("family is empty");
  double w = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto a = oracle_width(family[i], bg, t, tol);
    if (!a) throw DomainError("family member " + std::to_string(i) + " has no closed-form minimal disk");
    w = std::max(w, *a);
  }
  return w;
}

WidthSeries width_series(const FlowTrajectory& traj, const MetricBackground& bg, double tol) {
  WidthSeries out;
  for (const auto& s : traj.samples) {
    if (s.curve.size() == 0) throw DomainError("width series needs stored curves");
    const auto a = oracle_width(s.curve, bg, s.t, tol);
    if (!a) throw DomainError("sample at t = " + std::to_string(s.t) + " has no closed-form minimal disk");
    out.push_back({s.t, *a});
  }
  return out;
}

double normalization_const(const MetricBackground& bg, double t0) {
  const double r0 = scalar_min(bg, t0);
  if (r0 >= 0.0) return 1.0;
  return -1.5 / r0 - t0;
}

ComparisonSolution comparison_ode(double w0, const MetricBackground& bg, double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  bg.require_time(t0);
  t1 = std::min(t1, bg.t_domain().hi);
  if (!(t1 > t0)) throw DomainError("comparison interval is empty");
  ComparisonSolution sol;
  sol.const_used = normalization_const(bg, t0);

  const auto rhs = [&](double t, double w) { return -2.0 * kPi - 0.5 * scalar_min(bg, t) * w; };
  const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
  const double h0 = (t1 - t0) / static_cast<double>(n);
  double w = w0;
  double t = t0;
  sol.w.push_back({t0, w});
  while (t < t1) {
    double tn = std::min(t1, t0 + h0 * (std::floor((t - t0) / h0 + 1e-6) + 1.0));
    // Near a singular time R_min blows up; keep h R_min / 2 inside the RK4 stability region.
    while (0.5 * std::max(std::abs(scalar_min(bg, t)), std::abs(scalar_min(bg, tn))) * (tn - t) > 0.2) {
      tn = t + 0.5 * (tn - t);
    }
    const double h = tn - t;
    const double k1 = rhs(t, w);
    const double k2 = rhs(t + 0.5 * h, w + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, w + 0.5 * h * k2);
    const double k4 = rhs(tn, w + h * k3);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    sol.w.push_back({tn, w});
    t = tn;
  }

  for (std::size_t j = 0; j < sol.w.size(); ++j) {
    if (sol.w[j].value > 0.0) continue;
    if (j == 0) {
      sol.extinction_t = sol.w[0].t;
    } else {
      const auto& a = sol.w[j - 1];
      const auto& b = sol.w[j];
      sol.extinction_t = a.t + (b.t - a.t) * a.value / (a.value - b.value);
    }
    for (std::size_t m = j + 1; m < sol.w.size(); ++m) {
      if (sol.w[m].value >= 0.0) sol.unique_crossing = false;
    }
    break;
  }
  return sol;
}

CapReduction cap_flow_reduction(double phi0, const MetricBackground& bg, double t0, double t1, double dt) {
  if (bg.family() != Family::RoundSphere3Shrinking) throw DomainError("cap reduction needs the shrinking 3-sphere");
  if (!(phi0 > 0.0 && phi0 < kPi)) throw DomainError("phi0 must lie in (0, pi)");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  bg.require_time(t0);
  t1 = std::min(t1, bg.t_domain().hi);
  if (!(t1 > t0)) throw DomainError("cap interval is empty");
  const Factor& f = bg.factors().front();
  const auto a2 = [&](double t) { return f.scale2(t); };
  const auto area = [&](double t, double phi) { return 2.0 * kPi * a2(t) * (1.0 - std::cos(phi)); };

  CapReduction out;
  const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
  const double h = (t1 - t0) / static_cast<double>(n);
  double phi = phi0;
  out.samples.push_back({t0, phi, area(t0, phi)});

  // d phi/dt = -cot(phi)/a^2 is stiff as phi -> 0, where the cap becomes
  // tiny; the tail is integrated in c = cos(phi), dc/dt = c / a^2, which is regular.
  constexpr double kSwitch = 0.2;
  const auto fphi = [&](double t, double p) { return -1.0 / (std::tan(p) * a2(t)); };
  const auto fcos = [&](double t, double c) { return c / a2(t); };
  bool tail = phi0 < kSwitch;
  double c = std::cos(phi0);

  for (long j = 0; j < n; ++j) {
    const double t = t0 + h * static_cast<double>(j);
    const double tn = j + 1 == n ? t1 : t0 + h * static_cast<double>(j + 1);
    if (!tail) {
      const double k1 = fphi(t, phi);
      const double k2 = fphi(t + 0.5 * h, phi + 0.5 * h * k1);
      const double k3 = fphi(t + 0.5 * h, phi + 0.5 * h * k2);
      const double k4 = fphi(tn, phi + h * k3);
      phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      c = std::cos(phi);
      if (phi < kSwitch) tail = true;
    } else {
      const double k1 = fcos(t, c);
      const double k2 = fcos(t + 0.5 * h, c + 0.5 * h * k1);
      const double k3 = fcos(t + 0.5 * h, c + 0.5 * h * k2);
      const double k4 = fcos(tn, c + h * k3);
      const double cn = c + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (cn >= 1.0) {
        out.extinction_t = t + h * (1.0 - c) / (cn - c);
        break;
      }
      c = cn;
      phi = std::acos(c);
    }
    out.samples.push_back({tn, phi, 2.0 * kPi * a2(tn) * (1.0 - c)});
  }

  for (std::size_t j = 1; j + 1 < out.samples.size(); ++j) {
    const auto& p = out.samples[j - 1];
    const auto& q = out.samples[j + 1];
    const double measured = (q.area - p.area) / (q.t - p.t);
    const auto& s = out.samples[j];
    const double bound = -2.0 * kPi - 0.5 * scalar_min(bg, s.t) * s.area;
    out.worst_relative_defect = std::max(out.worst_relative_defect, std::abs(measured - bound) / std::abs(bound));
  }
  return out;
}

Series comparison_margin(const WidthSeries& ws, const MetricBackground& bg) {
  if (ws.size() < 2) throw DomainError("comparison margin needs at least two samples");
  bool nonzero = false;
  for (const auto& p : ws) nonzero = nonzero || p.value != 0.0;
  if (!nonzero) throw DomainError("comparison margin needs a nonconstant loop (A is identically 0)");
  Series out;
  for (std::size_t j = 0; j + 1 < ws.size(); ++j) {
    const double fwd = (ws[j + 1].value - ws[j].value) / (ws[j + 1].t - ws[j].t);
    out.push_back({ws[j].t, fwd - (-2.0 * kPi - 0.5 * scalar_min(bg, ws[j].t) * ws[j].value)});
  }
  return out;
}

Series normalized_width_check(const WidthSeries& ws, double shift) {
  if (ws.size() < 2) throw DomainError("normalized width check needs at least two samples");
  bool nonzero = false;
  for (const auto& p : ws) nonzero = nonzero || p.value != 0.0;
  if (!nonzero) throw DomainError("normalized width check needs a nonconstant loop (A is identically 0)");
  Series out;
  for (std::size_t j = 0; j + 1 < ws.size(); ++j) {
    const double s0 = ws[j].t + shift;
    const double s1 = ws[j + 1].t + shift;
    if (!(s0 > 0.0) || !(s1 > 0.0)) throw DomainError("t + const must stay positive");
    const double fwd = (ws[j + 1].value / s1 - ws[j].value / s0) / (ws[j + 1].t - ws[j].t);
    out.push_back({ws[j].t, fwd + 2.0 * kPi / s0});
  }
  return out;
}

ExtinctionBound extinction_bound(double a0, const MetricBackground& bg, double shift, double t0, double dt) {
  if (!(a0 >= 0.0)) throw DomainError("initial width must be nonnegative");
  if (!(t0 + shift > 0.0)) throw DomainError("t0 + const must be positive");
  bg.require_time(t0);
  if (a0 == 0.0) return {t0, "ode"};
  // A/(t + c) decreases at least like -2 pi log(t + c), which reaches 0 at:
  const double normalized = (t0 + shift) * std::exp(a0 / (2.0 * kPi * (t0 + shift))) - shift;
  const double hi = bg.t_domain().hi;
  const double horizon = std::min(normalized, hi);
  if (horizon > t0) {
    const ComparisonSolution sol = comparison_ode(a0, bg, t0, horizon, dt);
    if (sol.extinction_t) return {*sol.extinction_t, "ode"};
  }
  if (hi < normalized) return {bg.extinction_time(), "background"};
  return {normalized, "normalized"};
}

double gauss_bonnet_check(double phi, double a) {
  if (!(phi > 0.0 && phi < kPi)) throw DomainError("phi must lie in (0, pi)");
  if (!(a > 0.0)) throw DomainError("a must be positive");
  const double curvature = 1.0 / (a * a);
  const double area = disk_area_oracle(DiskOracle::spherical_cap(phi, a));
  const double kg = std::cos(phi) / (std::sin(phi) * a);
  const double boundary = 2.0 * kPi * a * std::sin(phi);
  return std::abs(curvature * area + kg * boundary - 2.0 * kPi);
}

double annulus_proxy_area(const DiscreteCurve& c1, const DiscreteCurve& c2, const MetricBackground& bg, double t) {
  if (c1.size() != c2.size()) throw DomainError("annulus proxy needs curves with equal vertex counts");
  const bool w1 = c1.wrap().size() != 0 && c1.wrap().norm() != 0.0;
  const bool w2 = c2.wrap().size() != 0 && c2.wrap().norm() != 0.0;
  if (w1 != w2 || (w1 && (c1.wrap() - c2.wrap()).norm() != 0.0)) {
    throw DomainError("annulus proxy needs curves in the same free homotopy class");
  }
  double area = 0.0;
  for (int i = 0; i < c1.size(); ++i) {
    const Vec d1 = c2.vertex(i + 1) - c1[i];
    const Vec d2 = c1.vertex(i + 1) - c2[i];
    const double g11 = inner(bg, t, d1, d1);
    const double g22 = inner(bg, t, d2, d2);
    const double g12 = inner(bg, t, d1, d2);
    area += 0.5 * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
  }
  return area;
}

Series annulus_proxy(const FlowTrajectory& traj1, const FlowTrajectory& traj2, const MetricBackground& bg) {
  if (traj1.samples.size() != traj2.samples.size()) throw DomainError("annulus proxy needs synchronized samples");
  Series out;
  for (std::size_t j = 0; j < traj1.samples.size(); ++j) {
    const auto& a = traj1.samples[j];
    const auto& b = traj2.samples[j];
    if (a.t != b.t) throw DomainError("annulus proxy needs synchronized samples");
    if (a.curve.size() == 0 || b.curve.size() == 0) throw DomainError("annulus proxy needs stored curves");
    out.push_back({a.t, annulus_proxy_area(a.curve, b.curve, bg, a.t)});
  }
  return out;
}

double annulus_growth_excess(const Series& mu, const MetricBackground& bg) {
  if (mu.empty()) throw DomainError("empty annulus series");
  const double rate = (2.0 * bg.dim() - 1.0) * bg.rm_bound_sup(mu.front().t, mu.back().t);
  double worst = -kInf;
  for (const auto& p : mu) {
    if (!(p.value > 0.0) || !(mu.front().value > 0.0)) continue;
    worst = std::max(worst, std::log(p.value / mu.front().value) - rate * (p.t - mu.front().t));
  }
  return worst;
}

}  // namespace extlab
