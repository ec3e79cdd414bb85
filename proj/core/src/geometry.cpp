#include "extlab/geometry.hpp"

#include "extlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace extlab {

namespace {

constexpr double kUnitTolerance = 1e-8;

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Stereographic chart of the unit sphere through the pole opposite to the
// hemisphere containing p, so that |y| <= 1.
struct Stereo {
  Vec y;
  std::string chart;
};

Stereo stereographic(const Vec& p) {
  const int d = static_cast<int>(p.size()) - 1;
  Stereo s;
  s.y.resize(d);
  const double last = p(d);
  if (last >= 0.0) {
    s.y = p.head(d) / (1.0 + last);
    s.chart = "stereo-south";
  } else {
    s.y = p.head(d) / (1.0 - last);
    s.chart = "stereo-north";
  }
  return s;
}

}  // namespace

double Factor::scale2(double t) const {
  switch (kind) {
    case Kind::Flat:
      return 1.0;
    case Kind::Circle:
      return length * length;
    case Kind::Sphere:
      return radius0 * radius0 - 2.0 * (dim - 1) * t;
  }
  return 1.0;
}

void MetricBackground::finalize() {
  dim_ = 0;
  embed_dim_ = 0;
  for (auto& f : factors_) {
    f.offset = embed_dim_;
    dim_ += f.dim;
    embed_dim_ += f.embed_dim();
  }
  extinction_ = kInf;
  for (const auto& f : factors_) {
    if (f.kind == Factor::Kind::Sphere && f.dim > 1) {
      extinction_ = std::min(extinction_, f.radius0 * f.radius0 / (2.0 * (f.dim - 1)));
    }
  }
  domain_.lo = 0.0;
  domain_.hi = std::isfinite(extinction_) ? extinction_ - 1e-12 : kInf;
}

MetricBackground MetricBackground::flat_torus3(double period) {
  if (!(period > 0.0)) throw DomainError("flat torus period must be positive");
  MetricBackground bg;
  bg.family_ = Family::FlatTorus3;
  bg.name_ = "t3_flat";
  bg.factors_.push_back(Factor{Factor::Kind::Flat, 3, 0, 1.0, 1.0});
  bg.periods_ = {period, period, period};
  bg.finalize();
  return bg;
}

MetricBackground MetricBackground::round_sphere3_shrinking(double radius) {
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  MetricBackground bg;
  bg.family_ = Family::RoundSphere3Shrinking;
  bg.name_ = "s3_shrinking";
  bg.factors_.push_back(Factor{Factor::Kind::Sphere, 3, 0, radius, 1.0});
  bg.finalize();
  return bg;
}

MetricBackground MetricBackground::sphere_cross_circle_shrinking(double radius, double circle_length) {
  if (!(radius > 0.0) || !(circle_length > 0.0)) throw DomainError("radius and circle length must be positive");
  MetricBackground bg;
  bg.family_ = Family::SphereCrossCircleShrinking;
  bg.name_ = "s2xs1_shrinking";
  bg.factors_.push_back(Factor{Factor::Kind::Sphere, 2, 0, radius, 1.0});
  bg.factors_.push_back(Factor{Factor::Kind::Circle, 1, 0, 1.0, circle_length});
  bg.finalize();
  return bg;
}

double MetricBackground::rm_bound(double t) const {
  double bound = 0.0;
  for (const auto& f : factors_) {
    if (f.kind == Factor::Kind::Sphere) bound = std::max(bound, 1.0 / f.scale2(t));
  }
  return bound;
}

double MetricBackground::rm_bound_sup(double t0, double t1) const {
  // Sphere curvature 1/a(t)^2 is increasing in t.
  return std::max(rm_bound(t0), rm_bound(t1));
}

MetricBackground MetricBackground::with_time_domain(TimeDomain d) const {
  if (!(d.lo <= d.hi)) throw DomainError("empty time domain");
  if (std::isfinite(extinction_) && d.hi >= extinction_) throw DomainError("time domain must end before the background becomes singular");
  MetricBackground out = *this;
  out.domain_ = d;
  return out;
}

MetricBackground MetricBackground::with_fault(Fault f) const {
  MetricBackground out = *this;
  out.fault_ = f;
  return out;
}

void MetricBackground::require_time(double t) const {
  if (!std::isfinite(t) || !domain_.contains(t)) {
    throw DomainError("time " + format_real(t) + " outside domain of " + name_ + " [" + format_real(domain_.lo) +
                      ", " + format_real(domain_.hi) + "]");
  }
}

void MetricBackground::require_point(const Vec& p) const {
  if (p.size() != embed_dim_) throw DomainError("point has wrong dimension for " + name_);
  if (!p.allFinite()) throw DomainError("point has non-finite coordinates");
  for (const auto& f : factors_) {
    if (f.kind != Factor::Kind::Sphere) continue;
    const double n = p.segment(f.offset, f.embed_dim()).norm();
    if (std::abs(n - 1.0) > kUnitTolerance) throw DomainError("point off the unit sphere factor of " + name_);
  }
}

MetricBackground product_with_circle(const MetricBackground& bg, double lambda) {
  if (bg.dim() != 3 || bg.family() == Family::ProductWithCircle) {
    throw DomainError("product_with_circle needs a three-dimensional base family");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  MetricBackground out = bg;
  out.family_ = Family::ProductWithCircle;
  out.name_ = "product:" + bg.name() + ":lambda=" + format_real(lambda);
  out.base_ = std::make_shared<const MetricBackground>(bg);
  out.lambda_ = lambda;
  out.factors_.push_back(Factor{Factor::Kind::Circle, 1, 0, 1.0, lambda});
  const auto domain = bg.t_domain();
  out.finalize();
  out.domain_ = domain;
  out.circle_coord_ = out.factors_.back().offset;
  return out;
}

Vec circle_unit_field(const MetricBackground& product) {
  if (product.circle_coord() < 0) throw DomainError("background has no circle factor");
  Vec u = Vec::Zero(product.embed_dim());
  u(product.circle_coord()) = 1.0 / product.lambda();
  return u;
}

MetricData metric_eval(const MetricBackground& bg, const ChartPoint& x, double t) {
  bg.require_time(t);
  bg.require_point(x.coords);
  const int n = bg.dim();
  MetricData out;
  out.g = Mat::Zero(n, n);
  out.ric = Mat::Zero(n, n);
  out.gamma.assign(n, Mat::Zero(n, n));
  out.chart_coords.resize(n);
  out.rm_bound = bg.rm_bound(t);
  out.scalar = scalar_min(bg, t);

  int row = 0;
  for (const auto& f : bg.factors()) {
    const double s2 = f.scale2(t);
    switch (f.kind) {
      case Factor::Kind::Flat:
      case Factor::Kind::Circle:
        for (int i = 0; i < f.dim; ++i) {
          out.g(row + i, row + i) = s2;
          out.chart_coords(row + i) = x.coords(f.offset + i);
        }
        out.chart += (out.chart.empty() ? "" : "+") + std::string(f.kind == Factor::Kind::Flat ? "flat" : "circle");
        break;
      case Factor::Kind::Sphere: {
        const Stereo st = stereographic(x.coords.segment(f.offset, f.embed_dim()));
        const double q = 1.0 + st.y.squaredNorm();
        const double conformal = 4.0 / (q * q);
        // log of the conformal factor, f = log(2a) - log(1+|y|^2)
        Vec df = -2.0 * st.y / q;
        for (int i = 0; i < f.dim; ++i) {
          out.chart_coords(row + i) = st.y(i);
          out.g(row + i, row + i) = s2 * conformal;
          out.ric(row + i, row + i) = (f.dim - 1) * conformal;
        }
        for (int k = 0; k < f.dim; ++k) {
          for (int i = 0; i < f.dim; ++i) {
            for (int j = 0; j < f.dim; ++j) {
              double v = 0.0;
              if (i == k) v += df(j);
              if (j == k) v += df(i);
              if (i == j) v -= df(k);
              out.gamma[row + k](row + i, row + j) = v;
            }
          }
        }
        out.chart += (out.chart.empty() ? "" : "+") + st.chart;
        break;
      }
    }
    row += f.dim;
  }
  return out;
}

double ricci_residual(const MetricBackground& bg, const ChartPoint& x, double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  bg.require_time(t);
  bg.require_time(t + dt);
  const MetricData now = metric_eval(bg, x, t);
  const MetricData fwd = metric_eval(bg, x, t + dt);
  // Backward sample uses the analytic continuation of the family below t_domain.lo.
  const MetricBackground extended = bg.with_time_domain({-kInf, bg.t_domain().hi});
  const MetricData bwd = metric_eval(extended, x, t - dt);
  const Mat r = (fwd.g - bwd.g) / (2.0 * dt) + 2.0 * now.ric;
  return r.norm();
}

double scalar_min(const MetricBackground& bg, double t) {
  bg.require_time(t);
  double r = 0.0;
  for (const auto& f : bg.factors()) {
    if (f.kind == Factor::Kind::Sphere) r += f.dim * (f.dim - 1) / f.scale2(t);
  }
  return r;
}

ScalarOdeResult homogeneous_scalar_ode(double r0, double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw DomainError("horizon and dt must be positive");
  if (dt > horizon / 100.0 * (1.0 + 1e-12)) throw DomainError("dt must not exceed horizon/100");

  const auto rhs = [](double r) { return 2.0 / 3.0 * r * r; };
  ScalarOdeResult out;
  if (r0 < 0.0) out.bound_const = -3.0 / (2.0 * r0);
  const double blowup_t = r0 > 0.0 ? 3.0 / (2.0 * r0) : kInf;

  auto record = [&](double t, double r) {
    out.samples.push_back({t, r});
    if (out.bound_const) {
      const double bound = -1.5 / (t + *out.bound_const);
      out.worst_bound_violation = std::max(out.worst_bound_violation, bound - r);
    }
  };

  const auto steps = static_cast<long>(std::llround(horizon / dt));
  double r = r0;
  record(0.0, r);
  for (long i = 0; i < steps; ++i) {
    const double t = i * dt;
    if (t + dt >= blowup_t) {
      out.blowup = true;
      break;
    }
    const double k1 = rhs(r);
    const double k2 = rhs(r + 0.5 * dt * k1);
    const double k3 = rhs(r + 0.5 * dt * k2);
    const double k4 = rhs(r + dt * k3);
    r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(r)) {
      out.blowup = true;
      break;
    }
    record((i + 1) * dt, r);
  }
  return out;
}

double inner(const MetricBackground& bg, double t, const Vec& a, const Vec& b) {
  double s = 0.0;
  for (const auto& f : bg.factors()) {
    const int m = f.embed_dim();
    s += f.scale2(t) * a.segment(f.offset, m).dot(b.segment(f.offset, m));
  }
  return s;
}

double ricci_form(const MetricBackground& bg, const Vec& a, const Vec& b) {
  double s = 0.0;
  for (const auto& f : bg.factors()) {
    if (f.kind != Factor::Kind::Sphere) continue;
    const int m = f.embed_dim();
    s += (f.dim - 1) * a.segment(f.offset, m).dot(b.segment(f.offset, m));
  }
  return s;
}

void project_tangent(const MetricBackground& bg, const Vec& p, Vec& v) {
  for (const auto& f : bg.factors()) {
    if (f.kind != Factor::Kind::Sphere) continue;
    const int m = f.embed_dim();
    const auto n = p.segment(f.offset, m);
    v.segment(f.offset, m) -= v.segment(f.offset, m).dot(n) * n;
  }
}

void retract(const MetricBackground& bg, Vec& p) {
  for (const auto& f : bg.factors()) {
    if (f.kind != Factor::Kind::Sphere) continue;
    auto seg = p.segment(f.offset, f.embed_dim());
    seg /= seg.norm();
  }
}

double chord_distance(const MetricBackground& bg, double t, const Vec& a, const Vec& b) {
  const Vec d = b - a;
  return std::sqrt(inner(bg, t, d, d));
}

Vec geodesic_interp(const MetricBackground& bg, const Vec& a, const Vec& b, double tau) {
  Vec out = a + tau * (b - a);
  for (const auto& f : bg.factors()) {
    if (f.kind != Factor::Kind::Sphere) continue;
    const int m = f.embed_dim();
    const auto pa = a.segment(f.offset, m);
    const auto pb = b.segment(f.offset, m);
    const double c = std::clamp(pa.dot(pb), -1.0, 1.0);
    const double angle = std::acos(c);
    if (kPi - angle < 1e-9) throw DegenerateCurve("antipodal anchors do not determine a geodesic");
    if (angle < 1e-12) {
      out.segment(f.offset, m) = pa;
      continue;
    }
    const double s = std::sin(angle);
    out.segment(f.offset, m) = (std::sin((1.0 - tau) * angle) / s) * pa + (std::sin(tau * angle) / s) * pb;
  }
  return out;
}

}  // namespace extlab
