#include "extlab/curve.hpp"

#include "extlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace extlab {

namespace {

constexpr double kEdgeFloor = 1e-12;

const Factor* first_factor(const MetricBackground& bg, Factor::Kind kind) {
  for (const auto& f : bg.factors()) {
    if (f.kind == kind) return &f;
  }
  return nullptr;
}

double smoothstep5(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }

}  // namespace

DiscreteCurve::DiscreteCurve(std::vector<Vec> vertices, Vec wrap) : vertices_(std::move(vertices)), wrap_(std::move(wrap)) {
  if (static_cast<int>(vertices_.size()) < kMinVertices) {
    throw DomainError("a discrete curve needs at least 16 vertices");
  }
  const auto m = vertices_[0].size();
  for (const auto& v : vertices_) {
    if (v.size() != m) throw DomainError("curve vertices have inconsistent dimension");
    if (!v.allFinite()) throw DomainError("curve vertex has non-finite coordinates");
  }
  if (wrap_.size() == 0) wrap_ = Vec::Zero(m);
  if (wrap_.size() != m) throw DomainError("wrap vector has wrong dimension");
}

Vec DiscreteCurve::vertex(long i) const {
  const long n = size();
  long q = i / n;
  long r = i % n;
  if (r < 0) {
    r += n;
    --q;
  }
  if (q == 0) return vertices_[static_cast<std::size_t>(r)];
  return vertices_[static_cast<std::size_t>(r)] + static_cast<double>(q) * wrap_;
}

bool DiscreteCurve::is_constant() const {
  if (vertices_.empty()) return true;
  if (wrap_.squaredNorm() != 0.0) return false;
  return std::all_of(vertices_.begin(), vertices_.end(), [&](const Vec& v) { return v == vertices_[0]; });
}

double CurveGeometry::k_max() const {
  double m = 0.0;
  for (double v : k) m = std::max(m, v);
  return m;
}

double CurveGeometry::length() const {
  double s = 0.0;
  for (double v : ds) s += v;
  return s;
}

CurveGeometry curve_geometry(const DiscreteCurve& c, const MetricBackground& bg, double t) {
  const int n = c.size();
  if (c.embed_dim() != bg.embed_dim()) throw DomainError("curve dimension does not match " + bg.name());
  const double nd = static_cast<double>(n);
  const bool flip = bg.fault() == Fault::FlipConnectionCorrection;

  CurveGeometry g;
  g.X.resize(n);
  g.S.resize(n);
  g.H.resize(n);
  g.k.resize(n);
  g.ds.resize(n);
  g.h_min = kInf;

  Vec prev = c.vertex(-1);
  Vec next;
  std::vector<double> speed(n);
  std::vector<Vec> accel(n);
  double max_speed = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec& p = c[i];
    next = c.vertex(i + 1);
    const double edge = chord_distance(bg, t, p, next);
    if (edge < kEdgeFloor) throw DegenerateCurve("edge " + std::to_string(i) + " shorter than 1e-12");
    g.h_min = std::min(g.h_min, edge);

    Vec x = (next - prev) * (0.5 * nd);
    project_tangent(bg, p, x);
    Vec a = (next - 2.0 * p + prev) * (nd * nd);
    // Levi-Civita connection of the sphere factors: drop the normal component.
    for (const auto& f : bg.factors()) {
      if (f.kind != Factor::Kind::Sphere) continue;
      const int m = f.embed_dim();
      const auto normal = p.segment(f.offset, m);
      const double w = a.segment(f.offset, m).dot(normal);
      a.segment(f.offset, m) -= (flip ? -w : w) * normal;
    }
    g.X[i] = x;
    accel[i] = a;
    speed[i] = std::sqrt(inner(bg, t, x, x));
    max_speed = std::max(max_speed, speed[i]);
    prev = p;
  }

  const double stationary = 1e-13 * max_speed;
  for (int i = 0; i < n; ++i) {
    const double v = speed[i];
    g.ds[i] = v / nd;
    if (v <= stationary) {
      g.immersed = false;
      g.S[i] = Vec::Zero(c.embed_dim());
      g.H[i] = Vec::Zero(c.embed_dim());
      g.k[i] = kInf;
      continue;
    }
    const Vec s = g.X[i] / v;
    const Vec tt = accel[i] / (v * v);
    Vec h = tt - inner(bg, t, tt, s) * s;
    g.S[i] = s;
    g.k[i] = std::sqrt(std::max(0.0, inner(bg, t, h, h)));
    g.H[i] = std::move(h);
  }
  return g;
}

double chord_length(const DiscreteCurve& c, const MetricBackground& bg, double t) {
  double s = 0.0;
  for (int i = 0; i < c.size(); ++i) s += chord_distance(bg, t, c[i], c.vertex(i + 1));
  return s;
}

double hausdorff(const DiscreteCurve& a, const DiscreteCurve& b, const MetricBackground& bg, double t) {
  const auto directed = [&](const DiscreteCurve& from, const DiscreteCurve& to) {
    double worst = 0.0;
    for (const auto& p : from.vertices()) {
      double best = kInf;
      for (const auto& q : to.vertices()) best = std::min(best, chord_distance(bg, t, p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

DiscreteCurve polygon_through(std::span<const Vec> anchors, int n, const MetricBackground& bg, const Vec& wrap) {
  const int v = static_cast<int>(anchors.size());
  if (v < 3) throw DomainError("a geodesic polygon needs at least 3 anchors");
  if (v > n) throw DomainError("more anchors than vertices");
  const Vec shift = wrap.size() == 0 ? Vec(Vec::Zero(bg.embed_dim())) : wrap;

  std::vector<int> index(v + 1);
  for (int j = 0; j <= v; ++j) index[j] = static_cast<int>((static_cast<long>(j) * n) / v);

  std::vector<Vec> out(n);
  for (int j = 0; j < v; ++j) {
    const Vec& a = anchors[j];
    const Vec b = j + 1 < v ? anchors[j + 1] : Vec(anchors[0] + shift);
    const double gap = (b - a).norm();
    if (gap > 0.0 && gap < kEdgeFloor) throw DegenerateCurve("anchors too close to determine a geodesic");
    const int lo = index[j];
    const int hi = index[j + 1];
    for (int i = lo; i < hi; ++i) {
      const double u = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
      out[i] = gap == 0.0 ? a : geodesic_interp(bg, a, b, smoothstep5(u));
    }
  }
  return DiscreteCurve(std::move(out), shift);
}

DiscreteCurve geodesic_polygon(const DiscreteCurve& c, int anchors, const MetricBackground& bg, double t) {
  bg.require_time(t);
  const int n = c.size();
  if (anchors < 3 || anchors > n) throw DomainError("anchor count must lie in [3, N]");
  std::vector<Vec> pts;
  pts.reserve(anchors);
  for (int j = 0; j < anchors; ++j) pts.push_back(c[static_cast<int>((static_cast<long>(j) * n) / anchors)]);
  return polygon_through(pts, n, bg, c.wrap());
}

Vec base_point(const MetricBackground& bg) {
  Vec p = Vec::Zero(bg.embed_dim());
  for (const auto& f : bg.factors()) {
    if (f.kind == Factor::Kind::Sphere) p(f.offset) = 1.0;
  }
  return p;
}

DiscreteCurve flat_circle(const MetricBackground& bg, double r, int n, int axis_a, int axis_b) {
  if (!(r > 0.0)) throw DomainError("circle radius must be positive");
  const Factor* f = first_factor(bg, Factor::Kind::Flat);
  if (f == nullptr || f->dim < 2) throw DomainError("flat_circle needs a flat factor of dimension >= 2");
  std::vector<Vec> pts(n, base_point(bg));
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * i / n;
    pts[i](f->offset + axis_a) = r * std::cos(th);
    pts[i](f->offset + axis_b) = r * std::sin(th);
  }
  return DiscreteCurve(std::move(pts));
}

DiscreteCurve latitude_circle(const MetricBackground& bg, double phi, int n) {
  if (!(phi > 0.0 && phi < kPi)) throw DomainError("cap angle must lie in (0, pi)");
  const Factor* f = first_factor(bg, Factor::Kind::Sphere);
  if (f == nullptr || f->dim < 2) throw DomainError("latitude_circle needs a sphere factor");
  std::vector<Vec> pts(n, base_point(bg));
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * i / n;
    pts[i](f->offset) = std::cos(phi);
    pts[i](f->offset + 1) = std::sin(phi) * std::cos(th);
    pts[i](f->offset + 2) = std::sin(phi) * std::sin(th);
  }
  return DiscreteCurve(std::move(pts));
}

DiscreteCurve great_circle(const MetricBackground& bg, int n) { return latitude_circle(bg, 0.5 * kPi, n); }

DiscreteCurve constant_loop(const MetricBackground& bg, int n) {
  return DiscreteCurve(std::vector<Vec>(n, base_point(bg)));
}

DiscreteCurve back_and_forth(const MetricBackground& bg, double arc, double bend, int n) {
  if (!(arc > 0.0)) throw DomainError("arc length must be positive");
  std::vector<Vec> pts(n, base_point(bg));
  if (const Factor* f = first_factor(bg, Factor::Kind::Flat); f != nullptr && f->dim >= 2) {
    if (!(bend > 0.0)) throw DomainError("bend radius must be positive");
    for (int i = 0; i < n; ++i) {
      const double sn = std::sin(kPi * i / n);
      const double s = arc * sn * sn;
      pts[i](f->offset) = bend * std::sin(s / bend);
      pts[i](f->offset + 1) = bend * (1.0 - std::cos(s / bend));
    }
    return DiscreteCurve(std::move(pts));
  }
  const Factor* f = first_factor(bg, Factor::Kind::Sphere);
  if (f == nullptr) throw DomainError("back_and_forth needs a flat or sphere factor");
  for (int i = 0; i < n; ++i) {
    const double sn = std::sin(kPi * i / n);
    const double s = arc * sn * sn;
    pts[i](f->offset) = std::cos(s);
    pts[i](f->offset + 1) = std::sin(s);
  }
  return DiscreteCurve(std::move(pts));
}

DiscreteCurve torus_geodesic(const MetricBackground& bg, int n, int axis) {
  const Factor* f = first_factor(bg, Factor::Kind::Flat);
  if (f == nullptr || bg.periods().empty()) throw DomainError("torus_geodesic needs a flat torus");
  const double period = bg.periods()[static_cast<std::size_t>(axis)];
  std::vector<Vec> pts(n, base_point(bg));
  for (int i = 0; i < n; ++i) pts[i](f->offset + axis) = period * i / n;
  Vec wrap = Vec::Zero(bg.embed_dim());
  wrap(f->offset + axis) = period;
  return DiscreteCurve(std::move(pts), wrap);
}

}  // namespace extlab
