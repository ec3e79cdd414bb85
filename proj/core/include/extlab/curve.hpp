#pragma once

#include "extlab/geometry.hpp"

#include <span>
#include <vector>

namespace extlab {

/// Closed polyline sampled at x_i = i/N. Indexing is cyclic; stepping past
/// the last vertex adds the deck translation `wrap` (zero for contractible
/// loops, one circle period for ramps, a torus period for closed geodesics).
class DiscreteCurve {
 public:
  static constexpr int kMinVertices = 16;

  DiscreteCurve() = default;
  explicit DiscreteCurve(std::vector<Vec> vertices, Vec wrap = Vec());

  [[nodiscard]] int size() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int embed_dim() const { return vertices_.empty() ? 0 : static_cast<int>(vertices_[0].size()); }
  [[nodiscard]] const std::vector<Vec>& vertices() const { return vertices_; }
  [[nodiscard]] const Vec& wrap() const { return wrap_; }
  [[nodiscard]] const Vec& operator[](int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  Vec& operator[](int i) { return vertices_[static_cast<std::size_t>(i)]; }

  /// Vertex at any integer index, including the deck translation.
  [[nodiscard]] Vec vertex(long i) const;

  /// True when every vertex coincides and there is no deck translation.
  [[nodiscard]] bool is_constant() const;

 private:
  std::vector<Vec> vertices_;
  Vec wrap_;
};

struct CurveGeometry {
  std::vector<Vec> X;  // dc/dx
  std::vector<Vec> S;  // unit tangent (zero at non-immersed vertices)
  std::vector<Vec> H;  // curvature vector
  std::vector<double> k;
  std::vector<double> ds;  // |X| / N
  double h_min = 0.0;      // shortest metric edge chord
  bool immersed = true;

  [[nodiscard]] double k_max() const;
  [[nodiscard]] double length() const;
};

/// Central differences in x, tangential projection as the connection,
/// curvature vector = normal part of the covariant second derivative over g(X,X).
/// Throws DegenerateCurve when an edge is shorter than 1e-12.
CurveGeometry curve_geometry(const DiscreteCurve& c, const MetricBackground& bg, double t);

/// Sum of metric edge chords (defined for constant maps, unlike curve_geometry).
double chord_length(const DiscreteCurve& c, const MetricBackground& bg, double t);

/// Symmetric Hausdorff distance between the vertex sets.
double hausdorff(const DiscreteCurve& a, const DiscreteCurve& b, const MetricBackground& bg, double t);

/// Curve through V anchors c[floor(jN/V)] joined by geodesic segments, each
/// traversed with the quintic smoothstep so the map is C^2 in x.
DiscreteCurve geodesic_polygon(const DiscreteCurve& c, int anchors, const MetricBackground& bg, double t);

/// Geodesic polygon through explicit anchors, V anchors distributed over N vertices.
DiscreteCurve polygon_through(std::span<const Vec> anchors, int n, const MetricBackground& bg, const Vec& wrap = Vec());

// ---- initializers ------------------------------------------------------------

/// Round circle of radius r in the (axis_a, axis_b) plane of the first flat factor.
DiscreteCurve flat_circle(const MetricBackground& bg, double r, int n, int axis_a = 0, int axis_b = 1);

/// Circle at angular distance phi from the pole e_0 of the first sphere factor,
/// lying in the great 2-sphere spanned by e_0, e_1, e_2 (totally geodesic cap boundary).
DiscreteCurve latitude_circle(const MetricBackground& bg, double phi, int n);

DiscreteCurve great_circle(const MetricBackground& bg, int n);

/// Constant map at the background's base point.
DiscreteCurve constant_loop(const MetricBackground& bg, int n);

/// Arc of length `arc` traversed out and back: c(x) = gamma(arc * sin^2(pi x)).
/// Flat: gamma bends with radius `bend`; sphere: gamma is a great-circle arc.
DiscreteCurve back_and_forth(const MetricBackground& bg, double arc, double bend, int n);

/// Closed geodesic of a flat torus along a coordinate axis (wraps once).
DiscreteCurve torus_geodesic(const MetricBackground& bg, int n, int axis = 0);

/// Base point of a background: origin of flat parts, pole e_0 of spheres.
Vec base_point(const MetricBackground& bg);

}  // namespace extlab
