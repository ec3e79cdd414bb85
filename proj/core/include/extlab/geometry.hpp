#pragma once

// Closed-form Ricci-flow backgrounds.
//
// Every background is a Riemannian product of factors whose metrics are
// constant multiples of a Euclidean metric: flat blocks, round spheres of
// radius a(t), and circles of fixed length. Points are stored in embedding
// coordinates (sphere factors as unit vectors in R^{d+1}, flat and circle
// factors as unwrapped covering-space coordinates), so the Levi-Civita
// connection of each factor is the tangential projection of the ambient
// derivative.

#include <Eigen/Core>

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace extlab {

/// Embedding-space vector. Capacity covers S^3 x S^1 (five embedding coordinates).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;
/// Intrinsic tensor block; intrinsic dimension is at most four.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Family { FlatTorus3, RoundSphere3Shrinking, SphereCrossCircleShrinking, ProductWithCircle };

/// Fault injection used by mutation tests. Production code never sets it.
enum class Fault { None, FlipConnectionCorrection };

struct Factor {
  enum class Kind { Flat, Sphere, Circle };

  Kind kind = Kind::Flat;
  int dim = 0;       // intrinsic dimension
  int offset = 0;    // first embedding coordinate
  double radius0 = 1.0;  // sphere radius at t = 0
  double length = 1.0;   // circle length; metric on its unit-period coordinate is length^2

  [[nodiscard]] int embed_dim() const { return kind == Kind::Sphere ? dim + 1 : dim; }
  /// Squared radius of a sphere factor under Ricci flow: a0^2 - 2(d-1)t.
  [[nodiscard]] double scale2(double t) const;
};

struct TimeDomain {
  double lo = 0.0;
  double hi = kInf;
  [[nodiscard]] bool contains(double t) const { return t >= lo && t <= hi; }
};

struct ChartPoint {
  Vec coords;                      // embedding coordinates
  std::string chart_id = "embed";  // informational: which chart the coords refer to
};

/// Tensors at a point, expressed in the intrinsic chart reported in `chart`.
struct MetricData {
  Mat g;
  std::vector<Mat> gamma;  // gamma[k](i, j) = Gamma^k_{ij}
  Mat ric;
  double scalar = 0.0;
  double rm_bound = 0.0;
  Vec chart_coords;        // intrinsic coordinates y of the point
  std::string chart;
};

class MetricBackground {
 public:
  static MetricBackground flat_torus3(double period = 2.0 * kPi);
  static MetricBackground round_sphere3_shrinking(double radius = 1.0);
  static MetricBackground sphere_cross_circle_shrinking(double radius = 1.0, double circle_length = 1.0);

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int embed_dim() const { return embed_dim_; }
  [[nodiscard]] const TimeDomain& t_domain() const { return domain_; }
  /// Singular time of the family (kInf for static families).
  [[nodiscard]] double extinction_time() const { return extinction_; }
  [[nodiscard]] Fault fault() const { return fault_; }

  /// Period of each flat coordinate (torus identification); empty for non-flat families.
  [[nodiscard]] const std::vector<double>& periods() const { return periods_; }

  /// Only set for ProductWithCircle.
  [[nodiscard]] const MetricBackground* base() const { return base_.get(); }
  [[nodiscard]] double lambda() const { return lambda_; }
  /// Embedding index of the circle coordinate of a product, or -1.
  [[nodiscard]] int circle_coord() const { return circle_coord_; }

  /// Sectional-curvature bound |Rm| at time t (closed form per family).
  [[nodiscard]] double rm_bound(double t) const;
  /// Supremum of rm_bound over [t0, t1].
  [[nodiscard]] double rm_bound_sup(double t0, double t1) const;

  [[nodiscard]] MetricBackground with_time_domain(TimeDomain d) const;
  [[nodiscard]] MetricBackground with_fault(Fault f) const;

  void require_time(double t) const;
  void require_point(const Vec& p) const;

 private:
  MetricBackground() = default;
  void finalize();

  friend MetricBackground product_with_circle(const MetricBackground& bg, double lambda);

  Family family_ = Family::FlatTorus3;
  std::string name_;
  std::vector<Factor> factors_;
  std::vector<double> periods_;
  int dim_ = 0;
  int embed_dim_ = 0;
  TimeDomain domain_;
  double extinction_ = kInf;
  Fault fault_ = Fault::None;
  std::shared_ptr<const MetricBackground> base_;
  double lambda_ = 0.0;
  int circle_coord_ = -1;
};

// ---- tensor evaluation ------------------------------------------------------

MetricData metric_eval(const MetricBackground& bg, const ChartPoint& x, double t);

/// Norm of the centered difference (g(t+dt) - g(t-dt)) / 2dt + 2 Ric(t) in the chart of x.
double ricci_residual(const MetricBackground& bg, const ChartPoint& x, double t, double dt);

/// Exact R_min(t); R is spatially constant for every catalog family.
double scalar_min(const MetricBackground& bg, double t);

struct ScalarSample {
  double t;
  double r;
};

struct ScalarOdeResult {
  std::vector<ScalarSample> samples;
  bool blowup = false;
  /// Shift c of R >= -(3/2)/(t + c); empty when r0 >= 0 (bound trivially satisfied).
  std::optional<double> bound_const;
  /// Max over samples of (bound - R); <= 0 means the lower bound held.
  double worst_bound_violation = -kInf;
};

/// RK4 for dR/dt = (2/3) R^2 (homogeneous Einstein case with zero traceless Ricci).
ScalarOdeResult homogeneous_scalar_ode(double r0, double horizon, double dt);

/// M x S^1_lambda; the circle block has constant metric lambda^2 on a unit-period coordinate.
MetricBackground product_with_circle(const MetricBackground& bg, double lambda);

/// Unit vector field U along the circle factor, as an embedding vector.
Vec circle_unit_field(const MetricBackground& product);

// ---- pointwise vector operations used by the curve code ---------------------

/// g_t(a, b) for embedding vectors (factorwise scaled Euclidean product).
double inner(const MetricBackground& bg, double t, const Vec& a, const Vec& b);
/// Ric_t(a, b) for tangent vectors; time independent for these families.
double ricci_form(const MetricBackground& bg, const Vec& a, const Vec& b);
/// Remove the components of v normal to the sphere factors at p.
void project_tangent(const MetricBackground& bg, const Vec& p, Vec& v);
/// Normalize sphere factors back onto their unit spheres.
void retract(const MetricBackground& bg, Vec& p);
/// Metric chord length |b - a|_g.
double chord_distance(const MetricBackground& bg, double t, const Vec& a, const Vec& b);
/// Point at fraction tau along the geodesic from a to b (slerp on sphere factors).
Vec geodesic_interp(const MetricBackground& bg, const Vec& a, const Vec& b, double tau);

}  // namespace extlab
