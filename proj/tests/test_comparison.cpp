#include "extlab/comparison.hpp"
#include "extlab/error.hpp"
#include "extlab/family.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace extlab;

namespace {

DiscreteCurve ellipse(const MetricBackground& bg, int n) {
  std::vector<Vec> v(n, Vec::Zero(bg.embed_dim()));
  for (int i = 0; i < n; ++i) {
    v[i](0) = std::cos(2.0 * kPi * i / n);
    v[i](1) = 0.5 * std::sin(2.0 * kPi * i / n);
  }
  return DiscreteCurve(v);
}

// Composite Simpson rule for the cap area int_0^phi 2 pi a^2 sin(s) ds.
double cap_area_quadrature(double phi, double a) {
  const int n = 2000;
  const double h = phi / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::sin(i * h);
  }
  return 2.0 * kPi * a * a * s * h / 3.0;
}

// Independent RK4 for the comparison equation on the shrinking unit 3-sphere,
// where R_min = 6 / (1 - 4t).
double reference_width(double w0, double t1, int steps) {
  const auto f = [](double t, double w) { return -2.0 * kPi - 3.0 * w / (1.0 - 4.0 * t); };
  const double h = t1 / steps;
  double w = w0;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const double k1 = f(t, w);
    const double k2 = f(t + h / 2, w + h / 2 * k1);
    const double k3 = f(t + h / 2, w + h / 2 * k2);
    const double k4 = f(t + h, w + h * k3);
    w += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return w;
}

}  // namespace

TEST(DiskOracle, ClosedForms) {
  EXPECT_DOUBLE_EQ(disk_area_oracle(DiskOracle::flat_circle(2.0)), 4.0 * kPi);
  EXPECT_DOUBLE_EQ(disk_area_oracle(DiskOracle::spherical_cap(kPi / 2.0, 1.0)), 2.0 * kPi);
  EXPECT_NEAR(disk_area_oracle(DiskOracle::spherical_cap(kPi / 3.0, 2.0)), 4.0 * kPi, 1e-12);
  EXPECT_THROW(disk_area_oracle(DiskOracle::spherical_cap(kPi, 1.0)), DomainError);
}

TEST(DiskOracle, CapAreaMatchesQuadrature) {
  for (const double a : {0.5, 1.0, 3.0}) {
    for (const double phi : {0.1, 0.8, 1.6, 2.9}) {
      const double q = cap_area_quadrature(phi, a);
      EXPECT_NEAR(disk_area_oracle(DiskOracle::spherical_cap(phi, a)), q, 1e-10 * q) << a << " " << phi;
    }
  }
}

TEST(DiskOracle, SmallCapApproachesFlatDisk) {
  // Geodesic radius rho = a phi: 2 pi a^2 (1 - cos phi) = pi rho^2 (1 - phi^2 / 12 + ...).
  const double rho = 0.3;
  for (const double a : {1.0, 10.0, 100.0}) {
    const double phi = rho / a;
    const double cap = disk_area_oracle(DiskOracle::spherical_cap(phi, a));
    const double flat = disk_area_oracle(DiskOracle::flat_circle(rho));
    EXPECT_NEAR(cap / flat - 1.0, -phi * phi / 12.0, phi * phi * phi * phi);
  }
}

TEST(OracleWidth, FlatCircle) {
  const auto bg = MetricBackground::flat_torus3();
  const auto w = oracle_width(flat_circle(bg, 0.7, 64), bg, 0.0);
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(*w, kPi * 0.49, 1e-12);
  const auto tilted = oracle_width(flat_circle(bg, 0.7, 64, 0, 2), bg, 0.0);
  ASSERT_TRUE(tilted.has_value());
  EXPECT_NEAR(*tilted, kPi * 0.49, 1e-12);
}

TEST(OracleWidth, LatitudeCircleTakesSmallerCap) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  const double t = 0.1;
  const double a = std::sqrt(1.0 - 4.0 * t);
  for (const double phi : {0.3, 1.2, 2.5}) {
    const auto w = oracle_width(latitude_circle(bg, phi, 64), bg, t);
    ASSERT_TRUE(w.has_value());
    const double small = std::min(phi, kPi - phi);
    EXPECT_NEAR(*w, disk_area_oracle(DiskOracle::spherical_cap(small, a)), 1e-10) << phi;
  }
}

TEST(OracleWidth, ConstantIsZeroAndNonRoundIsEmpty) {
  const auto bg = MetricBackground::flat_torus3();
  EXPECT_EQ(oracle_width(constant_loop(bg, 32), bg, 0.0), 0.0);
  EXPECT_FALSE(oracle_width(ellipse(bg, 64), bg, 0.0).has_value());
}

TEST(FamilyWidth, IsSupremumOfMembers) {
  const auto bg = MetricBackground::flat_torus3();
  const std::vector<DiscreteCurve> fam = {flat_circle(bg, 0.2, 32), flat_circle(bg, 0.9, 32), constant_loop(bg, 32)};
  EXPECT_NEAR(family_width(fam, bg, 0.0), kPi * 0.81, 1e-12);
  const std::vector<DiscreteCurve> bad = {flat_circle(bg, 0.2, 32), ellipse(bg, 32)};
  EXPECT_THROW(family_width(bad, bg, 0.0), DomainError);
}

TEST(ComparisonOde, FlatCaseIsLinear) {
  const auto bg = MetricBackground::flat_torus3();
  const auto sol = comparison_ode(3.0, bg, 0.0, 1.0, 1e-3);
  for (const auto& p : sol.w) EXPECT_NEAR(p.value, 3.0 - 2.0 * kPi * p.t, 1e-12);
  ASSERT_TRUE(sol.extinction_t.has_value());
  EXPECT_NEAR(*sol.extinction_t, 3.0 / (2.0 * kPi), 1e-12);
  EXPECT_TRUE(sol.unique_crossing);
  EXPECT_EQ(sol.const_used, 1.0);
}

TEST(ComparisonOde, ZeroStartIsExtinctImmediately) {
  const auto sol = comparison_ode(0.0, MetricBackground::round_sphere3_shrinking(), 0.0, 0.2, 1e-3);
  ASSERT_TRUE(sol.extinction_t.has_value());
  EXPECT_EQ(*sol.extinction_t, 0.0);
  EXPECT_LT(sol.w.back().value, 0.0);
}

TEST(ComparisonOde, IsAffineInInitialValue) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  const auto s0 = comparison_ode(0.0, bg, 0.0, 0.2, 1e-3);
  const auto s1 = comparison_ode(1.5, bg, 0.0, 0.2, 1e-3);
  const auto s2 = comparison_ode(2.5, bg, 0.0, 0.2, 1e-3);
  const auto s3 = comparison_ode(4.0, bg, 0.0, 0.2, 1e-3);
  ASSERT_EQ(s0.w.size(), s3.w.size());
  for (std::size_t i = 0; i < s0.w.size(); ++i) {
    EXPECT_NEAR(s3.w[i].value - s0.w[i].value, (s1.w[i].value - s0.w[i].value) + (s2.w[i].value - s0.w[i].value),
                1e-9);
  }
}

TEST(ComparisonOde, MatchesIndependentIntegrator) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  const double w0 = 2.0 * kPi * (1.0 - std::cos(1.0));
  const auto sol = comparison_ode(w0, bg, 0.0, 0.15, 1e-4);
  EXPECT_NEAR(sol.w.back().value, reference_width(w0, 0.15, 20000), 1e-9);
}

TEST(ComparisonOde, ClipsToBackgroundDomain) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  const auto sol = comparison_ode(1.0, bg, 0.0, 10.0, 1e-3);
  EXPECT_EQ(sol.w.back().t, bg.t_domain().hi);
  EXPECT_THROW(comparison_ode(1.0, bg, 0.0, 0.2, 0.0), DomainError);
}

TEST(NormalizationConst, FromScalarCurvature) {
  EXPECT_EQ(normalization_const(MetricBackground::round_sphere3_shrinking(), 0.0), 1.0);
  EXPECT_EQ(normalization_const(MetricBackground::flat_torus3(), 0.0), 1.0);
}

TEST(CapReduction, AreaRateMatchesComparisonEquation) {
  // Totally geodesic caps realize the comparison equation with equality.
  const auto bg = MetricBackground::round_sphere3_shrinking();
  const double phi0 = 1.0;
  const auto red = cap_flow_reduction(phi0, bg, 0.0, 0.15, 1e-4);
  EXPECT_LE(red.worst_relative_defect, 1e-6);
  const auto sol = comparison_ode(red.samples.front().area, bg, 0.0, 0.15, 1e-4);
  EXPECT_NEAR(red.samples.back().area, sol.w.back().value, 1e-4 * red.samples.front().area);
}

TEST(CapReduction, ClosedFormExtinction) {
  // cos(phi) grows like (1 - 4t)^(-1/4) and reaches 1 at (1 - cos^4 phi0) / 4.
  const auto bg = MetricBackground::round_sphere3_shrinking();
  for (const double phi0 : {0.4, 0.9, 1.3}) {
    const auto red = cap_flow_reduction(phi0, bg, 0.0, 0.2499, 1e-4);
    ASSERT_TRUE(red.extinction_t.has_value()) << phi0;
    EXPECT_NEAR(*red.extinction_t, (1.0 - std::pow(std::cos(phi0), 4)) / 4.0, 1e-6) << phi0;
  }
  EXPECT_THROW(cap_flow_reduction(0.0, bg, 0.0, 0.1, 1e-4), DomainError);
  EXPECT_THROW(cap_flow_reduction(1.0, MetricBackground::flat_torus3(), 0.0, 0.1, 1e-4), DomainError);
}

TEST(ComparisonMargin, ShrinkingFlatCircleIsSharp) {
  // A = pi (r0^2 - 2t) so dA/dt = -2 pi exactly.
  const auto bg = MetricBackground::flat_torus3();
  WidthSeries ws;
  for (int i = 0; i <= 10; ++i) ws.push_back({0.01 * i, kPi * (1.0 - 0.02 * i)});
  for (const auto& m : comparison_margin(ws, bg)) EXPECT_NEAR(m.value, 0.0, 1e-12);
  EXPECT_EQ(comparison_margin(ws, bg).size(), 10u);
  WidthSeries zero = {{0.0, 0.0}, {0.1, 0.0}};
  EXPECT_THROW(comparison_margin(zero, bg), DomainError);
}

TEST(NormalizedWidth, LinearWidthExample) {
  // A = alpha - 2 pi t gives d/dt [A/(t+c)] + 2 pi/(t+c) = (2 pi t - alpha)/(t+c)^2.
  const double alpha = 1.0;
  const double c = 1.0;
  const double h = 1e-5;
  WidthSeries ws;
  for (int i = 0; i <= 100; ++i) ws.push_back({h * i, alpha - 2.0 * kPi * h * i});
  const auto out = normalized_width_check(ws, c);
  ASSERT_EQ(out.size(), 100u);
  for (const auto& p : out) {
    const double exact = (2.0 * kPi * p.t - alpha) / ((p.t + c) * (p.t + c));
    EXPECT_NEAR(p.value, exact, 1e-4) << p.t;
    EXPECT_LT(p.value, 0.0);
  }
}

TEST(ExtinctionBound, FlatCaseIsLinearZero) {
  const auto bg = MetricBackground::flat_torus3();
  const auto b = extinction_bound(2.0 * kPi, bg, 1.0);
  EXPECT_NEAR(b.t, 1.0, 1e-9);
  EXPECT_EQ(b.source, "ode");
  EXPECT_EQ(extinction_bound(0.0, bg, 1.0).t, 0.0);
}

TEST(ExtinctionBound, MonotoneInInitialWidth) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  double prev = -1.0;
  for (const double a0 : {0.0, 0.5, 1.0, 2.0, 4.0, 6.0}) {
    const auto b = extinction_bound(a0, bg, 1.0);
    EXPECT_GE(b.t, prev) << a0;
    EXPECT_LE(b.t, 0.25);
    prev = b.t;
  }
}

TEST(ExtinctionBound, BackgroundSingularityComesFirst) {
  // A whole hemisphere cannot vanish before the sphere does.
  const auto bg = MetricBackground::round_sphere3_shrinking();
  const auto b = extinction_bound(50.0, bg, 1.0);
  EXPECT_EQ(b.source, "background");
  EXPECT_EQ(b.t, bg.extinction_time());
}

TEST(GaussBonnet, CapsSatisfyIt) {
  for (const double a : {0.5, 1.0, 2.0, 3.0}) {
    for (const double phi : {0.3, 0.9, 1.5, 2.1, 2.7}) EXPECT_LE(gauss_bonnet_check(phi, a), 1e-12) << a << phi;
  }
}

TEST(GaussBonnet, QuadratureAreaClosesTheSum) {
  // K = 1/a^2, geodesic curvature of the boundary cot(phi)/a, boundary length 2 pi a sin(phi).
  for (const double phi : {0.5, 1.9}) {
    const double a = 1.7;
    const double sum = cap_area_quadrature(phi, a) / (a * a) + 2.0 * kPi * std::cos(phi);
    EXPECT_NEAR(sum, 2.0 * kPi, 1e-10);
  }
}

TEST(AnnulusProxy, IdentityAndSymmetry) {
  const auto bg = MetricBackground::flat_torus3();
  const auto a = flat_circle(bg, 1.0, 64);
  const auto b = flat_circle(bg, 0.5, 64);
  EXPECT_EQ(annulus_proxy_area(a, a, bg, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(annulus_proxy_area(a, b, bg, 0.0), annulus_proxy_area(b, a, bg, 0.0));
}

TEST(AnnulusProxy, ConcentricPolygonsGivePolygonalAnnulus) {
  const auto bg = MetricBackground::flat_torus3();
  const int n = 64;
  const double polygon = 0.5 * n * std::sin(2.0 * kPi / n);
  const double area = annulus_proxy_area(flat_circle(bg, 1.0, n), flat_circle(bg, 0.5, n), bg, 0.0);
  EXPECT_NEAR(area, polygon * (1.0 - 0.25), 1e-12);
}

TEST(AnnulusProxy, FlatGrowthExcessIsLogRatio) {
  const auto bg = MetricBackground::flat_torus3();
  const Series shrink = {{0.0, 1.0}, {0.1, 0.9}, {0.2, 0.95}};
  EXPECT_EQ(annulus_growth_excess(shrink, bg), 0.0);
  const Series grow = {{0.0, 1.0}, {0.1, std::exp(0.1)}, {0.2, 1.0}};
  EXPECT_NEAR(annulus_growth_excess(grow, bg), 0.1, 1e-15);
}

TEST(Family, DichotomyOnFlatTorus) {
  const auto bg = MetricBackground::flat_torus3();
  FamilyConfig fc;
  fc.lambda = 0.2;
  fc.jobs = 1;
  fc.flow.sample_dt = 0.01;
  const std::vector<DiscreteCurve> fam = {flat_circle(bg, 0.5, 32), constant_loop(bg, 32)};
  const auto out = deform_family(fam, bg, 0.0, 0.05, fc);
  ASSERT_EQ(out.curves.size(), 2u);
  EXPECT_NEAR(out.xi, 1e-2 * chord_length(fam[0], bg, 0.0), 1e-15);
  EXPECT_EQ(out.curves[0].verdict, Verdict::WidthBounded);
  EXPECT_LE(out.curves[0].final_area, out.curves[0].bound);
  EXPECT_EQ(out.curves[1].verdict, Verdict::Short);
  EXPECT_EQ(out.curves[1].final_length, 0.0);
  EXPECT_EQ(to_string(Verdict::WidthBounded), "width_bounded");
  EXPECT_EQ(to_string(Verdict::Short), "short");
}
