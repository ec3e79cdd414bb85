#include "extlab/catalog.hpp"
#include "extlab/error.hpp"
#include "extlab/geometry.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>

using namespace extlab;

namespace {

Vec unit(int n, int i) {
  Vec v = Vec::Zero(n);
  v(i) = 1.0;
  return v;
}

// A generic point of the unit 3-sphere in the southern stereographic chart.
Vec sphere_point() {
  Vec p(4);
  p << 0.3, -0.4, 0.5, 0.0;
  p(3) = std::sqrt(1.0 - p.head(3).squaredNorm());
  return p;
}

// Inverse stereographic projection from the south pole.
Vec from_chart(const Vec& y) {
  const double q = 1.0 + y.squaredNorm();
  Vec p(y.size() + 1);
  p.head(y.size()) = 2.0 * y / q;
  p(y.size()) = (1.0 - y.squaredNorm()) / q;
  return p;
}

std::vector<MetricBackground> catalog() {
  return {MetricBackground::flat_torus3(), MetricBackground::round_sphere3_shrinking(),
          MetricBackground::sphere_cross_circle_shrinking(),
          product_with_circle(MetricBackground::round_sphere3_shrinking(), 0.05),
          product_with_circle(MetricBackground::flat_torus3(), 0.3)};
}

Vec generic_point(const MetricBackground& bg) {
  Vec p = Vec::Zero(bg.embed_dim());
  for (const auto& f : bg.factors()) {
    if (f.kind == Factor::Kind::Sphere) {
      Vec s(f.embed_dim());
      for (int i = 0; i < f.embed_dim(); ++i) s(i) = 0.2 + 0.1 * i;
      p.segment(f.offset, f.embed_dim()) = s.normalized();
    } else {
      for (int i = 0; i < f.dim; ++i) p(f.offset + i) = 0.1 * (i + 1);
    }
  }
  return p;
}

}  // namespace

TEST(MetricEval, FlatTorusIsEuclidean) {
  const auto bg = MetricBackground::flat_torus3();
  for (const double t : {0.0, 0.7, 12.0}) {
    const MetricData m = metric_eval(bg, {generic_point(bg)}, t);
    EXPECT_EQ(m.g, Mat::Identity(3, 3));
    EXPECT_EQ(m.ric, Mat::Zero(3, 3));
    EXPECT_EQ(m.scalar, 0.0);
    EXPECT_EQ(m.rm_bound, 0.0);
  }
}

TEST(MetricEval, ShrinkingSphereScalarFollowsScaleOde) {
  // g(t) = (1 - 4t) g0 solves dg/dt = -2 Ric with Ric = 2 g0, so R = 6/(1 - 4t).
  const auto bg = MetricBackground::round_sphere3_shrinking();
  for (const double t : {0.0, 0.05, 0.125, 0.2, 0.24}) {
    EXPECT_NEAR(metric_eval(bg, {sphere_point()}, t).scalar, 6.0 / (1.0 - 4.0 * t), 1e-12 / (1.0 - 4.0 * t));
  }
}

TEST(MetricEval, SphereCrossCircleScalar) {
  const auto bg = MetricBackground::sphere_cross_circle_shrinking();
  ASSERT_EQ(bg.dim(), 3);
  for (const double t : {0.0, 0.1, 0.3, 0.45}) {
    EXPECT_NEAR(metric_eval(bg, {generic_point(bg)}, t).scalar, 2.0 / (1.0 - 2.0 * t), 1e-12);
  }
}

TEST(MetricEval, ScalarIsTraceOfRicci) {
  for (const auto& bg : catalog()) {
    const double t = std::min(0.1, 0.5 * bg.t_domain().hi);
    const MetricData m = metric_eval(bg, {generic_point(bg)}, t);
    const Mat ginv = m.g.inverse();
    EXPECT_NEAR((ginv * m.ric).trace(), m.scalar, 1e-12 * std::max(1.0, m.scalar)) << bg.name();
    EXPECT_EQ((m.g - m.g.transpose()).norm(), 0.0) << bg.name();
    EXPECT_GT(m.g.determinant(), 0.0) << bg.name();
  }
}

TEST(MetricEval, SphereIsEinstein) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  const MetricData m = metric_eval(bg, {sphere_point()}, 0.1);
  EXPECT_TRUE(m.ric.isApprox(m.scalar / 3.0 * m.g, 1e-13));
}

TEST(MetricEval, ChristoffelSymbolsMatchFiniteDifferencesOfMetric) {
  // Oracle: Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij) with the
  // metric derivatives taken by central differences through the chart.
  const auto bg = MetricBackground::round_sphere3_shrinking();
  const double t = 0.1;
  const MetricData m = metric_eval(bg, {sphere_point()}, t);
  ASSERT_EQ(m.chart, "stereo-south");
  const Vec y = m.chart_coords;
  const double h = 1e-5;
  std::vector<Mat> dg(3);
  for (int i = 0; i < 3; ++i) {
    const Mat gp = metric_eval(bg, {from_chart(y + h * unit(3, i))}, t).g;
    const Mat gm = metric_eval(bg, {from_chart(y - h * unit(3, i))}, t).g;
    dg[i] = (gp - gm) / (2.0 * h);
  }
  const Mat ginv = m.g.inverse();
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double expect = 0.0;
        for (int l = 0; l < 3; ++l) expect += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        EXPECT_NEAR(m.gamma[k](i, j), expect, 1e-8) << k << i << j;
        EXPECT_EQ(m.gamma[k](i, j), m.gamma[k](j, i));
      }
    }
  }
}

TEST(MetricEval, ProductBlocksAreExact) {
  const auto base = MetricBackground::round_sphere3_shrinking();
  const double lambda = 0.05;
  const auto prod = product_with_circle(base, lambda);
  ASSERT_EQ(prod.dim(), 4);
  const Vec p3 = sphere_point();
  Vec p4(5);
  p4.head(4) = p3;
  p4(4) = 0.37;
  const MetricData b = metric_eval(base, {p3}, 0.1);
  const MetricData m = metric_eval(prod, {p4}, 0.1);
  EXPECT_EQ(m.g.topLeftCorner(3, 3), b.g);
  EXPECT_EQ(m.ric.topLeftCorner(3, 3), b.ric);
  EXPECT_EQ(m.g(3, 3), lambda * lambda);
  EXPECT_EQ(m.ric(3, 3), 0.0);
  EXPECT_EQ(m.g.row(3).head(3).norm(), 0.0);
  EXPECT_EQ(m.rm_bound, b.rm_bound);
  EXPECT_EQ(m.scalar, b.scalar);
  // U has unit length.
  EXPECT_NEAR(inner(prod, 0.1, circle_unit_field(prod), circle_unit_field(prod)), 1.0, 1e-15);
}

TEST(MetricEval, FlatProductIsFlatFourTorus) {
  const auto prod = product_with_circle(MetricBackground::flat_torus3(), 0.2);
  const MetricData m = metric_eval(prod, {generic_point(prod)}, 0.0);
  EXPECT_EQ(m.ric, Mat::Zero(4, 4));
  EXPECT_EQ(m.g(3, 3), 0.2 * 0.2);
  EXPECT_EQ(m.rm_bound, 0.0);
}

TEST(MetricEval, RejectsTimeOutsideDomainAndOffSpherePoints) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  EXPECT_THROW(metric_eval(bg, {sphere_point()}, 0.25), DomainError);
  EXPECT_THROW(metric_eval(bg, {sphere_point()}, -0.1), DomainError);
  Vec off = sphere_point() * 1.1;
  EXPECT_THROW(metric_eval(bg, {off}, 0.0), DomainError);
}

TEST(RicciResidual, FlatIsExactlyZero) {
  const auto bg = MetricBackground::flat_torus3();
  EXPECT_EQ(ricci_residual(bg, {generic_point(bg)}, 0.3, 1e-3), 0.0);
}

TEST(RicciResidual, ShrinkingSphereIsSmall) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  EXPECT_LE(ricci_residual(bg, {sphere_point()}, 0.1, 1e-3), 1e-5);
}

TEST(RicciResidual, ConvergesAtSecondOrderForEveryFamily) {
  for (const auto& bg : catalog()) {
    const double t = std::min(0.1, 0.4 * bg.t_domain().hi);
    const ChartPoint x{generic_point(bg)};
    const double r1 = ricci_residual(bg, x, t, 1e-2);
    const double r2 = ricci_residual(bg, x, t, 5e-3);
    if (r1 == 0.0) {
      EXPECT_EQ(r2, 0.0) << bg.name();
      continue;
    }
    // Scale factors are affine in t, so the centered difference is exact up to roundoff.
    EXPECT_TRUE(r2 <= r1 / 3.5 || r1 < 1e-10) << bg.name() << " " << r1 << " " << r2;
  }
}

TEST(RicciResidual, ProductEqualsBase) {
  const auto base = MetricBackground::round_sphere3_shrinking();
  const auto prod = product_with_circle(base, 0.1);
  Vec p4(5);
  p4.head(4) = sphere_point();
  p4(4) = 0.2;
  EXPECT_DOUBLE_EQ(ricci_residual(prod, {p4}, 0.1, 1e-3), ricci_residual(base, {sphere_point()}, 0.1, 1e-3));
}

TEST(ScalarMin, CatalogValues) {
  EXPECT_EQ(scalar_min(MetricBackground::flat_torus3(), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(scalar_min(MetricBackground::round_sphere3_shrinking(), 0.0), 6.0);
  EXPECT_DOUBLE_EQ(scalar_min(MetricBackground::round_sphere3_shrinking(), 0.125), 12.0);
  EXPECT_THROW(scalar_min(MetricBackground::round_sphere3_shrinking(), 0.3), DomainError);
}

TEST(HomogeneousScalarOde, ZeroIsFixedPoint) {
  const auto r = homogeneous_scalar_ode(0.0, 1.0, 1e-2);
  for (const auto& s : r.samples) EXPECT_EQ(s.r, 0.0);
  EXPECT_FALSE(r.bound_const.has_value());
  EXPECT_FALSE(r.blowup);
}

TEST(HomogeneousScalarOde, NegativeStartMatchesClosedFormAndBound) {
  const auto r = homogeneous_scalar_ode(-6.0, 2.0, 1e-3);
  ASSERT_TRUE(r.bound_const.has_value());
  EXPECT_DOUBLE_EQ(*r.bound_const, 0.25);
  for (const auto& s : r.samples) EXPECT_NEAR(s.r, -6.0 / (1.0 + 4.0 * s.t), 1e-9);
  EXPECT_LE(r.worst_bound_violation, 1e-9);
}

TEST(HomogeneousScalarOde, PositiveStartBlowsUpNearQuarter) {
  const auto r = homogeneous_scalar_ode(6.0, 1.0, 1e-3);
  EXPECT_TRUE(r.blowup);
  EXPECT_LE(r.samples.back().t, 0.25);
  EXPECT_GE(r.samples.back().t, 0.248);
  for (const auto& s : r.samples) {
    if (s.t <= 0.2) {
      EXPECT_NEAR(s.r, 6.0 / (1.0 - 4.0 * s.t), 1e-8 * s.r * s.r);
    }
  }
}

TEST(HomogeneousScalarOde, BoundHoldsForEveryNegativeStart) {
  for (const double r0 : {-0.1, -1.0, -3.0, -20.0, -100.0}) {
    const auto r = homogeneous_scalar_ode(r0, 1.0, 1e-3);
    ASSERT_TRUE(r.bound_const.has_value());
    // Equality case of the bound: R(t) = -(3/2)/(t + c) up to RK4 truncation.
    for (const auto& s : r.samples) {
      EXPECT_GE(s.r, -1.5 / (s.t + *r.bound_const) * (1.0 + 1e-6)) << r0;
    }
  }
}

TEST(HomogeneousScalarOde, RejectsCoarseStep) {
  EXPECT_THROW(homogeneous_scalar_ode(1.0, 1.0, 0.05), DomainError);
}

TEST(ProductWithCircle, Validation) {
  const auto base = MetricBackground::round_sphere3_shrinking();
  EXPECT_THROW(product_with_circle(base, 0.0), DomainError);
  EXPECT_THROW(product_with_circle(base, 1.0), DomainError);
  EXPECT_THROW(product_with_circle(product_with_circle(base, 0.1), 0.1), DomainError);
  const auto p = product_with_circle(base, 0.25);
  EXPECT_EQ(p.family(), Family::ProductWithCircle);
  EXPECT_EQ(p.t_domain().hi, base.t_domain().hi);
  EXPECT_EQ(p.rm_bound(0.1), base.rm_bound(0.1));
}

TEST(Catalog, ResolvesNames) {
  EXPECT_EQ(background_from_name("t3_flat").family(), Family::FlatTorus3);
  EXPECT_EQ(background_from_name("s3_shrinking").family(), Family::RoundSphere3Shrinking);
  EXPECT_EQ(background_from_name("s2xs1_shrinking").family(), Family::SphereCrossCircleShrinking);
  const auto p = background_from_name("product:s3_shrinking:lambda=0.05");
  EXPECT_EQ(p.family(), Family::ProductWithCircle);
  EXPECT_DOUBLE_EQ(p.lambda(), 0.05);
  EXPECT_DOUBLE_EQ(background_from_name("s3_shrinking:radius=2").extinction_time(), 1.0);
}

TEST(Catalog, RejectsBadNames) {
  EXPECT_THROW(background_from_name("s4_shrinking"), ConfigError);
  EXPECT_THROW(background_from_name("product:s3_shrinking"), ConfigError);
  EXPECT_THROW(background_from_name("product:s3_shrinking:lambda=abc"), ConfigError);
  EXPECT_THROW(background_from_name("t3_flat:period=-1"), DomainError);
}

TEST(PointOps, RetractAndGeodesicInterp) {
  const auto bg = MetricBackground::round_sphere3_shrinking();
  Vec p = 2.0 * sphere_point();
  retract(bg, p);
  EXPECT_NEAR(p.norm(), 1.0, 1e-15);
  const Vec a = unit(4, 0);
  const Vec b = unit(4, 1);
  const Vec mid = geodesic_interp(bg, a, b, 0.5);
  EXPECT_NEAR(mid(0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(mid(1), std::sqrt(0.5), 1e-15);
  EXPECT_THROW(geodesic_interp(bg, a, Vec(-a), 0.5), DegenerateCurve);
}
