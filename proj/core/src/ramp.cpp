#include "extlab/ramp.hpp"

#include "extlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace extlab {

RampCurve lift(const DiscreteCurve& c, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  RampCurve r;
  r.base = c;
  r.lambda = lambda;
  const int n = c.size();
  r.theta.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r.theta[static_cast<std::size_t>(i)] = lambda * i / n;
  return r;
}

DiscreteCurve project(const RampCurve& r) { return r.base; }

DiscreteCurve assemble(const RampCurve& r, const MetricBackground& product) {
  if (product.circle_coord() < 0) throw DomainError("assemble needs a product background");
  if (r.winding != 1) throw DomainError("ramps must wind once around the circle factor");
  const int n = r.base.size();
  const int m = r.base.embed_dim();
  if (m + 1 != product.embed_dim()) throw DomainError("ramp base does not match the product base");
  std::vector<Vec> pts(static_cast<std::size_t>(n));
  double x = r.theta[0] / r.lambda;
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      double d = (r.theta[static_cast<std::size_t>(i)] - r.theta[static_cast<std::size_t>(i - 1)]) / r.lambda;
      d -= std::floor(d + 0.5);  // nearest representative of the step around the circle
      x += d;
    }
    Vec p(m + 1);
    p.head(m) = r.base[i];
    p(m) = x;
    pts[static_cast<std::size_t>(i)] = p;
  }
  Vec wrap = Vec::Zero(m + 1);
  wrap.head(m) = r.base.wrap();
  wrap(m) = 1.0;
  return DiscreteCurve(std::move(pts), wrap);
}

RampCurve disassemble(const DiscreteCurve& c, const MetricBackground& product) {
  const int cc = product.circle_coord();
  if (cc < 0) throw DomainError("disassemble needs a product background");
  if (std::abs(c.wrap()(cc) - 1.0) > 1e-12) throw DomainError("curve does not wind once around the circle factor");
  const int n = c.size();
  std::vector<Vec> base(static_cast<std::size_t>(n));
  RampCurve r;
  r.lambda = product.lambda();
  r.theta.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    base[static_cast<std::size_t>(i)] = c[i].head(cc);
    const double x = c[i](cc);
    r.theta[static_cast<std::size_t>(i)] = r.lambda * (x - std::floor(x));
  }
  r.base = DiscreteCurve(std::move(base), c.wrap().head(cc));
  return r;
}

RampMonitors ramp_quantity(const DiscreteCurve& assembled, const MetricBackground& product, double t) {
  product.require_time(t);
  const CurveGeometry g = curve_geometry(assembled, product, t);
  const int cc = product.circle_coord();
  RampMonitors m;
  m.u.resize(g.S.size());
  m.u_min = kInf;
  for (std::size_t i = 0; i < g.S.size(); ++i) {
    // U = (1/lambda) d/dx, so g(S, U) = lambda^2 S^x / lambda.
    m.u[i] = product.lambda() * g.S[i](cc);
    m.u_min = std::min(m.u_min, m.u[i]);
    if (m.u[i] > 0.0) m.ku_max = std::max(m.ku_max, g.k[i] / m.u[i]);
  }
  if (m.u_min <= 0.0) m.ku_max = kInf;
  return m;
}

RampMonitors ramp_quantity(const RampCurve& r, const MetricBackground& product, double t) {
  return ramp_quantity(assemble(r, product), product, t);
}

double min_vertex_separation(const DiscreteCurve& assembled, const MetricBackground& product, double t) {
  // Pairwise distance between vertices, comparing each pair with the nearest deck translate.
  const int n = assembled.size();
  double best = kInf;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec& a = assembled[i];
      double d = chord_distance(product, t, a, assembled[j]);
      d = std::min(d, chord_distance(product, t, a, assembled.vertex(j - n)));
      d = std::min(d, chord_distance(product, t, a, assembled.vertex(j + n)));
      best = std::min(best, d);
    }
  }
  return best;
}

Series u_evolution_residual(const FlowTrajectory& traj, const MetricBackground& product) {
  if (traj.samples.size() < 3) throw DomainError("u residual needs at least three samples");
  std::vector<CurveGeometry> geo;
  std::vector<std::vector<double>> u;
  for (const auto& s : traj.samples) {
    if (s.curve.size() == 0) throw DomainError("u residual needs stored curves");
    geo.push_back(curve_geometry(s.curve, product, s.t));
    u.push_back(ramp_quantity(s.curve, product, s.t).u);
  }
  Series out;
  for (std::size_t j = 1; j + 1 < geo.size(); ++j) {
    const double span = traj.samples[j + 1].t - traj.samples[j - 1].t;
    const auto& g = geo[j];
    double worst = 0.0;
    for (std::size_t i = 0; i < g.k.size(); ++i) {
      const double dudt = (u[j + 1][i] - u[j - 1][i]) / span;
      const double upp = arclength_second_derivative(u[j], g.ds, i);
      const double reaction = g.k[i] * g.k[i] + ricci_form(product, g.S[i], g.S[i]);
      worst = std::max(worst, std::abs(dudt - upp - reaction * u[j][i]));
    }
    out.push_back({traj.samples[j].t, worst});
  }
  return out;
}

DiscreteCurve RampRun::projected(std::size_t sample) const {
  return project(disassemble(traj.samples.at(sample).curve, product));
}

RampRun ramp_flow_run(const DiscreteCurve& c, double lambda, const MetricBackground& bg, double t0, double t1,
                      const FlowConfig& cfg) {
  RampRun run{product_with_circle(bg, lambda), {}, {}, 0.0, 0.0, kInf};
  FlowConfig local = cfg;
  local.keep_curves = true;
  const DiscreteCurve assembled = assemble(lift(c, lambda), run.product);
  run.traj = run_flow(assembled, run.product, t0, t1, local);
  run.ambient = ambient_constant(bg, t0, t1, cfg);

  for (const auto& s : run.traj.samples) {
    const RampMonitors m = ramp_quantity(s.curve, run.product, s.t);
    if (!(m.u_min > 0.0)) {
      throw InvariantViolation("ramp quantity u lost positivity at t = " + std::to_string(s.t));
    }
    run.ramp.push_back({s.t, m.u_min, m.ku_max, min_vertex_separation(s.curve, run.product, s.t)});
  }
  const RampSample& first = run.ramp.front();
  for (const auto& r : run.ramp) {
    const double growth = std::exp(run.ambient * (r.t - first.t));
    if (first.ku_max > 0.0) run.envelope_ratio = std::max(run.envelope_ratio, r.ku_max / (first.ku_max * growth));
    run.u_floor_ratio = std::min(run.u_floor_ratio, r.u_min * growth / first.u_min);
  }
  return run;
}

std::optional<double> fit_order(const std::vector<double>& lambdas, const std::vector<double>& distances) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < lambdas.size() && i < distances.size(); ++i) {
    if (lambdas[i] > 0.0 && distances[i] > 0.0) pts.emplace_back(std::log(lambdas[i]), std::log(distances[i]));
  }
  if (pts.size() < 2) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ConvergenceReport lambda_sweep(const DiscreteCurve& c, const std::vector<double>& lambdas, const MetricBackground& bg,
                               double t0, double t1, const FlowConfig& cfg, int jobs) {
  if (lambdas.size() < 3) throw DomainError("lambda sweep needs at least three values");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] < lambdas[i - 1])) throw DomainError("lambda list must be strictly decreasing");
  }
  const std::size_t workers =
      jobs > 0 ? static_cast<std::size_t>(jobs) : std::max<std::size_t>(1, std::thread::hardware_concurrency());

  ConvergenceReport rep;
  rep.t_final = t1;
  rep.members.resize(lambdas.size());
  for (std::size_t start = 0; start < lambdas.size(); start += workers) {
    std::vector<std::future<SweepMember>> batch;
    for (std::size_t i = start; i < std::min(lambdas.size(), start + workers); ++i) {
      batch.push_back(std::async(std::launch::async, [&, i] {
        const RampRun run = ramp_flow_run(c, lambdas[i], bg, t0, t1, cfg);
        SweepMember m;
        m.lambda = lambdas[i];
        m.status = run.traj.status;
        m.final_projected = run.projected(run.traj.samples.size() - 1);
        m.final_length = chord_length(m.final_projected, bg, run.traj.t_end());
        m.u_min_lo = kInf;
        m.u_min_hi = 0.0;
        for (const auto& r : run.ramp) {
          m.u_min_lo = std::min(m.u_min_lo, r.u_min);
          m.u_min_hi = std::max(m.u_min_hi, r.u_min);
        }
        return m;
      }));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) rep.members[start + i] = batch[i].get();
  }
  for (const auto& m : rep.members) {
    if (m.status != FlowStatus::Completed) throw InvariantViolation("a lambda sweep member did not complete");
  }

  const std::size_t n = rep.members.size();
  rep.pairwise.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = hausdorff(rep.members[i].final_projected, rep.members[j].final_projected, bg, t1);
      rep.pairwise[i][j] = d;
      rep.pairwise[j][i] = d;
    }
  }

  // Direct CSF reference only exists for immersed, non-constant inputs.
  if (!c.is_constant() && curve_geometry(c, bg, t0).immersed) {
    FlowConfig direct_cfg = cfg;
    direct_cfg.keep_curves = true;
    const FlowTrajectory direct = run_flow(c, bg, t0, t1, direct_cfg);
    rep.direct_status = direct.status;
    if (direct.status == FlowStatus::Completed) {
      std::vector<double> dist;
      for (auto& m : rep.members) {
        m.distance_to_direct = hausdorff(m.final_projected, direct.samples.back().curve, bg, t1);
        dist.push_back(*m.distance_to_direct);
      }
      rep.fitted_order = fit_order(lambdas, dist);
    }
  }
  return rep;
}

}  // namespace extlab
