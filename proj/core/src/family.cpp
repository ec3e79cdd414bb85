#include "extlab/family.hpp"

#include "extlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace extlab {

std::string to_string(Verdict v) { return v == Verdict::WidthBounded ? "width_bounded" : "short"; }

namespace {

CurveOutcome deform_one(int id, const DiscreteCurve& c, const MetricBackground& bg, double t0, double t1, double xi,
                        const FamilyConfig& cfg) {
  CurveOutcome out;
  out.curve_id = id;

  if (c.is_constant()) {
    const RampRun run = ramp_flow_run(c, cfg.lambda, bg, t0, t1, cfg.flow);
    for (std::size_t j = 0; j < run.traj.samples.size(); ++j) {
      if (!run.projected(j).is_constant()) throw InvariantViolation("constant map did not stay constant");
    }
    out.verdict = Verdict::Short;
    out.bound = xi;
    out.t_end = run.traj.t_end();
    out.status = run.traj.status;
    return out;
  }

  const DiscreteCurve start = geodesic_polygon(c, cfg.anchors > 0 ? cfg.anchors : c.size(), bg, t0);
  const std::optional<double> a0 = oracle_width(start, bg, t0, cfg.fit_tol);

  FlowConfig flow = cfg.flow;
  // Ramp length >= sqrt(L_projected^2 + lambda^2), so this stop means the projection is shorter than xi / 2.
  flow.extinct_length = std::sqrt(cfg.lambda * cfg.lambda + 0.25 * xi * xi);
  const RampRun run = ramp_flow_run(start, cfg.lambda, bg, t0, t1, flow);
  const DiscreteCurve last = run.projected(run.traj.samples.size() - 1);
  out.t_end = run.traj.t_end();
  out.status = run.traj.status;
  out.final_length = chord_length(last, bg, out.t_end);

  if (a0 && run.traj.status == FlowStatus::Completed) {
    const auto af = oracle_width(last, bg, out.t_end, cfg.fit_tol);
    const ComparisonSolution barrier = comparison_ode(*a0, bg, t0, t1, cfg.ode_dt);
    const double bound = barrier.w.back().value + xi;
    if (af && *af <= bound) {
      out.verdict = Verdict::WidthBounded;
      out.final_area = *af;
      out.bound = bound;
      return out;
    }
  }
  if (out.final_length <= xi) {
    out.verdict = Verdict::Short;
    out.bound = xi;
    return out;
  }
  throw InvariantViolation("curve " + std::to_string(id) + " is neither width bounded nor short");
}

}  // namespace

FamilyOutcome deform_family(const std::vector<DiscreteCurve>& family, const MetricBackground& bg, double t0,
                            double t1, const FamilyConfig& cfg) {
  if (family.empty()) throw DomainError("family is empty");
  FamilyOutcome rep;
  rep.xi = cfg.xi;
  if (!(rep.xi > 0.0)) {
    double longest = 0.0;
    for (const auto& c : family) longest = std::max(longest, chord_length(c, bg, t0));
    rep.xi = 1e-2 * longest;
  }
  if (!(rep.xi > 0.0)) rep.xi = 1e-2;  // family of constant maps

  const std::size_t workers =
      cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs) : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  rep.curves.resize(family.size());
  for (std::size_t start = 0; start < family.size(); start += workers) {
    std::vector<std::future<CurveOutcome>> batch;
    for (std::size_t i = start; i < std::min(family.size(), start + workers); ++i) {
      batch.push_back(std::async(std::launch::async, [&, i] {
        return deform_one(static_cast<int>(i), family[i], bg, t0, t1, rep.xi, cfg);
      }));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) rep.curves[start + i] = batch[i].get();
  }
  return rep;
}

}  // namespace extlab
