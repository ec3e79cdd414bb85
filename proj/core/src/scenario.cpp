#include "extlab/scenario.hpp"

#include "extlab/catalog.hpp"
#include "extlab/error.hpp"
#include "extlab/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace extlab {

using nlohmann::json;

const std::vector<std::string>& scenario_check_names() {
  static const std::vector<std::string> names = {
      "circle_length", "speed_residual",   "length_residual", "curvature_inequality", "growth",
      "comparison_rate",         "normalized_width", "u_positive",      "u_residual",           "constant"};
  return names;
}

bool ScenarioResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ScenarioCheck& c) { return c.passed; });
}

namespace {

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

CurveSpec parse_curve(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  CurveSpec s;
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "circle") {
    allow_keys(j, {"kind", "r", "plane"}, where);
    s.kind = CurveSpec::Kind::Circle;
    s.r = get_or<double>(j, "r", 1.0, where);
    if (j.contains("plane")) {
      const auto p = get<std::vector<int>>(j, "plane", where);
      if (p.size() != 2 || p[0] == p[1] || p[0] < 0 || p[1] < 0) throw ConfigError("plane must be two distinct axes");
      s.plane_a = p[0];
      s.plane_b = p[1];
    }
  } else if (kind == "great_circle") {
    allow_keys(j, {"kind"}, where);
    s.kind = CurveSpec::Kind::GreatCircle;
  } else if (kind == "cap_circle") {
    allow_keys(j, {"kind", "phi"}, where);
    s.kind = CurveSpec::Kind::CapCircle;
    s.phi = get<double>(j, "phi", where);
  } else if (kind == "constant") {
    allow_keys(j, {"kind"}, where);
    s.kind = CurveSpec::Kind::Constant;
  } else if (kind == "polyline") {
    allow_keys(j, {"kind", "anchors", "jitter"}, where);
    s.kind = CurveSpec::Kind::Polyline;
    s.anchors = get<std::vector<std::vector<double>>>(j, "anchors", where);
    s.jitter = get_or<double>(j, "jitter", 0.0, where);
    if (s.anchors.size() < 3) throw ConfigError("polyline needs at least three anchors");
    if (s.jitter < 0.0) throw ConfigError("jitter must be nonnegative");
  } else if (kind == "back_and_forth") {
    allow_keys(j, {"kind", "arc", "bend"}, where);
    s.kind = CurveSpec::Kind::BackAndForth;
    s.arc = get<double>(j, "arc", where);
    s.bend = get_or<double>(j, "bend", 1.0, where);
  } else if (kind == "torus_geodesic") {
    allow_keys(j, {"kind", "axis"}, where);
    s.kind = CurveSpec::Kind::TorusGeodesic;
    s.axis = get_or<int>(j, "axis", 0, where);
  } else {
    throw ConfigError("unknown curve kind '" + kind + "'");
  }
  return s;
}

}  // namespace

DiscreteCurve build_curve(const CurveSpec& spec, const MetricBackground& bg, int n, unsigned long long seed) {
  switch (spec.kind) {
    case CurveSpec::Kind::Circle:
      return flat_circle(bg, spec.r, n, spec.plane_a, spec.plane_b);
    case CurveSpec::Kind::GreatCircle:
      return great_circle(bg, n);
    case CurveSpec::Kind::CapCircle:
      return latitude_circle(bg, spec.phi, n);
    case CurveSpec::Kind::Constant:
      return constant_loop(bg, n);
    case CurveSpec::Kind::BackAndForth:
      return back_and_forth(bg, spec.arc, spec.bend, n);
    case CurveSpec::Kind::TorusGeodesic:
      return torus_geodesic(bg, n, spec.axis);
    case CurveSpec::Kind::Polyline: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      std::vector<Vec> anchors;
      for (const auto& a : spec.anchors) {
        if (static_cast<int>(a.size()) != bg.embed_dim()) throw DomainError("anchor has wrong dimension");
        Vec p(bg.embed_dim());
        for (int d = 0; d < bg.embed_dim(); ++d) p(d) = a[static_cast<std::size_t>(d)] + spec.jitter * unit(rng);
        retract(bg, p);
        bg.require_point(p);
        anchors.push_back(p);
      }
      return polygon_through(anchors, n, bg);
    }
  }
  throw DomainError("unknown curve kind");
}

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const std::string where = "config";
  allow_keys(j,
             {"version", "background", "curve", "family", "lambda", "interval", "N", "cfl", "sample_dt", "redistribute",
              "ceiling_factor", "polygon_anchors", "checks", "output", "seed", "xi", "tolerance"},
             where);
  if (get<std::string>(j, "version", where) != "v1") throw ConfigError("unsupported config version (expected \"v1\")");

  ScenarioConfig cfg;
  cfg.background = get<std::string>(j, "background", where);
  if (j.contains("curve") == j.contains("family")) throw ConfigError("config needs exactly one of 'curve' or 'family'");
  if (j.contains("curve")) {
    cfg.curves.push_back(parse_curve(j.at("curve"), "curve"));
  } else {
    if (!j.at("family").is_array() || j.at("family").empty()) throw ConfigError("family must be a nonempty array");
    cfg.is_family = true;
    for (std::size_t i = 0; i < j.at("family").size(); ++i) {
      cfg.curves.push_back(parse_curve(j.at("family")[i], "family[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("lambda")) cfg.lambda = get<double>(j, "lambda", where);
  const auto iv = get<std::vector<double>>(j, "interval", where);
  if (iv.size() != 2) throw ConfigError("interval must be [t0, t1]");
  cfg.t0 = iv[0];
  cfg.t1 = iv[1];
  cfg.n = get_or<int>(j, "N", 128, where);
  cfg.flow.cfl = get_or<double>(j, "cfl", cfg.flow.cfl, where);
  cfg.flow.sample_dt = get_or<double>(j, "sample_dt", 0.0, where);
  cfg.flow.redistribute = get_or<bool>(j, "redistribute", true, where);
  cfg.flow.ceiling_factor = get_or<double>(j, "ceiling_factor", cfg.flow.ceiling_factor, where);
  cfg.polygon_anchors = get_or<int>(j, "polygon_anchors", 0, where);
  cfg.checks = get_or<std::vector<std::string>>(j, "checks", {}, where);
  cfg.output = get_or<std::string>(j, "output", cfg.output, where);
  cfg.seed = get_or<unsigned long long>(j, "seed", 0ULL, where);
  cfg.xi = get_or<double>(j, "xi", 0.0, where);
  cfg.tolerance = get_or<double>(j, "tolerance", cfg.tolerance, where);

  if (cfg.n < DiscreteCurve::kMinVertices) throw ConfigError("N must be at least 16");
  if (!(cfg.t1 > cfg.t0)) throw ConfigError("interval needs t1 > t0");
  if (!(cfg.flow.cfl > 0.0)) throw ConfigError("cfl must be positive");
  if (cfg.flow.sample_dt < 0.0) throw ConfigError("sample_dt must be nonnegative");
  if (!(cfg.flow.ceiling_factor > 0.0)) throw ConfigError("ceiling_factor must be positive");
  if (cfg.polygon_anchors != 0 && (cfg.polygon_anchors < 3 || cfg.polygon_anchors > cfg.n)) {
    throw ConfigError("polygon_anchors must lie in [3, N]");
  }
  if (cfg.lambda && !(*cfg.lambda > 0.0 && *cfg.lambda < 1.0)) throw ConfigError("lambda must lie in (0, 1)");
  if (cfg.is_family && !cfg.lambda) throw ConfigError("family scenarios need lambda");
  if (cfg.xi < 0.0 || !(cfg.tolerance > 0.0)) throw ConfigError("xi must be >= 0 and tolerance > 0");
  const auto& known = scenario_check_names();
  for (const auto& c : cfg.checks) {
    if (std::find(known.begin(), known.end(), c) == known.end()) throw ConfigError("unknown check '" + c + "'");
  }

  try {
    const MetricBackground bg = background_from_name(cfg.background);
    bg.require_time(cfg.t0);
    bg.require_time(cfg.t1);
    for (const auto& s : cfg.curves) (void)build_curve(s, bg, cfg.n, cfg.seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return parse_scenario(os.str());
}

std::string output_prefix(const ScenarioConfig& cfg) {
  if (const char* env = std::getenv("EXTLAB_OUT"); env != nullptr && *env != '\0') return env;
  return cfg.output;
}

namespace {

bool wants(const ScenarioConfig& cfg, const std::string& name) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
}

constexpr double kWidthFitTol = 1e-4;

struct Emitter {
  std::string prefix;
  ScenarioResult* result;
  void operator()(const std::string& name, const std::string& content) const {
    const std::string path = prefix + name;
    write_text(path, content);
    result->files.push_back(path);
  }
};

std::string residual_csv(const std::vector<std::pair<std::string, Series>>& cols) {
  std::ostringstream os;
  os << 't';
  for (const auto& [name, s] : cols) os << ',' << name;
  os << '\n';
  const std::size_t rows = cols.front().second.size();
  for (std::size_t j = 0; j < rows; ++j) {
    os << format_real(cols.front().second[j].t);
    for (const auto& [name, s] : cols) os << ',' << format_real(s[j].value);
    os << '\n';
  }
  return os.str();
}

std::string summary_json(const ScenarioConfig& cfg, const ScenarioResult& r, const std::string& extra) {
  std::ostringstream os;
  os << "{\n  \"background\": " << json_string(cfg.background);
  if (!r.traj.samples.empty()) {
    os << ",\n  \"status\": " << json_string(to_string(r.traj.status)) << ",\n  \"steps\": " << r.traj.steps
       << ",\n  \"t_end\": " << format_real(r.traj.t_end()) << ",\n  \"final_L\": "
       << format_real(r.traj.samples.back().monitor.L);
  }
  os << extra << ",\n  \"checks\": [";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const auto& c = r.checks[i];
    os << (i ? ", " : "") << "{\"name\": " << json_string(c.name) << ", \"passed\": " << (c.passed ? "true" : "false")
       << ", \"measured\": " << (std::isfinite(c.measured) ? format_real(c.measured) : "null")
       << ", \"tolerance\": " << (std::isfinite(c.tolerance) ? format_real(c.tolerance) : "null") << '}';
  }
  os << "]\n}\n";
  return os.str();
}

// Residual-style monitors are exported, not asserted (their scale depends on resolution).
void report(ScenarioResult& r, const std::string& name, double measured) {
  r.checks.push_back({name, std::isfinite(measured), measured, kInf});
}

void assert_le(ScenarioResult& r, const std::string& name, double measured, double tol) {
  r.checks.push_back({name, measured <= tol, measured, tol});
}

void assert_ge(ScenarioResult& r, const std::string& name, double measured, double tol) {
  r.checks.push_back({name, measured >= tol, measured, tol});
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const MetricBackground bg = background_from_name(cfg.background);
  ScenarioResult result;
  const Emitter emit{output_prefix(cfg), &result};

  if (cfg.is_family) {
    std::vector<DiscreteCurve> family;
    for (const auto& s : cfg.curves) family.push_back(build_curve(s, bg, cfg.n, cfg.seed));
    FamilyConfig fc;
    fc.lambda = *cfg.lambda;
    fc.anchors = cfg.polygon_anchors;
    fc.xi = cfg.xi;
    fc.jobs = 1;
    fc.flow = cfg.flow;
    const FamilyOutcome out = deform_family(family, bg, cfg.t0, cfg.t1, fc);
    emit("family.json", family_json(out));
    emit("summary.json", summary_json(cfg, result, ",\n  \"xi\": " + format_real(out.xi)));
    return result;
  }

  DiscreteCurve c = build_curve(cfg.curves.front(), bg, cfg.n, cfg.seed);
  if (cfg.polygon_anchors > 0) c = geodesic_polygon(c, cfg.polygon_anchors, bg, cfg.t0);

  std::optional<RampRun> ramp;
  std::vector<DiscreteCurve> base_curves;  // curves in the 3-manifold
  if (cfg.lambda) {
    ramp = ramp_flow_run(c, *cfg.lambda, bg, cfg.t0, cfg.t1, cfg.flow);
    result.traj = ramp->traj;
    for (std::size_t j = 0; j < ramp->traj.samples.size(); ++j) base_curves.push_back(ramp->projected(j));
  } else {
    result.traj = run_flow(c, bg, cfg.t0, cfg.t1, cfg.flow);
    for (const auto& s : result.traj.samples) base_curves.push_back(s.curve);
  }
  const MetricBackground& flow_bg = ramp ? ramp->product : bg;
  const FlowTrajectory& traj = result.traj;
  const double ambient = ambient_constant(bg, cfg.t0, cfg.t1, cfg.flow);

  std::vector<std::pair<std::string, Series>> residuals;
  const bool smooth = traj.status == FlowStatus::Completed;

  if (wants(cfg, "circle_length")) {
    const auto& spec = cfg.curves.front();
    if (spec.kind != CurveSpec::Kind::Circle || cfg.lambda) throw ConfigError("circle_length needs a direct flat circle");
    double worst = 0.0;
    for (const auto& s : traj.samples) {
      const double exact = 2.0 * kPi * std::sqrt(spec.r * spec.r - 2.0 * s.t);
      worst = std::max(worst, std::abs(s.monitor.L / exact - 1.0));
    }
    assert_le(result, "circle_length", worst, 5e-3);
  }
  if (wants(cfg, "speed_residual")) {
    residuals.emplace_back("speed", speed_identity_residual(traj, flow_bg, 0));
    report(result, "speed_residual", series_max_abs(residuals.back().second));
  }
  if (wants(cfg, "length_residual")) {
    residuals.emplace_back("length", length_identity_residual(traj, flow_bg));
    report(result, "length_residual", series_max_abs(residuals.back().second));
  }
  if (wants(cfg, "u_residual")) {
    if (!ramp) throw ConfigError("u_residual needs lambda");
    residuals.emplace_back("u", u_evolution_residual(traj, flow_bg));
    report(result, "u_residual", series_max_abs(residuals.back().second));
  }
  if (wants(cfg, "curvature_inequality")) {
    const Series m = curvature_inequality_monitor(traj, flow_bg, ambient);
    residuals.emplace_back("curvature_margin", m);
    assert_le(result, "curvature_inequality", series_max(m), cfg.tolerance);
  }
  if (wants(cfg, "growth")) {
    const GrowthReport g = exponential_growth(traj, ambient);
    assert_le(result, "growth", std::max(g.worst_length_excess, g.worst_theta_excess), cfg.tolerance);
  }
  if (wants(cfg, "u_positive")) {
    if (!ramp) throw ConfigError("u_positive needs lambda");
    assert_ge(result, "u_positive", ramp->u_floor_ratio, 0.5);
  }
  if (wants(cfg, "constant")) {
    double drift = 0.0;
    for (const auto& b : base_curves) drift = std::max(drift, b.is_constant() ? 0.0 : kInf);
    assert_le(result, "constant", drift, 0.0);
  }
  if (wants(cfg, "comparison_rate") || wants(cfg, "normalized_width")) {
    if (!smooth) throw InvariantViolation("width checks need a completed flow");
    WidthSeries ws;
    for (std::size_t j = 0; j < base_curves.size(); ++j) {
      const double t = traj.samples[j].t;
      const auto a = oracle_width(base_curves[j], bg, t, kWidthFitTol);
      if (!a) throw InvariantViolation("loop lost its closed-form minimal disk at t = " + format_real(t));
      ws.push_back({t, *a});
    }
    const double spacing = ws.size() > 1 ? ws[1].t - ws[0].t : 1e-4;
    const ComparisonSolution w = comparison_ode(ws.front().value, bg, cfg.t0, traj.t_end(), std::min(1e-4, spacing));
    Series margin;
    if (wants(cfg, "comparison_rate")) {
      margin = comparison_margin(ws, bg);
      double worst = -kInf;
      for (std::size_t j = 0; j < margin.size(); ++j) {
        const double rate = std::abs((ws[j + 1].value - ws[j].value) / (ws[j + 1].t - ws[j].t));
        worst = std::max(worst, margin[j].value / rate);
      }
      assert_le(result, "comparison_rate", worst, cfg.tolerance);
    }
    if (wants(cfg, "normalized_width")) {
      const Series nm = normalized_width_check(ws, w.const_used);
      double worst = -kInf;
      for (const auto& p : nm) worst = std::max(worst, p.value * (p.t + w.const_used) / (2.0 * kPi));
      assert_le(result, "normalized_width", worst, cfg.tolerance);
      if (margin.empty()) margin = nm;
    }
    emit("width.csv", width_csv(ws, w, margin));
  }

  emit("trajectory.csv", trajectory_csv(traj));
  emit("final_curve.csv", curve_csv(base_curves.back()));
  if (ramp) emit("ramp.csv", ramp_csv(ramp->ramp));
  if (!residuals.empty()) emit("residuals.csv", residual_csv(residuals));
  emit("summary.json", summary_json(cfg, result, ""));
  return result;
}

ScenarioResult run_sweep(const ScenarioConfig& cfg, const std::vector<double>& lambdas, int jobs) {
  if (cfg.is_family) throw ConfigError("sweep needs a single-curve config");
  const MetricBackground bg = background_from_name(cfg.background);
  DiscreteCurve c = build_curve(cfg.curves.front(), bg, cfg.n, cfg.seed);
  if (cfg.polygon_anchors > 0) c = geodesic_polygon(c, cfg.polygon_anchors, bg, cfg.t0);
  ScenarioResult result;
  const Emitter emit{output_prefix(cfg), &result};
  const ConvergenceReport rep = lambda_sweep(c, lambdas, bg, cfg.t0, cfg.t1, cfg.flow, jobs);
  emit("sweep.json", sweep_json(rep));
  return result;
}

}  // namespace extlab
