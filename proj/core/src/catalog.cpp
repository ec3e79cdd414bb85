#include "extlab/catalog.hpp"

#include "extlab/error.hpp"

#include <charconv>
#include <map>
#include <string>
#include <vector>

namespace extlab {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_number(const std::string& text, std::string_view context) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("cannot parse number '" + text + "' in background '" + std::string(context) + "'");
  }
  return v;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& parts, std::size_t from,
                                           std::string_view context) {
  std::map<std::string, double> params;
  for (std::size_t i = from; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in background '" + std::string(context) + "'");
    params[parts[i].substr(0, eq)] = parse_number(parts[i].substr(eq + 1), context);
  }
  return params;
}

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

MetricBackground base_from_parts(const std::string& family, std::map<std::string, double> params,
                                 std::string_view context) {
  MetricBackground bg = [&] {
    if (family == "t3_flat") return MetricBackground::flat_torus3(take(params, "period", 2.0 * kPi));
    if (family == "s3_shrinking") return MetricBackground::round_sphere3_shrinking(take(params, "radius", 1.0));
    if (family == "s2xs1_shrinking") {
      const double r = take(params, "radius", 1.0);
      return MetricBackground::sphere_cross_circle_shrinking(r, take(params, "circle", 1.0));
    }
    throw ConfigError("unknown background family '" + family + "'");
  }();
  if (!params.empty()) {
    throw ConfigError("unknown parameter '" + params.begin()->first + "' in background '" + std::string(context) + "'");
  }
  return bg;
}

}  // namespace

MetricBackground background_from_name(std::string_view name) {
  const auto parts = split(name, ':');
  if (parts.empty() || parts[0].empty()) throw ConfigError("empty background name");
  if (parts[0] == "product") {
    if (parts.size() < 3) throw ConfigError("product background needs a base and lambda: " + std::string(name));
    // product:<base>[:base params...]:lambda=<v>
    auto params = parse_params(parts, 2, name);
    const auto it = params.find("lambda");
    if (it == params.end()) throw ConfigError("product background needs lambda=<value>");
    const double lambda = it->second;
    params.erase(it);
    return product_with_circle(base_from_parts(parts[1], params, name), lambda);
  }
  return base_from_parts(parts[0], parse_params(parts, 1, name), name);
}

}  // namespace extlab
