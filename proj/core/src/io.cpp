#include "extlab/io.hpp"

#include "extlab/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace extlab {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

namespace {

// JSON has no inf/nan; they become null.
std::string json_real(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw Error("failed writing " + path.string());
}

std::string trajectory_csv(const FlowTrajectory& traj) {
  std::ostringstream os;
  os << "t,L,theta,k2int,k_max,status\n";
  const std::string st = to_string(traj.status);
  for (const auto& s : traj.samples) {
    const auto& m = s.monitor;
    os << format_real(s.t) << ',' << format_real(m.L) << ',' << format_real(m.theta) << ',' << format_real(m.k2int)
       << ',' << format_real(m.k_max) << ',' << st << '\n';
  }
  return os.str();
}

std::string curve_csv(const DiscreteCurve& c) {
  std::ostringstream os;
  os << 'i';
  for (int d = 0; d < c.embed_dim(); ++d) os << ",x" << d;
  os << '\n';
  for (int i = 0; i < c.size(); ++i) {
    os << i;
    for (int d = 0; d < c.embed_dim(); ++d) os << ',' << format_real(c[i](d));
    os << '\n';
  }
  return os.str();
}

std::string width_csv(const WidthSeries& ws, const ComparisonSolution& w, const Series& margin) {
  std::ostringstream os;
  os << "t,A,w,margin\n";
  std::size_t k = 0;
  for (std::size_t j = 0; j < ws.size(); ++j) {
    // Comparison solution is sampled on a finer grid; take the matching time.
    while (k + 1 < w.w.size() && w.w[k + 1].t <= ws[j].t + 1e-12) ++k;
    const double wv = k < w.w.size() ? w.w[k].value : std::nan("");
    os << format_real(ws[j].t) << ',' << format_real(ws[j].value) << ',' << format_real(wv) << ',';
    if (j < margin.size()) os << format_real(margin[j].value);
    os << '\n';
  }
  return os.str();
}

std::string ramp_csv(const std::vector<RampSample>& ramp) {
  std::ostringstream os;
  os << "t,u_min,ku_max,separation\n";
  for (const auto& r : ramp) {
    os << format_real(r.t) << ',' << format_real(r.u_min) << ',' << format_real(r.ku_max) << ','
       << format_real(r.separation) << '\n';
  }
  return os.str();
}

std::string family_json(const FamilyOutcome& f) {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t i = 0; i < f.curves.size(); ++i) {
    const auto& c = f.curves[i];
    os << "  {\"curve_id\": " << c.curve_id << ", \"verdict\": " << json_string(to_string(c.verdict)) << ", ";
    if (c.verdict == Verdict::WidthBounded) {
      os << "\"final_A\": " << json_real(c.final_area);
    } else {
      os << "\"final_L\": " << json_real(c.final_length);
    }
    os << ", \"bound\": " << json_real(c.bound) << '}' << (i + 1 < f.curves.size() ? "," : "") << '\n';
  }
  os << "]\n";
  return os.str();
}

std::string sweep_json(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "{\n  \"t_final\": " << json_real(r.t_final) << ",\n  \"members\": [\n";
  for (std::size_t i = 0; i < r.members.size(); ++i) {
    const auto& m = r.members[i];
    os << "    {\"lambda\": " << json_real(m.lambda) << ", \"final_length\": " << json_real(m.final_length)
       << ", \"u_min_lo\": " << json_real(m.u_min_lo) << ", \"u_min_hi\": " << json_real(m.u_min_hi)
       << ", \"status\": " << json_string(to_string(m.status)) << ", \"distance_to_direct\": "
       << (m.distance_to_direct ? json_real(*m.distance_to_direct) : "null") << '}'
       << (i + 1 < r.members.size() ? "," : "") << '\n';
  }
  os << "  ],\n  \"pairwise\": [";
  for (std::size_t i = 0; i < r.pairwise.size(); ++i) {
    os << (i ? ", " : "") << '[';
    for (std::size_t j = 0; j < r.pairwise[i].size(); ++j) os << (j ? ", " : "") << json_real(r.pairwise[i][j]);
    os << ']';
  }
  os << "],\n  \"direct_status\": " << (r.direct_status ? json_string(to_string(*r.direct_status)) : "null")
     << ",\n  \"fitted_order\": " << (r.fitted_order ? json_real(*r.fitted_order) : "null") << "\n}\n";
  return os.str();
}

}  // namespace extlab
