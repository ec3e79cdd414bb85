#pragma once

// Plain-text exports. Every real is written with 17 significant digits.

#include "extlab/comparison.hpp"
#include "extlab/family.hpp"
#include "extlab/ramp.hpp"

#include <filesystem>
#include <string>

namespace extlab {

/// "%.17g"; non-finite values as inf, -inf, nan.
std::string format_real(double v);

/// Quoted, escaped JSON string.
std::string json_string(const std::string& s);

/// Creates missing parent directories, then writes the file (throws Error on failure).
void write_text(const std::filesystem::path& path, const std::string& content);

/// Columns t, L, theta, k2int, k_max, status (status repeated on every row).
std::string trajectory_csv(const FlowTrajectory& traj);

/// One vertex per row: i, x0, x1, ...
std::string curve_csv(const DiscreteCurve& c);

/// Columns t, A, w, margin; margin is empty on the last row (forward differences).
std::string width_csv(const WidthSeries& ws, const ComparisonSolution& w, const Series& margin);

/// Columns t, u_min, ku_max, separation.
std::string ramp_csv(const std::vector<RampSample>& ramp);

/// [{curve_id, verdict, final_A | final_L, bound}, ...]
std::string family_json(const FamilyOutcome& f);

/// Per-lambda final length, u_min extrema, distance to direct CSF; pairwise distances; fitted order.
std::string sweep_json(const ConvergenceReport& r);

}  // namespace extlab
