#pragma once

#include "extlab/geometry.hpp"

#include <string>
#include <string_view>

namespace extlab {

/// Resolve a catalog name: "t3_flat", "s3_shrinking", "s2xs1_shrinking",
/// "product:<base>:lambda=<value>". Base names accept optional ":key=value"
/// parameters (t3_flat:period=, s3_shrinking:radius=, s2xs1_shrinking:radius=,circle=).
MetricBackground background_from_name(std::string_view name);

}  // namespace extlab
