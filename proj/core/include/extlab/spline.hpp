#pragma once

#include "extlab/geometry.hpp"

#include <vector>

namespace extlab {

/// Interpolating cubic spline with periodic boundary conditions on
/// non-uniform knots s_0 = 0 < s_1 < ... < s_{N-1} < period, for vector data.
class PeriodicSpline {
 public:
  PeriodicSpline(std::vector<double> knots, double period, std::vector<Vec> values);

  [[nodiscard]] Vec operator()(double s) const;

 private:
  std::vector<double> knots_;
  double period_;
  std::vector<Vec> values_;
  std::vector<Vec> second_;  // second derivatives at knots
};

/// Solve the cyclic tridiagonal system with sub/diag/super diagonals (corner
/// entries sub[0] and super[n-1]) for several right-hand sides in place.
void solve_cyclic_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                              const std::vector<double>& super, std::vector<Vec>& rhs);

}  // namespace extlab
