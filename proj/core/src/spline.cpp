#include "extlab/spline.hpp"

#include "extlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace extlab {

void solve_cyclic_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                              const std::vector<double>& super, std::vector<Vec>& rhs) {
  // Sherman-Morrison on top of the Thomas algorithm.
  const std::size_t n = diag.size();
  if (n < 3 || sub.size() != n || super.size() != n || rhs.size() != n) {
    throw DomainError("cyclic tridiagonal system needs n >= 3 and matching sizes");
  }
  const double alpha = super[n - 1];  // A(n-1, 0)
  const double beta = sub[0];         // A(0, n-1)
  const double gamma = -diag[0];

  std::vector<double> b(diag);
  b[0] -= gamma;
  b[n - 1] -= alpha * beta / gamma;

  // Thomas factorization of the modified tridiagonal matrix.
  std::vector<double> c(n);
  std::vector<double> denom(n);
  denom[0] = b[0];
  c[0] = super[0] / denom[0];
  for (std::size_t i = 1; i < n; ++i) {
    denom[i] = b[i] - sub[i] * c[i - 1];
    c[i] = super[i] / denom[i];
  }
  const auto thomas = [&](std::vector<Vec>& d) {
    d[0] /= denom[0];
    for (std::size_t i = 1; i < n; ++i) d[i] = (d[i] - sub[i] * d[i - 1]) / denom[i];
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  };

  std::vector<Vec> u(n, Vec::Zero(1));
  u[0](0) = gamma;
  u[n - 1](0) = alpha;
  thomas(u);
  thomas(rhs);
  const double vz_den = 1.0 + u[0](0) + beta / gamma * u[n - 1](0);
  for (std::size_t col = 0; col < static_cast<std::size_t>(rhs[0].size()); ++col) {
    const double vy = rhs[0](col) + beta / gamma * rhs[n - 1](col);
    const double factor = vy / vz_den;
    for (std::size_t i = 0; i < n; ++i) rhs[i](col) -= factor * u[i](0);
  }
}

PeriodicSpline::PeriodicSpline(std::vector<double> knots, double period, std::vector<Vec> values)
    : knots_(std::move(knots)), period_(period), values_(std::move(values)) {
  const std::size_t n = knots_.size();
  if (n < 3 || values_.size() != n) throw DomainError("periodic spline needs >= 3 knots with values");
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double next = i + 1 < n ? knots_[i + 1] : knots_[0] + period_;
    h[i] = next - knots_[i];
    if (!(h[i] > 0.0)) throw DomainError("spline knots must be strictly increasing within one period");
  }
  std::vector<double> sub(n), diag(n), super(n);
  second_.assign(n, Vec());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const std::size_t im = (i + n - 1) % n;
    sub[i] = h[im];
    diag[i] = 2.0 * (h[im] + h[i]);
    super[i] = h[i];
    second_[i] = 6.0 * ((values_[ip] - values_[i]) / h[i] - (values_[i] - values_[im]) / h[im]);
  }
  solve_cyclic_tridiagonal(sub, diag, super, second_);
}

Vec PeriodicSpline::operator()(double s) const {
  const std::size_t n = knots_.size();
  double x = std::fmod(s - knots_[0], period_);
  if (x < 0.0) x += period_;
  x += knots_[0];
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  const std::size_t ip = (i + 1) % n;
  const double next = i + 1 < n ? knots_[i + 1] : knots_[0] + period_;
  const double h = next - knots_[i];
  const double a = (next - x) / h;
  const double b = (x - knots_[i]) / h;
  return a * values_[i] + b * values_[ip] +
         ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[ip]) * (h * h / 6.0);
}

}  // namespace extlab
