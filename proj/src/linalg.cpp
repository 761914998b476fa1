#include "gaussmink/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "gaussmink/error.hpp"

namespace gaussmink {

namespace {

// Non-periodic tridiagonal solve; sub[0] and sup[n-1] are ignored.
std::vector<double> thomas(std::span<const double> sub, std::span<const double> d, std::span<const double> sup,
                           std::span<const double> r, double pivot_floor) {
  const std::size_t n = d.size();
  std::vector<double> c(n), x(n);
  double piv = d[0];
  if (std::abs(piv) <= pivot_floor) throw no_convergence("singular periodic tridiagonal system");
  c[0] = sup[0] / piv;
  x[0] = r[0] / piv;
  for (std::size_t k = 1; k < n; ++k) {
    piv = d[k] - sub[k] * c[k - 1];
    if (std::abs(piv) <= pivot_floor) throw no_convergence("singular periodic tridiagonal system");
    c[k] = k + 1 < n ? sup[k] / piv : 0.0;
    x[k] = (r[k] - sub[k] * x[k - 1]) / piv;
  }
  for (std::size_t k = n - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];
  return x;
}

}  // namespace

std::vector<double> PeriodicTridiagonal::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = lower[k] * x[(k + n - 1) % n] + diag[k] * x[k] + upper[k] * x[(k + 1) % n];
  }
  return y;
}

std::vector<double> solve_periodic_tridiagonal(const PeriodicTridiagonal& a, std::span<const double> rhs) {
  const std::size_t n = a.size();
  if (n < 3 || a.lower.size() != n || a.upper.size() != n || rhs.size() != n) {
    throw invalid_argument("periodic tridiagonal solve: inconsistent sizes (need N >= 3)");
  }
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    scale = std::max({scale, std::abs(a.lower[k]), std::abs(a.diag[k]), std::abs(a.upper[k])});
  }
  if (scale == 0.0) throw no_convergence("singular periodic tridiagonal system");
  const double pivot_floor = 1e-13 * scale;

  const double corner_top = a.lower[0];         // A[0][n-1]
  const double corner_bottom = a.upper[n - 1];  // A[n-1][0]
  const double gamma = a.diag[0] == 0.0 ? -scale : -a.diag[0];

  std::vector<double> d = a.diag;
  d[0] -= gamma;
  d[n - 1] -= corner_bottom * corner_top / gamma;

  std::vector<double> x = thomas(a.lower, d, a.upper, rhs, pivot_floor);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner_bottom;
  const std::vector<double> z = thomas(a.lower, d, a.upper, u, pivot_floor);

  const double denom = 1.0 + z[0] + corner_top * z[n - 1] / gamma;
  if (std::abs(denom) <= 1e-14) throw no_convergence("singular periodic tridiagonal system");
  const double factor = (x[0] + corner_top * x[n - 1] / gamma) / denom;
  for (std::size_t k = 0; k < n; ++k) x[k] -= factor * z[k];
  return x;
}

}  // namespace gaussmink
