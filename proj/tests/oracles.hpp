#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

// Phi(x) by quadrature of the density from 0.
inline double normal_cdf(double x) { return 0.5 + simpson(normal_pdf, 0.0, x, 20000); }

// Root of a monotone increasing function by bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (a[c][c] == 0.0) throw std::runtime_error("singular");
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Eigenvalues of the circulant matrix with first row `row` (entry (0, j)).
inline std::vector<std::complex<double>> circulant_eigenvalues(const std::vector<double>& row) {
  const std::size_t n = row.size();
  std::vector<std::complex<double>> ev(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * std::polar(1.0, 2.0 * kPi * double(j * k % n) / double(n));
    ev[k] = s;
  }
  return ev;
}

// Spectral first and second derivatives of periodic samples on [0, 2pi).
inline void spectral_derivatives(const std::vector<double>& h, std::vector<double>& d1, std::vector<double>& d2) {
  const std::size_t n = h.size();
  std::vector<std::complex<double>> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += h[j] * std::polar(1.0, -2.0 * kPi * double(j * k % n) / double(n));
    c[k] = s / double(n);
  }
  d1.assign(n, 0.0);
  d2.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double> s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double m = k <= n / 2 ? double(k) : double(k) - double(n);
      const double m1 = (k == n / 2) ? 0.0 : m;  // Nyquist mode has no odd derivative
      const auto e = std::polar(1.0, 2.0 * kPi * double(j * k % n) / double(n));
      s1 += std::complex<double>(0.0, m1) * c[k] * e;
      s2 += -m * m * c[k] * e;
    }
    d1[j] = s1.real();
    d2[j] = s2.real();
  }
}

// min over a fine grid of e of sum m_i (e.v_i)_+.
inline double hemisphere_brute_force(const std::vector<double>& angles, const std::vector<double>& masses,
                                     int grid = 200000) {
  double best = 1e300;
  for (int k = 0; k < grid; ++k) {
    const double t = 2.0 * kPi * k / grid;
    double s = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) s += masses[i] * std::max(0.0, std::cos(t - angles[i]));
    best = std::min(best, s);
  }
  return best;
}

}  // namespace oracle
