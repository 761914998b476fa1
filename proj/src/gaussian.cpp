#include "gaussmink/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include "gaussmink/error.hpp"

namespace gaussmink {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrtTwoPi = std::sqrt(kTwoPi);
constexpr double kInvSqrt2 = 0.70710678118654752440;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class Inside>
McEstimate sharded_mc(int dim, std::uint64_t samples, std::uint64_t seed, unsigned shards, Inside inside) {
  if (samples < 10000) throw invalid_argument("Monte Carlo volume needs at least 1e4 samples");
  shards = std::max(1u, shards);
  auto run_shard = [&](unsigned s) {
    std::uint64_t count = samples / shards + (s < samples % shards ? 1 : 0);
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(s)));
    std::normal_distribution<double> normal;
    std::vector<double> x(static_cast<std::size_t>(dim));
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      for (auto& c : x) c = normal(rng);
      if (inside(x)) ++hits;
    }
    return hits;
  };
  std::vector<std::future<std::uint64_t>> futures;
  for (unsigned s = 1; s < shards; ++s) futures.push_back(std::async(std::launch::async, run_shard, s));
  std::uint64_t hits = run_shard(0);
  for (auto& f : futures) hits += f.get();
  McEstimate est;
  est.samples = samples;
  est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(samples));
  return est;
}

}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double std_normal_interval(double a, double b) {
  if (a >= 0.0) return std_normal_sf(a) - std_normal_sf(b);
  if (b <= 0.0) return std_normal_cdf(b) - std_normal_cdf(a);
  return 1.0 - std_normal_sf(b) - std_normal_cdf(a);
}

double std_normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw invalid_argument("std_normal_quantile: argument must lie in (0, 1)");
  if (q == 0.5) return 0.0;
  // Solve Phi(y) = s for y <= 0 in the lower tail, where Phi is accurate.
  const double s = q < 0.5 ? q : 1.0 - q;
  double lo = -40.0, hi = 0.0;
  double y = -1.0;
  for (int it = 0; it < 200; ++it) {
    const double f = std_normal_cdf(y) - s;
    if (f == 0.0) break;
    if (f < 0.0) lo = y; else hi = y;
    const double density = std::exp(-0.5 * y * y) / kSqrtTwoPi;
    double next = y - f / density;
    if (!(next > lo && next < hi) || density == 0.0) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 1e-15 * std::max(1.0, std::abs(y))) {
      y = next;
      break;
    }
    y = next;
  }
  return q < 0.5 ? y : -y;
}

double std_normal_quantile_derivative(double q) {
  const double x = std_normal_quantile(q);
  return kSqrtTwoPi * std::exp(0.5 * x * x);
}

double radial_volume_kernel(double s, int n) {
  if (!(s >= 0.0)) throw invalid_argument("radial_volume_kernel: s must be >= 0");
  if (n < 1) throw invalid_argument("radial_volume_kernel: n must be >= 1");
  if (n == 2) return std::isinf(s) ? 1.0 : -std::expm1(-0.5 * s * s);
  const double half = 0.5 * n;
  const double scale = std::pow(2.0, half - 1.0);
  if (std::isinf(s)) return scale * std::tgamma(half);
  return scale * boost::math::tgamma_lower(half, 0.5 * s * s);
}

double ball_gauss_volume(double r, int n) {
  if (!(r >= 0.0)) throw invalid_argument("ball radius must be >= 0");
  if (n == 2) return -std::expm1(-0.5 * r * r);
  return boost::math::gamma_p(0.5 * n, 0.5 * r * r);
}

double gauss_volume_radial(const std::function<double(double)>& rho, int resolution) {
  if (resolution < 256) throw invalid_argument("gauss_volume: resolution must be >= 256");
  double sum = 0.0;
  for (int k = 0; k < resolution; ++k) {
    const double r = rho(kTwoPi * k / resolution);
    sum += -std::expm1(-0.5 * r * r);
  }
  return sum / resolution;
}

double gauss_volume(const SupportPolygon& body, int resolution) {
  return gauss_volume_radial([&](double t) { return radial_eval(body, unit_at(t)); }, resolution);
}

double gauss_volume(const SupportField& field) {
  // d(phi)/d(theta) = h (h'' + h) / |x|^2 for the boundary point x(theta).
  double sum = 0.0;
  for (std::size_t k = 0; k < field.resolution(); ++k) {
    const double h = field[k];
    const double g = field.d1(k);
    const double r2 = h * h + g * g;
    sum += -std::expm1(-0.5 * r2) * h * field.convexity(k) / r2;
  }
  return sum / static_cast<double>(field.resolution());
}

double gauss_volume_exact(const SupportPolygon& body) {
  double outside = 0.0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const Vec2 n = body.normal(i);
    const double h = body.support(i);
    const double t0 = dot(body.edge_start(i), perp(n));
    const double t1 = dot(body.edge_end(i), perp(n));
    outside += boost::math::owens_t(h, t1 / h) - boost::math::owens_t(h, t0 / h);
  }
  return 1.0 - outside;
}

McEstimate gauss_volume_mc(const SupportPolygon& body, std::uint64_t samples, std::uint64_t seed, unsigned shards) {
  return sharded_mc(2, samples, seed, shards, [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Vec2 n = body.normal(i);
      if (n.x * x[0] + n.y * x[1] > body.support(i)) return false;
    }
    return true;
  });
}

McEstimate gauss_volume_mc(const DirectionGrid& grid, std::span<const double> h, std::uint64_t samples,
                           std::uint64_t seed, unsigned shards) {
  if (h.size() != grid.nodes.size()) throw invalid_argument("gauss_volume_mc: support samples must match grid");
  return sharded_mc(grid.dimension, samples, seed, shards, [&](const std::vector<double>& x) {
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
      double d = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) d += grid.nodes[k][c] * x[c];
      if (d > h[k]) return false;
    }
    return true;
  });
}

double EdgeMeasure::total() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.mass;
  return s;
}

double edge_gauss_mass(const SupportPolygon& body, std::size_t i) {
  const Vec2 n = body.normal(i);
  const double h = body.support(i);
  const double t0 = dot(body.edge_start(i), perp(n));
  const double t1 = dot(body.edge_end(i), perp(n));
  if (!(t1 > t0)) return 0.0;
  return std::exp(-0.5 * h * h) * std_normal_interval(t0, t1) / kSqrtTwoPi;
}

EdgeMeasure gauss_surface_polygon(const SupportPolygon& body) {
  EdgeMeasure m;
  m.p = 1.0;
  m.edges.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) m.edges.push_back({body.normal(i), edge_gauss_mass(body, i)});
  return m;
}

EdgeMeasure lp_gauss_surface_polygon(const SupportPolygon& body, double p) {
  if (!std::isfinite(p)) throw invalid_argument("exponent p must be finite");
  EdgeMeasure m = gauss_surface_polygon(body);
  m.p = p;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const double h = body.support(i);
    if (!(h > 0.0)) throw invalid_argument("L_p surface measure needs positive support numbers");
    m.edges[i].mass *= std::pow(h, 1.0 - p);
  }
  return m;
}

std::vector<double> smooth_lp_density(const SupportField& field, double p) {
  std::vector<double> g(field.resolution());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double h = field[k];
    const double d = field.d1(k);
    g[k] = std::pow(h, 1.0 - p) * std::exp(-0.5 * (d * d + h * h)) * field.convexity(k) / kTwoPi;
  }
  return g;
}

double mass_bound(double r_half, double a_half, double p) {
  return std::sqrt(2.0 / std::numbers::pi) * std::pow(r_half, -p) * a_half * std::exp(-0.5 * a_half * a_half);
}

GaussConstants gauss_constants(int n, double p) {
  if (n < 2) throw invalid_argument("gauss_constants: n must be >= 2");
  if (!std::isfinite(p)) throw invalid_argument("gauss_constants: p must be finite");
  GaussConstants c;
  c.n = n;
  c.p = p;
  c.r_half = n == 2 ? std::sqrt(2.0 * std::numbers::ln2) : std::sqrt(2.0 * boost::math::gamma_p_inv(0.5 * n, 0.5));
  c.a_half = std_normal_quantile(0.75);
  c.mass_bound = mass_bound(c.r_half, c.a_half, p);
  return c;
}

}  // namespace gaussmink

#include <boost/math/tools/roots.hpp>

namespace gaussmink {

double volume_scale(const SupportPolygon& body, double target) {
  if (!(target > 0.0 && target < 1.0)) throw invalid_argument("target Gaussian volume must lie in (0, 1)");
  auto f = [&](double s) { return gauss_volume_exact(body.scaled(s)) - target; };
  double lo = 1.0, hi = 1.0;
  double flo = f(lo), fhi = flo;
  while (flo > 0.0) {
    hi = lo;
    fhi = flo;
    lo *= 0.5;
    flo = f(lo);
  }
  while (fhi < 0.0) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                         boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace gaussmink
