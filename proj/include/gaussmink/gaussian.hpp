#pragma once

// Standard Gaussian volume and (L_p-)Gaussian surface area measures of planar
// convex bodies, plus the normal CDF / quantile pair and the reference
// constants r_half, a_half used by the solvability bound.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gaussmink/geometry.hpp"

namespace gaussmink {

/// Phi(x) = P(Z <= x) for a standard normal Z.
double std_normal_cdf(double x);
/// 1 - Phi(x), accurate in the upper tail.
double std_normal_sf(double x);
/// Phi(b) - Phi(a) for a <= b without cancellation in either tail.
double std_normal_interval(double a, double b);
/// Psi = Phi^{-1} on (0, 1).
double std_normal_quantile(double q);
/// Psi'(q) = sqrt(2 pi) exp(Psi(q)^2 / 2).
double std_normal_quantile_derivative(double q);

/// F(s) = int_0^s exp(-r^2/2) r^{n-1} dr; s may be +inf.
double radial_volume_kernel(double s, int n);
/// gamma_n(r B^n).
double ball_gauss_volume(double r, int n);

/// gamma_2(K) by the composite trapezoid rule in polar angle with
/// `resolution` uniform nodes (at least 256).
double gauss_volume(const SupportPolygon& body, int resolution = 4096);
/// Same rule for an arbitrary radial function rho(theta).
double gauss_volume_radial(const std::function<double(double)>& rho, int resolution = 4096);
/// Polar-coordinate volume of a sampled smooth body, using the boundary
/// parametrisation x(theta) = h u + h' u_perp on the field's own grid.
double gauss_volume(const SupportField& field);
/// Closed form: each origin/edge triangle integrates to a difference of
/// Owen's T values, so gamma_2(K) = 1 - sum_i [T(h_i, t1_i/h_i) - T(h_i, t0_i/h_i)].
double gauss_volume_exact(const SupportPolygon& body);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Fraction of standard normal draws landing in the body. Work is split into
/// `shards` independent streams with derived seeds; the result depends only on
/// (seed, samples, shards).
McEstimate gauss_volume_mc(const SupportPolygon& body, std::uint64_t samples, std::uint64_t seed,
                           unsigned shards = 1);
/// n >= 3 bodies known only through support samples h at the grid nodes.
McEstimate gauss_volume_mc(const DirectionGrid& grid, std::span<const double> h, std::uint64_t samples,
                           std::uint64_t seed, unsigned shards = 1);

struct EdgeMass {
  Vec2 normal;
  double mass = 0.0;
};

struct EdgeMeasure {
  double p = 1.0;
  std::vector<EdgeMass> edges;
  double total() const;
};

/// Gaussian mass of one edge: exp(-h^2/2) (Phi(t1) - Phi(t0)) / sqrt(2 pi),
/// with t0 < t1 the signed arclength of the endpoints about the foot of the
/// perpendicular from the origin.
double edge_gauss_mass(const SupportPolygon& body, std::size_t i);

EdgeMeasure gauss_surface_polygon(const SupportPolygon& body);
/// x.nu equals h_i along facet i, so the L_p mass is h_i^{1-p} times the p=1 mass.
EdgeMeasure lp_gauss_surface_polygon(const SupportPolygon& body, double p);

/// Density of S_{p,gamma,K} with respect to arc length on S^1:
/// (1/2pi) h^{1-p} exp(-((Dh)^2 + h^2)/2) (D^2 h + h).
std::vector<double> smooth_lp_density(const SupportField& field, double p);

struct GaussConstants {
  int n = 2;
  double p = 1.0;
  double r_half = 0.0;  // gamma_n(r B) = 1/2
  double a_half = 0.0;  // gamma_n({|x_1| <= a}) = 1/2
  double mass_bound = 0.0;
};

GaussConstants gauss_constants(int n, double p);
/// sqrt(2/pi) r^{-p} a exp(-a^2/2).
double mass_bound(double r_half, double a_half, double p);

}  // namespace gaussmink

namespace gaussmink {

/// s > 0 with gauss_volume_exact(s K) == target, 0 < target < 1.
double volume_scale(const SupportPolygon& body, double target);

}  // namespace gaussmink
