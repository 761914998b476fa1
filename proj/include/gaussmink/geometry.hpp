#pragma once

// Planar convex bodies described by their support numbers, discrete measures
// on the circle, and sampled support functions.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace gaussmink {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_at(double theta) { return {std::cos(theta), std::sin(theta)}; }
// Counter-clockwise tangent.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
// Angle in [0, 2pi).
double angle_of(Vec2 v);

/// Quadrature nodes and equal weights on S^{n-1}.
struct DirectionGrid {
  int dimension = 2;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
};

/// n = 2: `resolution` equally spaced angles starting at 0. n >= 3: a
/// deterministic quasi-uniform set (Fibonacci lattice for n = 3, normalised
/// seeded Gaussian draws otherwise). Weights sum to |S^{n-1}|.
DirectionGrid make_direction_grid(int n, int resolution, std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

/// Surface area of S^{n-1}.
double sphere_area(int n);

/// A convex polygon containing the origin in its interior, stored as
/// (outer normal, support number) pairs in increasing angle order. Every
/// stored facet has positive length. `vertex(i)` is the corner shared by
/// facets i and i+1, so facet i runs from vertex(i-1) to vertex(i).
class SupportPolygon {
 public:
  std::size_t size() const { return normals_.size(); }
  std::span<const Vec2> normals() const { return normals_; }
  std::span<const double> support() const { return support_; }
  std::span<const Vec2> vertices() const { return vertices_; }
  /// Index into the input of wulff_shape that produced facet i.
  std::span<const std::size_t> source_index() const { return source_; }

  Vec2 normal(std::size_t i) const { return normals_[i]; }
  double support(std::size_t i) const { return support_[i]; }
  Vec2 vertex(std::size_t i) const { return vertices_[i]; }
  Vec2 edge_start(std::size_t i) const { return vertices_[(i + size() - 1) % size()]; }
  Vec2 edge_end(std::size_t i) const { return vertices_[i]; }

  /// The dilate s*K (s > 0).
  SupportPolygon scaled(double s) const;

 private:
  friend SupportPolygon wulff_shape(std::span<const Vec2>, std::span<const double>);
  std::vector<Vec2> normals_;
  std::vector<double> support_;
  std::vector<Vec2> vertices_;
  std::vector<std::size_t> source_;
};

/// Intersection of the half-planes {x : x.v_i <= h_i}. Redundant half-planes
/// (those whose line misses the intersection or only touches it at a
/// vertex, tolerance 1e-10) are dropped; among normals with equal angle the
/// smallest support number wins.
SupportPolygon wulff_shape(std::span<const Vec2> normals, std::span<const double> h);

/// Wulff shape on m equally spaced normals starting at angle `phase`.
SupportPolygon regular_polygon(std::size_t m, double apothem, double phase = 0.0);
/// Axis-parallel rectangle [-a, a] x [-b, b].
SupportPolygon box(double a, double b);

double support_eval(const SupportPolygon& body, Vec2 v);

struct RadialHit {
  double rho = 0.0;
  std::size_t facet = 0;  // edge crossed by the ray
};
RadialHit radial_hit(const SupportPolygon& body, Vec2 u);
inline double radial_eval(const SupportPolygon& body, Vec2 u) { return radial_hit(body, u).rho; }

/// K* = {x : x.y <= 1 for all y in K}.
SupportPolygon polar_body(const SupportPolygon& body);

/// Pointwise (a hK^p + b hL^p)^{1/p}, or hK^a hL^b when p == 0. For 0 < p < 1
/// the result need not be a support function; pass it through wulff_shape.
std::vector<double> lp_combination(std::span<const double> hK, std::span<const double> hL, double a, double b,
                                   double p);

/// max_k |hK_k - hL_k| over a common sampling.
double hausdorff_distance(std::span<const double> hK, std::span<const double> hL);

/// Both support functions sampled at `directions`.
double hausdorff_distance(const SupportPolygon& K, const SupportPolygon& L, std::span<const Vec2> directions);

/// Uniform planar directions 2 pi k / n.
std::vector<Vec2> uniform_directions(std::size_t n, double phase = 0.0);

struct Atom {
  Vec2 direction;
  double mass = 0.0;
};

/// Finite sum of point masses on S^1.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  /// Directions are normalised if within 1e-9 of unit length; throws on
  /// non-positive masses, non-unit or repeated directions.
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  int dimension() const { return 2; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const;
  std::vector<Vec2> directions() const;
  std::vector<double> masses() const;
  /// Atoms come in antipodal pairs of equal mass (relative tolerance).
  bool is_even(double rel_tol = 1e-12) const;
  DiscreteMeasure scaled(double c) const;

 private:
  std::vector<Atom> atoms_;
};

struct HemisphereMargin {
  double value = 0.0;  // min_e sum_i m_i (e.v_i)_+
  Vec2 direction;      // minimising e
};

/// Exact minimum over e in S^1 of sum_i m_i (e.v_i)_+. The function is a sum
/// of clipped sinusoids, linear in e between the breakpoints e.v_i = 0, so the
/// minimum sits at a breakpoint.
HemisphereMargin hemisphere_margin(const DiscreteMeasure& mu);

bool check_hemisphere_condition(const DiscreteMeasure& mu, double epsilon);

/// Support function sampled at theta_k = 2 pi k / N.
class SupportField {
 public:
  /// Throws if any h_k <= 0 or (D^2 h + h)_k <= 0; the message names the node.
  SupportField(std::vector<double> h, double p_exponent = 1.0);

  std::size_t resolution() const { return h_.size(); }
  double step() const { return 2.0 * std::numbers::pi / static_cast<double>(h_.size()); }
  double theta(std::size_t k) const { return step() * static_cast<double>(k); }
  std::span<const double> values() const { return h_; }
  double operator[](std::size_t k) const { return h_[k]; }
  double p_exponent() const { return p_; }

  /// Periodic central first difference.
  double d1(std::size_t k) const;
  /// Periodic central second difference.
  double d2(std::size_t k) const;
  /// (D^2 h + h)_k.
  double convexity(std::size_t k) const { return d2(k) + h_[k]; }
  double min_convexity() const;

  /// Index of the first node breaking positivity or the convexity surrogate.
  static std::optional<std::size_t> first_violation(std::span<const double> h);

 private:
  std::vector<double> h_;
  double p_;
};

}  // namespace gaussmink
