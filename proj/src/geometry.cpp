#include "gaussmink/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gaussmink/error.hpp"

namespace gaussmink {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRedundancyTol = 1e-10;

void require_unit(Vec2 v, const char* what) {
  if (!(std::abs(norm(v) - 1.0) <= 1e-9)) {
    throw invalid_argument(std::string(what) + " must be a unit vector");
  }
}

// Counter-clockwise angle from a to b in [0, 2pi).
double ccw_gap(double a, double b) {
  double g = b - a;
  if (g < 0.0) g += kTwoPi;
  return g;
}

Vec2 line_intersection(Vec2 n1, double h1, Vec2 n2, double h2) {
  const double det = cross(n1, n2);
  return {(h1 * n2.y - h2 * n1.y) / det, (n1.x * h2 - n2.x * h1) / det};
}

}  // namespace

double angle_of(Vec2 v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

double sphere_area(int n) {
  const double half = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

DirectionGrid make_direction_grid(int n, int resolution, std::uint64_t seed) {
  if (n < 2) throw invalid_argument("direction grid needs dimension >= 2");
  const int min_resolution = n == 2 ? 4 : 8;
  if (resolution < min_resolution) {
    throw invalid_argument("direction grid resolution " + std::to_string(resolution) + " is below the minimum " +
                           std::to_string(min_resolution));
  }
  DirectionGrid grid;
  grid.dimension = n;
  const auto count = static_cast<std::size_t>(resolution);
  grid.nodes.reserve(count);
  if (n == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(count);
      grid.nodes.push_back({std::cos(t), std::sin(t)});
    }
  } else if (n == 3) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden_angle * static_cast<double>(i);
      grid.nodes.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> x(static_cast<std::size_t>(n));
      double len = 0.0;
      do {
        len = 0.0;
        for (auto& c : x) {
          c = normal(rng);
          len += c * c;
        }
      } while (len < 1e-24);
      len = std::sqrt(len);
      for (auto& c : x) c /= len;
      grid.nodes.push_back(std::move(x));
    }
  }
  grid.weights.assign(count, sphere_area(n) / static_cast<double>(count));
  return grid;
}

SupportPolygon SupportPolygon::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw invalid_argument("scale factor must be positive");
  SupportPolygon out = *this;
  for (auto& h : out.support_) h *= s;
  const std::size_t m = out.size();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = (i + 1) % m;
    out.vertices_[i] = line_intersection(out.normals_[i], out.support_[i], out.normals_[k], out.support_[k]);
  }
  return out;
}

SupportPolygon wulff_shape(std::span<const Vec2> normals, std::span<const double> h) {
  if (normals.size() != h.size()) throw invalid_argument("wulff_shape: normals and support differ in length");
  if (normals.size() < 3) throw invalid_argument("wulff_shape: need at least 3 normals");

  struct Entry {
    double angle;
    Vec2 normal;
    double h;
    std::size_t index;
  };
  std::vector<Entry> entries;
  entries.reserve(normals.size());
  for (std::size_t i = 0; i < normals.size(); ++i) {
    require_unit(normals[i], "wulff_shape normal");
    if (!(h[i] > 0.0) || !std::isfinite(h[i])) {
      throw invalid_argument("wulff_shape: support number " + std::to_string(i) +
                             " must be positive (origin must be interior)");
    }
    const Vec2 n = (1.0 / norm(normals[i])) * normals[i];
    entries.push_back({angle_of(n), n, h[i], i});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.h < b.h;
  });
  // Same direction: the tighter constraint wins.
  std::vector<Entry> unique;
  for (const auto& e : entries) {
    if (!unique.empty() && e.angle - unique.back().angle <= 1e-14) continue;
    unique.push_back(e);
  }
  if (unique.size() > 1 && kTwoPi - unique.back().angle + unique.front().angle <= 1e-14) {
    unique.pop_back();
  }
  const std::size_t m = unique.size();
  if (m < 3) throw invalid_argument("wulff_shape: normals lie in a closed half-plane; intersection is unbounded");
  for (std::size_t i = 0; i < m; ++i) {
    if (ccw_gap(unique[i].angle, unique[(i + 1) % m].angle) >= std::numbers::pi - 1e-12) {
      throw invalid_argument("wulff_shape: normals lie in a closed half-plane; intersection is unbounded");
    }
  }

  std::vector<std::size_t> prev(m), next(m);
  std::vector<bool> alive(m, true);
  for (std::size_t i = 0; i < m; ++i) {
    prev[i] = (i + m - 1) % m;
    next[i] = (i + 1) % m;
  }
  std::size_t alive_count = m;
  std::vector<std::size_t> work(m);
  std::iota(work.rbegin(), work.rend(), 0);
  while (!work.empty() && alive_count > 3) {
    const std::size_t j = work.back();
    work.pop_back();
    if (!alive[j]) continue;
    const std::size_t i = prev[j];
    const std::size_t k = next[j];
    if (ccw_gap(unique[i].angle, unique[k].angle) >= std::numbers::pi - 1e-12) continue;
    const Vec2 v = line_intersection(unique[i].normal, unique[i].h, unique[k].normal, unique[k].h);
    if (dot(unique[j].normal, v) <= unique[j].h + kRedundancyTol) {
      alive[j] = false;
      --alive_count;
      next[i] = k;
      prev[k] = i;
      work.push_back(k);
      work.push_back(i);
    }
  }

  SupportPolygon body;
  for (std::size_t i = 0; i < m; ++i) {
    if (!alive[i]) continue;
    body.normals_.push_back(unique[i].normal);
    body.support_.push_back(unique[i].h);
    body.source_.push_back(unique[i].index);
  }
  const std::size_t r = body.normals_.size();
  body.vertices_.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t k = (i + 1) % r;
    body.vertices_[i] = line_intersection(body.normals_[i], body.support_[i], body.normals_[k], body.support_[k]);
  }
  return body;
}

std::vector<Vec2> uniform_directions(std::size_t n, double phase) {
  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(unit_at(phase + kTwoPi * static_cast<double>(k) / static_cast<double>(n)));
  }
  return out;
}

SupportPolygon regular_polygon(std::size_t m, double apothem, double phase) {
  const auto normals = uniform_directions(m, phase);
  const std::vector<double> h(m, apothem);
  return wulff_shape(normals, h);
}

SupportPolygon box(double a, double b) {
  const std::vector<Vec2> normals = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::vector<double> h = {a, b, a, b};
  return wulff_shape(normals, h);
}

double support_eval(const SupportPolygon& body, Vec2 v) {
  require_unit(v, "support_eval direction");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : body.vertices()) best = std::max(best, dot(v, x));
  return best;
}

RadialHit radial_hit(const SupportPolygon& body, Vec2 u) {
  require_unit(u, "radial_eval direction");
  RadialHit hit{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < body.size(); ++i) {
    const double c = dot(body.normal(i), u);
    if (c <= 0.0) continue;
    const double rho = body.support(i) / c;
    if (rho < hit.rho) hit = {rho, i};
  }
  return hit;
}

SupportPolygon polar_body(const SupportPolygon& body) {
  std::vector<Vec2> normals;
  std::vector<double> h;
  normals.reserve(body.size());
  h.reserve(body.size());
  for (const auto& v : body.vertices()) {
    const double r = norm(v);
    if (!(r > 0.0)) throw invalid_argument("polar_body: origin must be interior");
    normals.push_back((1.0 / r) * v);
    h.push_back(1.0 / r);
  }
  return wulff_shape(normals, h);
}

std::vector<double> lp_combination(std::span<const double> hK, std::span<const double> hL, double a, double b,
                                   double p) {
  if (hK.size() != hL.size()) throw invalid_argument("lp_combination: length mismatch");
  if (!(a >= 0.0) || !(b >= 0.0) || a + b <= 0.0) throw invalid_argument("lp_combination: weights must be >= 0");
  std::vector<double> out(hK.size());
  for (std::size_t i = 0; i < hK.size(); ++i) {
    if (!(hK[i] > 0.0) || !(hL[i] > 0.0)) throw invalid_argument("lp_combination: support values must be positive");
    if (p == 0.0) {
      out[i] = std::pow(hK[i], a) * std::pow(hL[i], b);
    } else {
      out[i] = std::pow(a * std::pow(hK[i], p) + b * std::pow(hL[i], p), 1.0 / p);
    }
  }
  return out;
}

double hausdorff_distance(std::span<const double> hK, std::span<const double> hL) {
  if (hK.size() != hL.size()) throw invalid_argument("hausdorff_distance: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < hK.size(); ++i) d = std::max(d, std::abs(hK[i] - hL[i]));
  return d;
}

double hausdorff_distance(const SupportPolygon& K, const SupportPolygon& L, std::span<const Vec2> directions) {
  double d = 0.0;
  for (const auto& v : directions) d = std::max(d, std::abs(support_eval(K, v) - support_eval(L, v)));
  return d;
}

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw invalid_argument("measure needs at least one atom");
  for (auto& a : atoms_) {
    require_unit(a.direction, "atom direction");
    a.direction = (1.0 / norm(a.direction)) * a.direction;
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw invalid_argument("atom masses must be positive and finite");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
      if (norm(atoms_[i].direction - atoms_[j].direction) <= 1e-12) {
        throw invalid_argument("measure atoms " + std::to_string(i) + " and " + std::to_string(j) +
                               " share a direction");
      }
    }
  }
}

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

std::vector<Vec2> DiscreteMeasure::directions() const {
  std::vector<Vec2> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.direction);
  return out;
}

std::vector<double> DiscreteMeasure::masses() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.mass);
  return out;
}

bool DiscreteMeasure::is_even(double rel_tol) const {
  for (const auto& a : atoms_) {
    const auto it = std::find_if(atoms_.begin(), atoms_.end(), [&](const Atom& b) {
      return norm(a.direction + b.direction) <= 1e-9;
    });
    if (it == atoms_.end()) return false;
    if (std::abs(it->mass - a.mass) > rel_tol * std::max(a.mass, it->mass)) return false;
  }
  return true;
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const {
  if (!(c > 0.0)) throw invalid_argument("measure scale must be positive");
  auto atoms = atoms_;
  for (auto& a : atoms) a.mass *= c;
  return DiscreteMeasure(std::move(atoms));
}

HemisphereMargin hemisphere_margin(const DiscreteMeasure& mu) {
  auto value_at = [&](Vec2 e) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += a.mass * std::max(0.0, dot(e, a.direction));
    return s;
  };
  HemisphereMargin best{std::numeric_limits<double>::infinity(), {1.0, 0.0}};
  for (const auto& a : mu.atoms()) {
    for (const Vec2 e : {perp(a.direction), -1.0 * perp(a.direction)}) {
      const double v = value_at(e);
      if (v < best.value) best = {v, e};
    }
  }
  return best;
}

bool check_hemisphere_condition(const DiscreteMeasure& mu, double epsilon) {
  return hemisphere_margin(mu).value > epsilon;
}

SupportField::SupportField(std::vector<double> h, double p_exponent) : h_(std::move(h)), p_(p_exponent) {
  if (h_.size() < 4) throw invalid_argument("support field needs at least 4 nodes");
  if (auto bad = first_violation(h_)) {
    throw invalid_argument("support field violates positivity/convexity at node " + std::to_string(*bad));
  }
}

double SupportField::d1(std::size_t k) const {
  const std::size_t n = h_.size();
  return (h_[(k + 1) % n] - h_[(k + n - 1) % n]) / (2.0 * step());
}

double SupportField::d2(std::size_t k) const {
  const std::size_t n = h_.size();
  const double dt = step();
  return (h_[(k + 1) % n] - 2.0 * h_[k] + h_[(k + n - 1) % n]) / (dt * dt);
}

double SupportField::min_convexity() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < h_.size(); ++k) m = std::min(m, convexity(k));
  return m;
}

std::optional<std::size_t> SupportField::first_violation(std::span<const double> h) {
  const std::size_t n = h.size();
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(h[k] > 0.0) || !std::isfinite(h[k])) return k;
    const double w = (h[(k + 1) % n] - 2.0 * h[k] + h[(k + n - 1) % n]) / (dt * dt) + h[k];
    if (!(w > 0.0)) return k;
  }
  return std::nullopt;
}

}  // namespace gaussmink
