#include "gaussmink/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "gaussmink/discrete_solver.hpp"
#include "gaussmink/error.hpp"
#include "gaussmink/gaussian.hpp"

namespace gaussmink {

namespace {

constexpr double kInequalitySlack = 1e-6;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

Json body_json(const SupportPolygon& b) { return body_to_json(b, false); }

CheckResult start(std::string name, double tol, Json witness) {
  CheckResult r;
  r.name = std::move(name);
  r.tolerance_used = tol;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  r.witness = std::move(witness);
  return r;
}

void finish(CheckResult& r) {
  if (r.worst_violation == -std::numeric_limits<double>::infinity()) r.worst_violation = 0.0;
  r.passed = r.worst_violation <= r.tolerance_used;
}

// Sorted union of both normal sets, dropping near-duplicates.
std::vector<Vec2> union_normals(std::span<const Vec2> a, std::span<const Vec2> b) {
  std::vector<Vec2> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end(), [](Vec2 u, Vec2 v) { return angle_of(u) < angle_of(v); });
  std::vector<Vec2> out;
  for (const Vec2& v : all) {
    if (out.empty() || norm(v - out.back()) > 1e-12) out.push_back(v);
  }
  if (out.size() > 1 && norm(out.front() - out.back()) <= 1e-12) out.pop_back();
  return out;
}

std::vector<double> supports_at(const SupportPolygon& K, std::span<const Vec2> dirs) {
  std::vector<double> h(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) h[i] = support_eval(K, dirs[i]);
  return h;
}

SupportPolygon minkowski_combination(const SupportPolygon& K, const SupportPolygon& L, double lambda,
                                     std::span<const Vec2> dirs) {
  const auto hK = supports_at(K, dirs);
  const auto hL = supports_at(L, dirs);
  std::vector<double> h(dirs.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = lambda * hL[i] + (1.0 - lambda) * hK[i];
  return wulff_shape(dirs, h);
}

// Value at 0 of the interpolating polynomial through (t_i, y_i).
double extrapolate_to_zero(std::vector<double> t, std::vector<double> y) {
  const std::size_t n = t.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      y[i] = (t[i + level] * y[i] - t[i] * y[i + 1]) / (t[i + level] - t[i]);
    }
  }
  return y[0];
}

bool is_origin_symmetric(const SupportPolygon& K) {
  for (std::size_t i = 0; i < K.size(); ++i) {
    const Vec2 opp = -1.0 * K.normal(i);
    bool found = false;
    for (std::size_t j = 0; j < K.size() && !found; ++j) {
      found = norm(K.normal(j) - opp) <= 1e-9 && std::abs(K.support(j) - K.support(i)) <= 1e-9 * K.support(i);
    }
    if (!found) return false;
  }
  return true;
}

double mass_at(const EdgeMeasure& m, Vec2 u) {
  for (const auto& e : m.edges) {
    if (norm(e.normal - u) <= 1e-12) return e.mass;
  }
  return 0.0;
}

std::vector<double> to_vector(const Json& j) { return j.get<std::vector<double>>(); }

std::uint64_t mix_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void absorb(CheckResult& acc, const CheckResult& r) {
  const double margin = r.worst_violation - r.tolerance_used;
  const double acc_margin = acc.worst_violation - acc.tolerance_used;
  if (acc.witness.is_null() || margin > acc_margin) {
    acc.worst_violation = r.worst_violation;
    acc.tolerance_used = r.tolerance_used;
    acc.witness = r.witness;
  }
  for (const auto& f : r.flags) {
    if (acc.flags.size() < 8 && std::find(acc.flags.begin(), acc.flags.end(), f) == acc.flags.end()) {
      acc.flags.push_back(f);
    }
  }
  acc.passed = acc.worst_violation <= acc.tolerance_used;
}

}  // namespace

CheckResult check_variational_formula(const SupportPolygon& body, std::span<const double> f, double p,
                                      std::span<const double> t_values) {
  if (f.size() != body.size()) throw invalid_argument("f must have one value per facet");
  if (p == 0.0 || !std::isfinite(p)) throw invalid_argument("p must be finite and nonzero");
  if (t_values.empty()) throw invalid_argument("no t values");
  for (double v : f) {
    if (!(v > 0.0)) throw invalid_argument("f must be positive");
  }
  auto r = start("variational_formula", 1e-4,
                 {{"check", "variational_formula"},
                  {"body", body_json(body)},
                  {"f", std::vector<double>(f.begin(), f.end())},
                  {"p", p},
                  {"t_values", std::vector<double>(t_values.begin(), t_values.end())}});

  const auto S = lp_gauss_surface_polygon(body, p);
  double limit = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) limit += std::pow(f[i], p) * S.edges[i].mass / p;
  const double g0 = gauss_volume_exact(body);

  std::vector<double> ts, quotients;
  for (double t : t_values) {
    if (!(t > 0.0)) throw invalid_argument("t values must be positive");
    std::vector<double> h(body.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      h[i] = std::pow(std::pow(body.support(i), p) + t * std::pow(f[i], p), 1.0 / p);
    }
    const auto W = wulff_shape(body.normals(), h);
    if (W.size() != body.size()) {
      r.flags.push_back("skipped t=" + fmt(t) + ": facet lost after Wulff reduction");
      continue;
    }
    ts.push_back(t);
    quotients.push_back((gauss_volume_exact(W) - g0) / t);
  }
  if (ts.empty()) {
    r.worst_violation = std::numeric_limits<double>::infinity();
    r.flags.push_back("no usable t value");
  } else {
    double fitted_c = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) fitted_c = std::max(fitted_c, std::abs(quotients[i] - limit) / ts[i]);
    const double extrapolated = extrapolate_to_zero(ts, quotients);
    r.worst_violation = std::abs(extrapolated - limit) / std::abs(limit);
    r.witness["limit"] = limit;
    r.witness["extrapolated"] = extrapolated;
    r.witness["fitted_C"] = fitted_c;
  }
  finish(r);
  return r;
}

CheckResult check_ehrhard(const SupportPolygon& K, const SupportPolygon& L, std::span<const double> lambdas) {
  auto r = start("ehrhard", kInequalitySlack,
                 {{"check", "ehrhard"},
                  {"K", body_json(K)},
                  {"L", body_json(L)},
                  {"lambdas", std::vector<double>(lambdas.begin(), lambdas.end())}});
  const auto dirs = union_normals(K.normals(), L.normals());
  const double psiK = std_normal_quantile(gauss_volume_exact(K));
  const double psiL = std_normal_quantile(gauss_volume_exact(L));
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw invalid_argument("lambda must lie in [0, 1]");
    const auto M = minkowski_combination(K, L, lambda, dirs);
    const double lhs = std_normal_quantile(gauss_volume_exact(M));
    const double rhs = lambda * psiL + (1.0 - lambda) * psiK;
    if (rhs - lhs > r.worst_violation) {
      r.worst_violation = rhs - lhs;
      r.witness["worst_lambda"] = lambda;
    }
  }
  if (hausdorff_distance(supports_at(K, dirs), supports_at(L, dirs)) <= 1e-12) r.flags.push_back("equality-case");
  finish(r);
  return r;
}

CheckResult check_log_concavity(const SupportPolygon& K, const SupportPolygon& L, std::span<const double> lambdas,
                                double p, std::size_t dense) {
  if (!(p >= 1.0)) throw invalid_argument("log-concavity of the L_p combination needs p >= 1");
  const bool lp_form = p != 1.0;
  const double tol = kInequalitySlack + (lp_form ? 4.0 / (static_cast<double>(dense) * dense) : 0.0);
  auto r = start("log_concavity", tol,
                 {{"check", "log_concavity"},
                  {"K", body_json(K)},
                  {"L", body_json(L)},
                  {"lambdas", std::vector<double>(lambdas.begin(), lambdas.end())},
                  {"p", p},
                  {"dense", dense}});
  const auto dirs = union_normals(K.normals(), L.normals());
  const auto fine = lp_form ? union_normals(dirs, uniform_directions(dense, 1e-3)) : dirs;
  const auto hK = supports_at(K, fine);
  const auto hL = supports_at(L, fine);
  const double gK = gauss_volume_exact(K);
  const double gL = gauss_volume_exact(L);
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw invalid_argument("lambda must lie in [0, 1]");
    const double rhs = std::pow(gL, lambda) * std::pow(gK, 1.0 - lambda);
    const double v1 = rhs - gauss_volume_exact(minkowski_combination(K, L, lambda, dirs));
    if (v1 > r.worst_violation) {
      r.worst_violation = v1;
      r.witness["worst_lambda"] = lambda;
      r.witness["worst_form"] = "minkowski";
    }
    if (lp_form) {
      const auto h = lp_combination(hK, hL, 1.0 - lambda, lambda, p);
      const double v2 = rhs - gauss_volume_exact(wulff_shape(fine, h));
      if (v2 > r.worst_violation) {
        r.worst_violation = v2;
        r.witness["worst_lambda"] = lambda;
        r.witness["worst_form"] = "lp";
      }
    }
  }
  finish(r);
  return r;
}

CheckResult check_mixed_measure_inequality(const SupportPolygon& K, const SupportPolygon& L, double p) {
  if (!(p >= 1.0)) throw invalid_argument("mixed-measure inequality needs p >= 1");
  auto r = start("mixed_measure", kInequalitySlack,
                 {{"check", "mixed_measure"}, {"K", body_json(K)}, {"L", body_json(L)}, {"p", p}});
  const auto Ks = K.scaled(volume_scale(K, 0.5));
  const auto Ls = L.scaled(volume_scale(L, 0.5));
  const auto S = lp_gauss_surface_polygon(Ks, p);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < Ks.size(); ++i) {
    lhs += std::pow(support_eval(Ls, Ks.normal(i)), p) * S.edges[i].mass;
    rhs += std::pow(Ks.support(i), p) * S.edges[i].mass;
  }
  r.worst_violation = rhs - lhs;
  r.witness["margin"] = lhs - rhs;
  const auto dirs = union_normals(Ks.normals(), Ls.normals());
  if (hausdorff_distance(supports_at(Ks, dirs), supports_at(Ls, dirs)) <= 1e-9) r.flags.push_back("equality-case");
  finish(r);
  return r;
}

CheckResult check_isoperimetric(const SupportPolygon& K, double p) {
  if (!(p >= 1.0)) throw invalid_argument("isoperimetric bound needs p >= 1");
  if (!is_origin_symmetric(K)) throw invalid_argument("isoperimetric bound needs an origin-symmetric body");
  auto r = start("isoperimetric", kInequalitySlack, {{"check", "isoperimetric"}, {"K", body_json(K)}, {"p", p}});
  const auto Ks = K.scaled(volume_scale(K, 0.5));
  const double total = lp_gauss_surface_polygon(Ks, p).total();
  const double bound = gauss_constants(2, p).mass_bound;
  r.worst_violation = (bound - total) / bound;
  r.witness["total"] = total;
  r.witness["bound"] = bound;
  finish(r);
  return r;
}

CheckResult check_ball_bound(const SupportPolygon& K) {
  auto r = start("ball_bound", 1e-9, {{"check", "ball_bound"}, {"K", body_json(K)}});
  const double total = gauss_surface_polygon(K).total();
  r.worst_violation = total - 4.0 * std::pow(2.0, 0.25);
  r.witness["total"] = total;
  finish(r);
  return r;
}

CheckResult check_uniqueness(const SupportPolygon& K, const SupportPolygon& L, double p, double tol_measure,
                             double tol_body) {
  if (!(p >= 1.0)) throw invalid_argument("uniqueness needs p >= 1");
  auto r = start("uniqueness", tol_body,
                 {{"check", "uniqueness"},
                  {"K", body_json(K)},
                  {"L", body_json(L)},
                  {"p", p},
                  {"tol_measure", tol_measure},
                  {"tol_body", tol_body}});
  const double gK = gauss_volume_exact(K);
  const double gL = gauss_volume_exact(L);
  if (gK < 0.5 - 1e-9 || gL < 0.5 - 1e-9) {
    r.flags.push_back("skipped: gamma below 1/2 (" + fmt(gK) + ", " + fmt(gL) + ")");
    finish(r);
    return r;
  }
  const auto dirs = union_normals(K.normals(), L.normals());
  const auto SK = lp_gauss_surface_polygon(K, p);
  const auto SL = lp_gauss_surface_polygon(L, p);
  double diff = 0.0;
  for (const Vec2& u : dirs) diff = std::max(diff, std::abs(mass_at(SK, u) - mass_at(SL, u)));
  r.witness["measure_difference"] = diff;
  if (diff > tol_measure) {
    r.flags.push_back("premise not met: measures differ by " + fmt(diff));
    finish(r);
    return r;
  }
  const auto probe = union_normals(dirs, uniform_directions(256));
  r.worst_violation = hausdorff_distance(K, L, probe);
  finish(r);
  return r;
}

CheckResult check_uniqueness(const SupportField& K, const SupportField& L, double p, double tol_measure,
                             double tol_body) {
  if (!(p >= 1.0)) throw invalid_argument("uniqueness needs p >= 1");
  if (K.resolution() != L.resolution()) throw invalid_argument("fields must share a grid");
  auto r = start("uniqueness_field", tol_body,
                 {{"check", "uniqueness_field"},
                  {"K", field_to_json(K)},
                  {"L", field_to_json(L)},
                  {"p", p},
                  {"tol_measure", tol_measure},
                  {"tol_body", tol_body}});
  const double gK = gauss_volume(K);
  const double gL = gauss_volume(L);
  if (gK < 0.5 - 1e-9 || gL < 0.5 - 1e-9) {
    r.flags.push_back("skipped: gamma below 1/2 (" + fmt(gK) + ", " + fmt(gL) + ")");
    finish(r);
    return r;
  }
  const auto dK = smooth_lp_density(K, p);
  const auto dL = smooth_lp_density(L, p);
  const double diff = hausdorff_distance(dK, dL);
  r.witness["measure_difference"] = diff;
  if (diff > tol_measure) {
    r.flags.push_back("premise not met: densities differ by " + fmt(diff));
    finish(r);
    return r;
  }
  r.worst_violation = hausdorff_distance(K.values(), L.values());
  finish(r);
  return r;
}

CheckResult replay_witness(const Json& w) {
  try {
    const std::string check = w.at("check").get<std::string>();
    if (check == "variational_formula") {
      return check_variational_formula(body_from_json(w.at("body")), to_vector(w.at("f")), w.at("p").get<double>(),
                                       to_vector(w.at("t_values")));
    }
    if (check == "ehrhard") {
      return check_ehrhard(body_from_json(w.at("K")), body_from_json(w.at("L")), to_vector(w.at("lambdas")));
    }
    if (check == "log_concavity") {
      return check_log_concavity(body_from_json(w.at("K")), body_from_json(w.at("L")), to_vector(w.at("lambdas")),
                                 w.at("p").get<double>(), w.at("dense").get<std::size_t>());
    }
    if (check == "mixed_measure") {
      return check_mixed_measure_inequality(body_from_json(w.at("K")), body_from_json(w.at("L")),
                                            w.at("p").get<double>());
    }
    if (check == "isoperimetric") return check_isoperimetric(body_from_json(w.at("K")), w.at("p").get<double>());
    if (check == "ball_bound") return check_ball_bound(body_from_json(w.at("K")));
    if (check == "uniqueness") {
      return check_uniqueness(body_from_json(w.at("K")), body_from_json(w.at("L")), w.at("p").get<double>(),
                              w.at("tol_measure").get<double>(), w.at("tol_body").get<double>());
    }
    if (check == "uniqueness_field") {
      const double p = w.at("p").get<double>();
      return check_uniqueness(SupportField(to_vector(w.at("K").at("values")), p),
                              SupportField(to_vector(w.at("L").at("values")), p), p,
                              w.at("tol_measure").get<double>(), w.at("tol_body").get<double>());
    }
    throw invalid_argument("unknown check '" + check + "' in witness");
  } catch (const Json::exception& e) {
    throw invalid_argument(std::string("malformed witness: ") + e.what());
  }
}

SupportPolygon random_polygon(std::mt19937_64& rng, int max_facets, double h_lo, double h_hi) {
  if (max_facets < 3) throw invalid_argument("a polygon needs at least 3 facets");
  std::uniform_int_distribution<int> count(3, max_facets);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> support(h_lo, h_hi);
  for (;;) {
    const int m = count(rng);
    std::vector<double> a(m);
    for (auto& x : a) x = angle(rng);
    std::sort(a.begin(), a.end());
    double gap = a.front() + 2.0 * std::numbers::pi - a.back();
    for (int i = 1; i < m; ++i) gap = std::max(gap, a[i] - a[i - 1]);
    if (gap >= std::numbers::pi - 0.2) continue;
    std::vector<Vec2> normals;
    std::vector<double> h;
    for (double x : a) {
      normals.push_back(unit_at(x));
      h.push_back(support(rng));
    }
    return wulff_shape(normals, h);
  }
}

SupportPolygon random_even_polygon(std::mt19937_64& rng, int max_pairs, double h_lo, double h_hi) {
  if (max_pairs < 2) throw invalid_argument("an origin-symmetric polygon needs at least 2 pairs");
  std::uniform_int_distribution<int> count(2, max_pairs);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> support(h_lo, h_hi);
  for (;;) {
    const int m = count(rng);
    std::vector<double> a(m);
    for (auto& x : a) x = angle(rng);
    std::sort(a.begin(), a.end());
    bool separated = true;
    for (int i = 1; i < m; ++i) separated = separated && a[i] - a[i - 1] > 1e-3;
    separated = separated && a.front() + std::numbers::pi - a.back() > 1e-3;
    if (!separated) continue;
    std::vector<Vec2> normals;
    std::vector<double> h;
    for (double x : a) {
      const double s = support(rng);
      normals.push_back(unit_at(x));
      h.push_back(s);
      normals.push_back(-1.0 * unit_at(x));
      h.push_back(s);
    }
    return wulff_shape(normals, h);
  }
}

std::vector<CheckResult> run_suite(std::uint64_t seed, int instances) {
  if (instances < 1) throw invalid_argument("instances must be positive");
  const std::vector<double> lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> ts{1e-3, 5e-4, 2.5e-4};
  const double ps[] = {1.0, 1.5, 2.0};
  std::vector<CheckResult> out;

  auto run = [&](const std::string& name, auto&& one) {
    std::mt19937_64 rng(mix_seed(seed, name));
    CheckResult acc;
    acc.name = name;
    for (int i = 0; i < instances; ++i) absorb(acc, one(rng, i));
    acc.name = name;
    out.push_back(std::move(acc));
  };

  run("variational_formula", [&](std::mt19937_64& rng, int i) {
    const auto K = random_polygon(rng);
    std::uniform_real_distribution<double> fd(0.5, 1.5);
    std::vector<double> f(K.size());
    for (auto& x : f) x = fd(rng);
    return check_variational_formula(K, f, ps[i % 3], ts);
  });
  run("ehrhard", [&](std::mt19937_64& rng, int) {
    const auto K = random_polygon(rng);
    return check_ehrhard(K, random_polygon(rng), lambdas);
  });
  run("log_concavity_p1", [&](std::mt19937_64& rng, int) {
    const auto K = random_polygon(rng);
    return check_log_concavity(K, random_polygon(rng), lambdas, 1.0);
  });
  run("log_concavity_p2", [&](std::mt19937_64& rng, int) {
    const auto K = random_polygon(rng);
    return check_log_concavity(K, random_polygon(rng), lambdas, 2.0);
  });
  run("mixed_measure", [&](std::mt19937_64& rng, int i) {
    const auto K = random_polygon(rng);
    return check_mixed_measure_inequality(K, random_polygon(rng), i % 2 ? 2.0 : 1.0);
  });
  run("isoperimetric", [&](std::mt19937_64& rng, int i) {
    return check_isoperimetric(random_even_polygon(rng), i % 2 ? 2.0 : 1.0);
  });
  run("ball_bound", [&](std::mt19937_64& rng, int) {
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    return check_ball_bound(random_polygon(rng).scaled(scale(rng)));
  });
  run("uniqueness", [&](std::mt19937_64& rng, int i) {
    const double p = i % 2 ? 2.0 : 1.0;
    SupportPolygon K;
    DiscreteMeasure mu;
    do {  // nearly two-atom measures (thin parallelograms) are outside the solver's domain
      K = random_even_polygon(rng);
      K = K.scaled(volume_scale(K, 0.5));
      std::vector<Atom> atoms;
      for (const auto& e : lp_gauss_surface_polygon(K, p).edges) atoms.push_back({e.normal, e.mass});
      mu = DiscreteMeasure(std::move(atoms));
    } while (!check_hemisphere_condition(mu, 1e-3 * mu.total_mass()));
    VariationalProblem prob{std::move(mu), p};
    const auto sol = solve_constrained(prob);
    return check_uniqueness(K, *sol.polygon, p, 1e-6, 1e-5);
  });
  return out;
}

std::string format_table(std::span<const CheckResult> results) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %-5s %-16s %s\n", "check", "pass", "worst_violation", "tolerance");
  os << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-22s %-5s %-16.9g %.9g\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                  r.worst_violation, r.tolerance_used);
    os << line;
  }
  return os.str();
}

}  // namespace gaussmink
