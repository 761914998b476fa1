#include "gaussmink/smooth_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "gaussmink/error.hpp"
#include "gaussmink/gaussian.hpp"

namespace gaussmink {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStartRadiusCap = 3.0;

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// Radius where constant_density(., p) peaks (0 when it is monotone).
double density_peak(double p) { return p < 2.0 ? std::sqrt(2.0 - p) : 0.0; }

// Root of constant_density(r, p) = c on (lo, hi) where the map decreases.
double decreasing_root(double c, double p, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (constant_density(mid, p) > c) lo = mid; else hi = mid;
    if (hi - lo <= 1e-16 * hi) break;
  }
  return 0.5 * (lo + hi);
}

struct Start {
  double r0;
  double c0;
};

Start choose_start(std::span<const double> f, double p, const HomotopyOptions& opts, bool certified,
                   std::vector<std::string>& flags) {
  const auto consts = gauss_constants(2, p);
  const double branch_lo = std::max(consts.r_half, density_peak(p));
  double r_min = branch_lo;
  if (certified && kTwoPi * constant_density(branch_lo, p) >= consts.mass_bound) {
    r_min = decreasing_root(consts.mass_bound / kTwoPi, p, branch_lo, 64.0);
  }
  const double r_max = std::max(kStartRadiusCap, r_min + 1.0);
  const int n = opts.resolution;

  auto admissible = [&](double r) {
    if (!(r > r_min * (1.0 + 1e-12)) || !std::isfinite(r)) return false;
    return linearized_guard(r, p, n);
  };
  auto why_not = [&](double r) -> std::string {
    const auto g = linearized_guard_detail(r, p, n);
    if (!g.invertible) {
      return "linearised operator singular at r0=" + fmt(r) + " (mode k=" + std::to_string(g.colliding_mode) + ")";
    }
    return "r0=" + fmt(r) + " is not on the admissible gamma>1/2 branch (needs r0 > " + fmt(r_min) + ")";
  };

  const auto [fmin, fmax] = std::minmax_element(f.begin(), f.end());
  const bool constant_f = *fmax - *fmin <= 1e-14 * *fmax;

  double r = 0.0;
  std::string reason;
  if (opts.start_radius) {
    r = *opts.start_radius;
    if (admissible(r)) return {r, constant_density(r, p)};
    reason = why_not(r);
  } else if (constant_f) {
    try {
      r = constant_branch_start(*fmax, p).r0;
      if (admissible(r)) return {r, *fmax};
      reason = why_not(r);
    } catch (const Error& e) {
      reason = e.what();
    }
  } else {
    r = 0.5 * (r_min + r_max);
    if (admissible(r)) return {r, constant_density(r, p)};
    reason = why_not(r);
  }

  const double inv_golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int j = 1; j <= 256; ++j) {
    const double frac = std::fmod(j * inv_golden, 1.0);
    const double cand = r_min + frac * (r_max - r_min);
    if (admissible(cand)) {
      flags.push_back("c0-rechosen: " + reason + "; using r0=" + fmt(cand) + " c0=" + fmt(constant_density(cand, p)));
      return {cand, constant_density(cand, p)};
    }
  }
  throw infeasible("no admissible constant start found: " + reason);
}

struct NewtonOutcome {
  bool ok = false;
  std::vector<double> h;
  std::vector<double> residuals;
  std::string failure;
};

NewtonOutcome newton_solve(std::vector<double> h, std::span<const double> f, double p, const HomotopyOptions& opts) {
  NewtonOutcome out;
  for (int it = 0;; ++it) {
    auto g = lp_density_values(h, p);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] -= f[k];
    const double r = inf_norm(g);
    out.residuals.push_back(r);
    if (!std::isfinite(r)) {
      out.failure = "non-finite residual";
      return out;
    }
    if (r <= opts.newton_tol) {
      out.ok = true;
      out.h = std::move(h);
      return out;
    }
    if (it >= opts.newton_max_iters) {
      out.failure = "Newton did not reach tolerance in " + std::to_string(opts.newton_max_iters) + " iterations";
      return out;
    }
    try {
      const SupportField next = newton_step(SupportField(h, p), f, p);
      h.assign(next.values().begin(), next.values().end());
    } catch (const Error& e) {
      out.failure = e.what();
      return out;
    }
  }
}

}  // namespace

double constant_density(double r, double p) {
  return std::pow(r, 2.0 - p) * std::exp(-0.5 * r * r) / kTwoPi;
}

ConstantStart constant_branch_start(double c0, double p) {
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw invalid_argument("constant density c0 must be positive");
  if (!std::isfinite(p)) throw invalid_argument("p must be finite");
  double lo = 0.0;
  if (p < 2.0) {
    lo = density_peak(p);
    const double peak = constant_density(lo, p);
    if (c0 >= peak * (1.0 - 1e-12)) {
      throw infeasible("no constant solution: c0=" + fmt(c0) + " is not below the maximum " + fmt(peak) +
                       " of (1/2pi) r^{2-p} e^{-r^2/2}");
    }
  } else if (p == 2.0 && c0 >= 1.0 / kTwoPi) {
    throw infeasible("no constant solution: c0 must be below 1/(2pi) for p=2");
  }
  double hi = std::max(1.0, lo + 1.0);
  while (constant_density(hi, p) > c0) hi *= 2.0;
  if (p > 2.0) {
    lo = hi * 0.5;
    while (lo > 0.0 && constant_density(lo, p) < c0) lo *= 0.5;
  }
  ConstantStart s;
  s.r0 = decreasing_root(c0, p, lo, hi);
  s.gauss_volume = ball_gauss_volume(s.r0, 2);
  if (!(s.gauss_volume > 0.5)) {
    throw infeasible("wrong branch: the constant solution r0=" + fmt(s.r0) + " has gamma_2=" + fmt(s.gauss_volume) +
                     " <= 1/2");
  }
  return s;
}

GuardResult linearized_guard_detail(double r0, double p, int resolution) {
  if (!(r0 > 0.0)) throw invalid_argument("linearized_guard: r0 must be positive");
  const double c = (2.0 - p) - r0 * r0;
  for (int k = 0; k <= resolution / 2; ++k) {
    if (std::abs(c - static_cast<double>(k) * k) <= 1e-8) return {false, k};
  }
  return {true, -1};
}

std::vector<double> lp_density_values(std::span<const double> h, double p) {
  const std::size_t n = h.size();
  const double dt = kTwoPi / static_cast<double>(n);
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double hp = h[(k + 1) % n], hm = h[(k + n - 1) % n];
    const double d1 = (hp - hm) / (2.0 * dt);
    const double w = (hp - 2.0 * h[k] + hm) / (dt * dt) + h[k];
    g[k] = std::pow(h[k], 1.0 - p) * std::exp(-0.5 * (d1 * d1 + h[k] * h[k])) * w / kTwoPi;
  }
  return g;
}

std::vector<double> residual(const SupportField& field, std::span<const double> f, double p) {
  if (f.size() != field.resolution()) throw invalid_argument("residual: f must be sampled on the field grid");
  auto g = smooth_lp_density(field, p);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] -= f[k];
  return g;
}

PeriodicTridiagonal assemble_jacobian(std::span<const double> h, double p) {
  const std::size_t n = h.size();
  const double dt = kTwoPi / static_cast<double>(n);
  const double inv_dt2 = 1.0 / (dt * dt);
  PeriodicTridiagonal j;
  j.lower.resize(n);
  j.diag.resize(n);
  j.upper.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double hp = h[(k + 1) % n], hm = h[(k + n - 1) % n], hk = h[k];
    const double d1 = (hp - hm) / (2.0 * dt);
    const double w = (hp - 2.0 * hk + hm) * inv_dt2 + hk;
    const double a = std::pow(hk, 1.0 - p) * std::exp(-0.5 * (d1 * d1 + hk * hk)) / kTwoPi;
    // G = a(h, Dh) * w;  da/dh = a((1-p)/h - h),  da/d(Dh) = -a Dh.
    j.diag[k] = a * ((1.0 - p) / hk - hk) * w + a * (1.0 - 2.0 * inv_dt2);
    j.upper[k] = -a * d1 * w / (2.0 * dt) + a * inv_dt2;
    j.lower[k] = a * d1 * w / (2.0 * dt) + a * inv_dt2;
  }
  return j;
}

SupportField newton_step(const SupportField& field, std::span<const double> f, double p) {
  const auto g = residual(field, f, p);
  const double r0 = inf_norm(g);
  if (r0 <= 1e-14 * std::max(1.0, inf_norm(f))) return field;
  std::vector<double> delta;
  try {
    delta = solve_periodic_tridiagonal(assemble_jacobian(field.values(), p), g);
  } catch (const Error&) {
    throw no_convergence("singular Newton Jacobian (near an eigenvalue collision); retry with a smaller t-step");
  }
  const auto h = field.values();
  double alpha = 1.0;
  for (int halving = 0; halving <= 20; ++halving, alpha *= 0.5) {
    std::vector<double> cand(h.begin(), h.end());
    for (std::size_t k = 0; k < cand.size(); ++k) cand[k] -= alpha * delta[k];
    if (SupportField::first_violation(cand)) continue;
    auto gc = lp_density_values(cand, p);
    for (std::size_t k = 0; k < gc.size(); ++k) gc[k] -= f[k];
    if (inf_norm(gc) < r0) return SupportField(std::move(cand), field.p_exponent());
  }
  throw no_convergence("damped Newton step failed to reduce the residual after 20 halvings");
}

SupportPolygon field_to_polygon(const SupportField& field) {
  const auto normals = uniform_directions(field.resolution());
  return wulff_shape(normals, field.values());
}

std::vector<double> cos_density(int resolution, double p, double amplitude, int frequency, double base_radius) {
  if (resolution < 4) throw invalid_argument("cos_density: resolution too small");
  if (!(std::abs(amplitude) < 1.0)) throw invalid_argument("cos_density: |amplitude| must be < 1 for positivity");
  const double c = constant_density(base_radius, p);
  std::vector<double> f(static_cast<std::size_t>(resolution));
  for (int k = 0; k < resolution; ++k) {
    f[static_cast<std::size_t>(k)] = c * (1.0 + amplitude * std::cos(frequency * kTwoPi * k / resolution));
  }
  return f;
}

SolveReport solve_homotopy(std::span<const double> f, double p, const HomotopyOptions& opts) {
  const int n = opts.resolution;
  if (n < 64 || n % 2 != 0) throw invalid_argument("homotopy resolution must be even and >= 64");
  if (static_cast<int>(f.size()) != n) throw invalid_argument("density has " + std::to_string(f.size()) +
                                                               " samples, expected " + std::to_string(n));
  if (!(opts.t_step_min > 0.0 && opts.t_step_min <= opts.t_step_initial && opts.t_step_initial <= 1.0)) {
    throw invalid_argument("homotopy steps must satisfy 0 < t_step_min <= t_step_initial <= 1");
  }
  if (!(opts.newton_tol > 0.0)) throw invalid_argument("newton_tol must be positive");
  if (!(p > 0.0) || !std::isfinite(p)) throw invalid_argument("p must be positive");
  for (double v : f) {
    if (!(v > 0.0) || !std::isfinite(v)) throw invalid_argument("density must be positive and finite");
  }

  SolveReport report;
  report.p = p;
  const double dt = kTwoPi / n;
  double l1 = 0.0;
  for (double v : f) l1 += v * dt;
  const bool certified = p >= 1.0;
  if (!certified) {
    if (!opts.allow_uncertified) throw invalid_argument("p < 1 requires allow_uncertified");
    report.flags.push_back("uncertified: p < 1");
  } else {
    const double bound = gauss_constants(2, p).mass_bound;
    if (l1 >= bound) {
      throw infeasible("density mass " + fmt(l1) + " is not below the bound " + fmt(bound) +
                       ": a gamma=1/2 body would need at least that much L_p Gaussian surface area");
    }
  }
  bool even = true;
  for (int k = 0; k < n / 2; ++k) {
    if (std::abs(f[k] - f[k + n / 2]) > 1e-12 * std::max(f[k], f[k + n / 2])) even = false;
  }
  if (!even) {
    if (opts.require_certificate) throw infeasible("density is not even; uniqueness certificate unavailable");
    report.flags.push_back("no-uniqueness-certificate: density not even");
  }

  const Start start = choose_start(f, p, opts, certified, report.flags);
  report.start_r0 = start.r0;
  report.start_c0 = start.c0;

  std::vector<double> h(f.size(), start.r0);
  const auto [fmin, fmax] = std::minmax_element(f.begin(), f.end());
  const bool trivial_path = *fmax - *fmin <= 1e-14 * *fmax && start.c0 == *fmax;
  double t = 0.0;
  double step = trivial_path ? 1.0 : opts.t_step_initial;
  std::vector<double> ft(f.size());
  std::string last_failure;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + step);
    for (std::size_t k = 0; k < f.size(); ++k) ft[k] = (1.0 - t_next) * start.c0 + t_next * f[k];
    NewtonOutcome nw = newton_solve(h, ft, p, opts);
    HomotopyStep rec;
    if (nw.ok) {
      const SupportField field(nw.h, p);
      rec.t = t_next;
      rec.newton_iters = static_cast<int>(nw.residuals.size()) - 1;
      rec.residual = nw.residuals.back();
      rec.min_convexity = field.min_convexity();
      rec.gauss_volume = gauss_volume(field);
      rec.newton_residuals = nw.residuals;
      if (!(rec.gauss_volume > 0.5)) {
        nw.ok = false;
        nw.failure = "path left the gamma>1/2 region (gamma=" + fmt(rec.gauss_volume) + ")";
      }
    }
    if (nw.ok) {
      report.homotopy_trace.push_back(rec);
      report.iterations += rec.newton_iters;
      h = std::move(nw.h);
      t = t_next;
      step = std::min(1.0, 2.0 * step);
      continue;
    }
    last_failure = nw.failure;
    step *= 0.5;
    if (step < opts.t_step_min) {
      std::string trace;
      for (const auto& s : report.homotopy_trace) trace += " t=" + fmt(s.t) + "(res " + fmt(s.residual) + ")";
      throw no_convergence("homotopy stalled at t=" + fmt(t) + ": " + last_failure + "; accepted steps:" +
                           (trace.empty() ? std::string(" none") : trace));
    }
  }

  report.field = SupportField(h, p);
  report.lambda = p;
  report.stationarity_residual = report.homotopy_trace.back().residual;
  report.gauss_volume = report.homotopy_trace.back().gauss_volume;
  report.volume_residual = 0.0;
  report.converged = true;
  return report;
}

}  // namespace gaussmink
