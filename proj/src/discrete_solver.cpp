#include "gaussmink/discrete_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <string>

#include "gaussmink/error.hpp"
#include "gaussmink/gaussian.hpp"

namespace gaussmink {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

class Lagrangian {
 public:
  Lagrangian(const VariationalProblem& prob)
      : prob_(prob), dirs_(prob.mu.directions()), masses_(prob.mu.masses()) {}

  struct Point {
    std::vector<double> h;
    SupportPolygon body;
    double gamma = 0.0;
    std::vector<double> grad_gamma;
    double phi = 0.0;
    std::vector<double> grad_phi;
  };

  Point evaluate(std::vector<double> h) const {
    Point pt{std::move(h), wulff_shape(dirs_, pt.h), 0.0, {}, 0.0, {}};
    pt.gamma = gauss_volume_exact(pt.body);
    pt.grad_gamma = volume_gradient(pt.body, dirs_.size());
    pt.grad_phi.resize(pt.h.size());
    for (std::size_t i = 0; i < pt.h.size(); ++i) {
      pt.phi += masses_[i] * std::pow(pt.h[i], prob_.p);
      pt.grad_phi[i] = prob_.p * masses_[i] * std::pow(pt.h[i], prob_.p - 1.0);
    }
    return pt;
  }

  double value(const Point& pt, double lambda, double rho) const {
    const double c = pt.gamma - prob_.target_volume;
    return pt.phi - lambda * c + 0.5 * rho * c * c;
  }

  std::vector<double> gradient(const Point& pt, double lambda, double rho) const {
    const double eff = lambda - rho * (pt.gamma - prob_.target_volume);
    std::vector<double> g(pt.h.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = pt.grad_phi[i] - eff * pt.grad_gamma[i];
    return g;
  }

  // max_i |dL/dh_i| / (dphi/dh_i) over atoms not held at the lower bound.
  double relative_stationarity(const Point& pt, std::span<const double> g) const {
    double r = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (pt.h[i] <= prob_.h_min && g[i] > 0.0) continue;
      r = std::max(r, std::abs(g[i]) / pt.grad_phi[i]);
    }
    return r;
  }

  std::vector<double> project(std::vector<double> h) const {
    for (auto& x : h) x = std::max(x, prob_.h_min);
    return h;
  }

 private:
  const VariationalProblem& prob_;
  std::vector<Vec2> dirs_;
  std::vector<double> masses_;
};

struct InnerResult {
  Lagrangian::Point point;
  int iterations = 0;
};

InnerResult minimise_inner(const Lagrangian& lag, Lagrangian::Point start, double lambda, double rho, double tol,
                           int max_iters) {
  constexpr int kMemory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr double kNoiseFloor = 1e-7;
  InnerResult res{std::move(start), 0};
  auto& x = res.point;
  double fx = lag.value(x, lambda, rho);
  auto g = lag.gradient(x, lambda, rho);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  const double hmin = *std::min_element(x.h.begin(), x.h.end());
  double alpha = gmax > 0.0 ? 0.05 * hmin / gmax : 1.0;
  std::deque<double> history{fx};

  for (; res.iterations < max_iters; ++res.iterations) {
    const double stat = lag.relative_stationarity(x, g);
    if (stat <= tol) return res;
    const double ref = *std::max_element(history.begin(), history.end());
    bool accepted = false;
    Lagrangian::Point trial;
    std::vector<double> gt;
    double ft = 0.0;
    for (int halving = 0; halving < 60; ++halving, alpha *= 0.5) {
      std::vector<double> h(x.h.size());
      for (std::size_t i = 0; i < h.size(); ++i) h[i] = x.h[i] - alpha * g[i];
      h = lag.project(std::move(h));
      double descent = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) descent += g[i] * (h[i] - x.h[i]);
      if (descent >= 0.0) break;
      trial = lag.evaluate(std::move(h));
      ft = lag.value(trial, lambda, rho);
      if (ft <= ref + kArmijo * descent) {
        accepted = true;
        break;
      }
      // Approximate Wolfe test: relies on the exact gradient once function
      // differences drop to rounding level.
      if (ft <= fx + 1e-12 * std::abs(fx)) {
        gt = lag.gradient(trial, lambda, rho);
        double slope = 0.0;
        for (std::size_t i = 0; i < gt.size(); ++i) slope += gt[i] * (trial.h[i] - x.h[i]);
        if (slope <= (1.0 - 2.0 * kArmijo) * std::abs(descent)) {
          accepted = true;
          break;
        }
      }
      gt.clear();
    }
    if (!accepted) {
      if (stat <= kNoiseFloor) return res;
      throw no_convergence("line search stalled after " + std::to_string(res.iterations) +
                           " inner iterations (relative stationarity " + fmt(stat) + ", multiplier " +
                           fmt(lambda) + ", penalty " + fmt(rho) + ")");
    }
    if (gt.empty()) gt = lag.gradient(trial, lambda, rho);
    std::vector<double> s(g.size()), y(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      s[i] = trial.h[i] - x.h[i];
      y[i] = gt[i] - g[i];
    }
    const double sy = dot(s, y);
    alpha = sy > 0.0 ? dot(s, s) / sy : 4.0 * alpha;
    x = std::move(trial);
    fx = ft;
    g = std::move(gt);
    history.push_back(fx);
    if (static_cast<int>(history.size()) > kMemory) history.pop_front();
  }
  return res;
}

}  // namespace

double phi_objective(std::span<const double> h, const DiscreteMeasure& mu, double p) {
  if (h.size() != mu.size()) throw invalid_argument("phi_objective: support numbers must align with atoms");
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) s += mu.atoms()[i].mass * std::pow(h[i], p);
  return s;
}

std::vector<double> volume_gradient(const SupportPolygon& body) {
  std::vector<double> g(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) g[i] = edge_gauss_mass(body, i);
  return g;
}

std::vector<double> volume_gradient(const SupportPolygon& body, std::size_t count) {
  std::vector<double> g(count, 0.0);
  for (std::size_t i = 0; i < body.size(); ++i) {
    const std::size_t src = body.source_index()[i];
    if (src >= count) throw invalid_argument("volume_gradient: facet source index out of range");
    g[src] = edge_gauss_mass(body, i);
  }
  return g;
}

Multiplier recover_multiplier(const SupportPolygon& body, const DiscreteMeasure& mu, double p) {
  const auto sp = lp_gauss_surface_polygon(body, p);
  std::vector<std::pair<double, double>> pairs;  // (p m_i, S_{p,i})
  for (const auto& atom : mu.atoms()) {
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (norm(body.normal(i) - atom.direction) <= 1e-9) {
        pairs.emplace_back(p * atom.mass, sp.edges[i].mass);
        break;
      }
    }
  }
  double num = 0.0, den = 0.0;
  for (const auto& [pm, s] : pairs) {
    num += pm * s;
    den += s * s;
  }
  if (!(den > 0.0)) throw invalid_argument("recover_multiplier: no atom owns a facet with positive mass");
  Multiplier out;
  out.lambda = num / den;
  out.matched = pairs.size();
  for (const auto& [pm, s] : pairs) out.residual = std::max(out.residual, std::abs(pm - out.lambda * s) / pm);
  return out;
}

SolveReport solve_constrained(const VariationalProblem& prob) {
  const auto& mu = prob.mu;
  if (mu.size() == 0) throw invalid_argument("measure has no atoms");
  if (!(prob.p > 0.0) || !std::isfinite(prob.p)) throw invalid_argument("p must be positive");
  if (!(prob.target_volume > 0.0 && prob.target_volume < 1.0)) {
    throw invalid_argument("target volume must lie in (0, 1)");
  }
  const auto margin = hemisphere_margin(mu);
  if (!(margin.value > 1e-12 * mu.total_mass())) {
    throw infeasible("measure is concentrated on a closed hemisphere: every atom satisfies v.e <= 0 for e=(" +
                     fmt(margin.direction.x) + ", " + fmt(margin.direction.y) +
                     "), so stretching a body along e leaves the objective bounded; minimising sequences are "
                     "unbounded and no minimiser with the volume constraint exists");
  }

  SolveReport report;
  report.p = prob.p;
  const double bound = gauss_constants(2, prob.p).mass_bound;
  std::string cert_reason;
  if (prob.p < 1.0) cert_reason = "p < 1";
  else if (!mu.is_even()) cert_reason = "measure not even";
  else if (!(mu.total_mass() < bound)) cert_reason = "total mass " + fmt(mu.total_mass()) + " >= bound " + fmt(bound);
  if (!cert_reason.empty()) {
    if (prob.require_certificate) throw infeasible("uniqueness certificate unavailable: " + cert_reason);
    report.flags.push_back("no-uniqueness-certificate: " + cert_reason);
  }

  const Lagrangian lag(prob);
  const std::size_t m = mu.size();
  const auto dirs = mu.directions();

  // Feasible start: equal support numbers scaled onto the constraint.
  const std::vector<double> ones(m, 1.0);
  const double c0 = volume_scale(wulff_shape(dirs, ones), prob.target_volume);
  auto point = lag.evaluate(std::vector<double>(m, c0));

  double lambda = dot(point.grad_phi, point.grad_gamma) / dot(point.grad_gamma, point.grad_gamma);
  double rho = lambda / dot(point.grad_gamma, point.grad_gamma);
  const double inner_tol = 0.1 * prob.stationarity_tol;

  std::vector<double> accepted_h = point.h;
  double accepted_phi = point.phi;
  report.objective_trace.push_back(accepted_phi);
  double prev_violation = std::numeric_limits<double>::infinity();
  Multiplier mult = recover_multiplier(point.body, mu, prob.p);

  for (int round = 0; round < prob.max_outer; ++round) {
    auto inner = minimise_inner(lag, std::move(point), lambda, rho, inner_tol, prob.max_inner);
    report.iterations += inner.iterations;
    const double violation = inner.point.gamma - prob.target_volume;

    const double s = volume_scale(inner.point.body, prob.target_volume);
    std::vector<double> feasible = inner.point.h;
    for (auto& x : feasible) x *= s;
    point = lag.evaluate(feasible);
    if (point.phi <= accepted_phi * (1.0 + 1e-14)) {
      accepted_h = point.h;
      accepted_phi = point.phi;
      report.objective_trace.push_back(accepted_phi);
      mult = recover_multiplier(point.body, mu, prob.p);
    }

    lambda -= rho * violation;
    if (std::abs(violation) > 0.25 * std::abs(prev_violation)) rho *= 2.0;
    prev_violation = violation;
    if (std::abs(violation) <= prob.volume_tol && mult.residual <= prob.stationarity_tol) break;
  }

  const auto body = wulff_shape(dirs, accepted_h);
  report.polygon = body;
  report.support_numbers = accepted_h;
  report.objective = accepted_phi;
  report.gauss_volume = gauss_volume_exact(body);
  report.volume_residual = std::abs(report.gauss_volume - prob.target_volume);
  mult = recover_multiplier(body, mu, prob.p);
  report.lambda = mult.lambda;
  report.stationarity_residual = mult.residual;
  if (mult.matched < m) {
    std::vector<bool> owned(m, false);
    for (auto src : body.source_index()) owned[src] = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (!owned[i]) report.flags.push_back("facet-collapse: atom " + std::to_string(i));
    }
  }
  report.converged = report.stationarity_residual <= prob.stationarity_tol && report.volume_residual <= prob.volume_tol;
  if (!report.converged) report.flags.push_back("not-converged");
  return report;
}

}  // namespace gaussmink
