#pragma once

// Newton / homotopy solver on S^1 for
//   (1/2pi) h^{1-p} exp(-(h'^2 + h^2)/2) (h'' + h) = f,
// tracking f_t = (1 - t) c0 + t f from the constant solution h = r0 on the
// gamma_2 > 1/2 branch.

#include <optional>
#include <span>
#include <vector>

#include "gaussmink/geometry.hpp"
#include "gaussmink/linalg.hpp"
#include "gaussmink/report.hpp"

namespace gaussmink {

/// (1/2pi) r^{2-p} exp(-r^2/2): the density of S_{p,gamma,B_r}.
double constant_density(double r, double p);

struct ConstantStart {
  double r0 = 0.0;
  double gauss_volume = 0.0;  // gamma_2(B_{r0})
};

/// Largest r0 with constant_density(r0, p) == c0. Throws when c0 is at or
/// above the maximum of the map ("no constant solution") or when the root
/// has gamma_2(B_{r0}) <= 1/2 ("wrong branch").
ConstantStart constant_branch_start(double c0, double p);

struct GuardResult {
  bool invertible = true;
  int colliding_mode = -1;  // k with (2-p) - r0^2 == k^2, or -1
};

/// Invertibility of phi -> phi'' + ((2-p) - r0^2) phi on the modes |k| <= N/2:
/// singular exactly when (2-p) - r0^2 equals some k^2 (within 1e-8).
GuardResult linearized_guard_detail(double r0, double p, int resolution);
inline bool linearized_guard(double r0, double p, int resolution) {
  return linearized_guard_detail(r0, p, resolution).invertible;
}

/// Discrete density for raw samples; no validity checks.
std::vector<double> lp_density_values(std::span<const double> h, double p);

/// G = smooth_lp_density(field, p) - f.
std::vector<double> residual(const SupportField& field, std::span<const double> f, double p);

/// dG/dh; periodic tridiagonal because h, Dh and D^2 h use 3-point stencils.
PeriodicTridiagonal assemble_jacobian(std::span<const double> h, double p);

/// One damped Newton update h <- h - alpha J^{-1} G, alpha halved (at most 20
/// times) until the residual norm drops and the field stays convex.
SupportField newton_step(const SupportField& field, std::span<const double> f, double p);

struct HomotopyOptions {
  int resolution = 512;
  double t_step_initial = 0.25;
  double t_step_min = 1.0 / 4096.0;
  double newton_tol = 1e-11;
  int newton_max_iters = 30;
  /// Start on this constant radius instead of the default; re-chosen (and
  /// flagged) if inadmissible or if the linearisation there is singular.
  std::optional<double> start_radius;
  bool allow_uncertified = false;    // permit 0 < p < 1
  bool require_certificate = false;  // demand even f (uniqueness hypothesis)
};

SolveReport solve_homotopy(std::span<const double> f, double p, const HomotopyOptions& opts = {});

/// Wulff shape of the field's samples on its own grid normals.
SupportPolygon field_to_polygon(const SupportField& field);

/// c (1 + amplitude cos(frequency theta)) with c = constant_density(base_radius, p).
std::vector<double> cos_density(int resolution, double p, double amplitude, int frequency, double base_radius = 2.0);

}  // namespace gaussmink
