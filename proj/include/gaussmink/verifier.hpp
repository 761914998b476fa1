#pragma once

// Numerical checks of the Gaussian volume inequalities and identities on
// planar polygons. Each check reports its worst instance together with a
// witness that replays to the same worst_violation.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gaussmink/geometry.hpp"
#include "gaussmink/io.hpp"

namespace gaussmink {

struct CheckResult {
  std::string name;
  bool passed = true;  // worst_violation <= tolerance_used
  double worst_violation = 0.0;
  Json witness;
  double tolerance_used = 0.0;
  std::vector<std::string> flags;
};

/// Finite differences of gamma_2 along h_t = (h^p + t f^p)^{1/p} (f given on
/// the body's facet normals), extrapolated to t = 0 and compared with
/// (1/p) sum f_i^p S_{p,i}. Violation is the relative error; tolerance 1e-4.
CheckResult check_variational_formula(const SupportPolygon& body, std::span<const double> f, double p,
                                      std::span<const double> t_values);

/// Psi(gamma(lambda L + (1-lambda) K)) >= lambda Psi(gamma(L)) + (1-lambda) Psi(gamma(K)),
/// with the Minkowski combination formed exactly on the union of normals.
CheckResult check_ehrhard(const SupportPolygon& K, const SupportPolygon& L, std::span<const double> lambdas);

/// gamma(lambda L + (1-lambda) K) >= gamma(L)^lambda gamma(K)^(1-lambda), and the
/// same for the L_p combination when p > 1 (sampled on `dense` extra normals).
CheckResult check_log_concavity(const SupportPolygon& K, const SupportPolygon& L, std::span<const double> lambdas,
                                double p, std::size_t dense = 1024);

/// After scaling both bodies to gamma = 1/2:
/// sum h_L(v_i)^p S_{p,K,i} >= sum h_K(v_i)^p S_{p,K,i} - 1e-6.
CheckResult check_mixed_measure_inequality(const SupportPolygon& K, const SupportPolygon& L, double p);

/// Origin-symmetric K scaled to gamma = 1/2 has |S_{p,K}| >= mass_bound(2, p) (1 - 1e-6).
CheckResult check_isoperimetric(const SupportPolygon& K, double p);

/// |S_{1,K}| <= 4 * 2^{1/4}.
CheckResult check_ball_bound(const SupportPolygon& K);

/// Equal L_p measures (within tol_measure) and gamma >= 1/2 force equal bodies
/// (within tol_body). Skipped with a flag when a body has gamma < 1/2.
CheckResult check_uniqueness(const SupportPolygon& K, const SupportPolygon& L, double p, double tol_measure = 1e-9,
                             double tol_body = 1e-6);
CheckResult check_uniqueness(const SupportField& K, const SupportField& L, double p, double tol_measure = 1e-8,
                             double tol_body = 1e-6);

/// Re-run the check described by a witness.
CheckResult replay_witness(const Json& witness);

/// Convex polygon with 3..max_facets random normals (largest angular gap
/// below pi - 0.2) and support numbers in [h_lo, h_hi].
SupportPolygon random_polygon(std::mt19937_64& rng, int max_facets = 12, double h_lo = 0.5, double h_hi = 2.0);
/// Origin-symmetric variant with 2..max_pairs antipodal pairs.
SupportPolygon random_even_polygon(std::mt19937_64& rng, int max_pairs = 6, double h_lo = 0.5, double h_hi = 2.0);

/// Every check over `instances` random inputs; the stream of each check is
/// derived from (seed, check name).
std::vector<CheckResult> run_suite(std::uint64_t seed, int instances);

/// name, PASS/FAIL, worst_violation, tolerance per line.
std::string format_table(std::span<const CheckResult> results);

}  // namespace gaussmink
