#pragma once

// Variational solver for discrete measures: minimise sum_i m_i h_i^p over
// bodies with facet normals among the atoms, subject to gamma_2 = target.
// A minimiser satisfies mu = (lambda/p) S_{p,gamma,K}.

#include <span>
#include <vector>

#include "gaussmink/geometry.hpp"
#include "gaussmink/report.hpp"

namespace gaussmink {

struct VariationalProblem {
  DiscreteMeasure mu;
  double p = 1.0;
  double target_volume = 0.5;
  double stationarity_tol = 1e-6;
  double volume_tol = 1e-10;
  bool require_certificate = false;
  int max_outer = 12;
  int max_inner = 20000;
  double h_min = 1e-6;
};

/// sum_i mass_i h_i^p with h aligned to the atoms.
double phi_objective(std::span<const double> h, const DiscreteMeasure& mu, double p);

/// d gamma_2 / d h_i for every input normal of the Wulff shape that produced
/// `body` (`count` of them): the Gaussian edge mass of the facet, zero when the
/// normal's half-plane is redundant.
std::vector<double> volume_gradient(const SupportPolygon& body, std::size_t count);
/// Per stored facet.
std::vector<double> volume_gradient(const SupportPolygon& body);

struct Multiplier {
  double lambda = 0.0;
  double residual = 0.0;     // max_i |p m_i - lambda S_{p,i}| / (p m_i) over matched atoms
  std::size_t matched = 0;   // atoms that own a facet of the body
};

/// Least-squares lambda in p m_i = lambda S_{p,i} over the atoms owning a facet.
Multiplier recover_multiplier(const SupportPolygon& body, const DiscreteMeasure& mu, double p);

/// Augmented Lagrangian (penalty doubling, <= max_outer rounds) around a
/// projected-gradient inner loop with Barzilai-Borwein steps and backtracking.
/// Each round's iterate is rescaled onto gamma_2 = target before it is
/// accepted, so the accepted objective values never increase.
SolveReport solve_constrained(const VariationalProblem& problem);

}  // namespace gaussmink
