#pragma once

#include <span>
#include <vector>

namespace gaussmink {

/// Periodic tridiagonal matrix: row k is
///   lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1]   (indices mod N).
struct PeriodicTridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  std::size_t size() const { return diag.size(); }
  std::vector<double> multiply(std::span<const double> x) const;
};

/// Thomas elimination with a Sherman-Morrison correction for the two corner
/// entries. O(N), deterministic. Throws Error(NoConvergence) on a vanishing
/// pivot.
std::vector<double> solve_periodic_tridiagonal(const PeriodicTridiagonal& a, std::span<const double> rhs);

}  // namespace gaussmink
