#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaussmink/geometry.hpp"

namespace gaussmink {

struct HomotopyStep {
  double t = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
  double min_convexity = 0.0;
  double gauss_volume = 0.0;
  std::vector<double> newton_residuals;  // infinity norms, first entry before any step
};

/// Outcome of either solver. The discrete path fills `polygon` and
/// `support_numbers`; the smooth path fills `field` and `homotopy_trace`.
struct SolveReport {
  std::optional<SupportPolygon> polygon;
  std::optional<SupportField> field;
  std::vector<double> support_numbers;  // per measure atom, including collapsed ones
  double p = 1.0;
  double lambda = 0.0;
  double volume_residual = 0.0;
  double stationarity_residual = 0.0;
  double gauss_volume = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double start_c0 = 0.0;  // smooth path only
  double start_r0 = 0.0;
  std::vector<double> objective_trace;  // accepted outer iterations
  std::vector<HomotopyStep> homotopy_trace;
  std::vector<std::string> flags;

  bool has_flag(const std::string& prefix) const {
    for (const auto& f : flags) {
      if (f.rfind(prefix, 0) == 0) return true;
    }
    return false;
  }
};

}  // namespace gaussmink
