#pragma once

// Built-in inputs: measures and densities in the file formats of io.hpp.

#include <cstdint>
#include <string>
#include <vector>

#include "gaussmink/io.hpp"

namespace gaussmink {

struct TestcaseParams {
  int m = 8;           // atoms for uniform-mgon
  double mass = 0.3;   // total mass for uniform-mgon
  std::uint64_t seed = 7;
  double p = 1.0;
  int resolution = 512;
  double amplitude = 0.2;
  int frequency = 2;
  double base_radius = 2.0;
};

/// uniform-mgon: m equally spaced atoms sharing `mass`.
/// square-measure: S_{p,gamma} of the square with gamma = 1/2.
/// cos-density: cos_density samples as a density file.
/// random-even: antipodal pairs with random directions and masses.
/// hemisphere-bad: atoms confined to {v.e1 > 0}.
Json generate_testcase(const std::string& name, const TestcaseParams& params);

std::vector<std::string> testcase_names();

}  // namespace gaussmink
