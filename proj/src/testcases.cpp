#include "gaussmink/testcases.hpp"

#include <numbers>
#include <random>

#include "gaussmink/error.hpp"
#include "gaussmink/smooth_solver.hpp"

namespace gaussmink {

std::vector<std::string> testcase_names() {
  return {"uniform-mgon", "square-measure", "cos-density", "random-even", "hemisphere-bad"};
}

Json generate_testcase(const std::string& name, const TestcaseParams& prm) {
  if (name == "uniform-mgon") {
    if (prm.m < 3) throw invalid_argument("uniform-mgon needs m >= 3");
    if (!(prm.mass > 0.0)) throw invalid_argument("mass must be positive");
    std::vector<Atom> atoms;
    for (int i = 0; i < prm.m; ++i) {
      atoms.push_back({unit_at(2.0 * std::numbers::pi * i / prm.m), prm.mass / prm.m});
    }
    return measure_to_json(DiscreteMeasure(std::move(atoms)), prm.p);
  }
  if (name == "square-measure") {
    const auto sq = box(1.0, 1.0);
    const auto K = sq.scaled(volume_scale(sq, 0.5));
    std::vector<Atom> atoms;
    for (const auto& e : lp_gauss_surface_polygon(K, prm.p).edges) atoms.push_back({e.normal, e.mass});
    return measure_to_json(DiscreteMeasure(std::move(atoms)), prm.p);
  }
  if (name == "cos-density") {
    Json j = density_to_json(cos_density(prm.resolution, prm.p, prm.amplitude, prm.frequency, prm.base_radius));
    j["p"] = prm.p;
    return j;
  }
  if (name == "random-even") {
    std::mt19937_64 rng(prm.seed);
    std::uniform_int_distribution<int> pairs(2, 6);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> weight(0.5, 1.5);
    std::uniform_real_distribution<double> total(0.1, 0.25);
    const int k = pairs(rng);
    std::vector<double> a(k), w(k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      a[i] = angle(rng);
      w[i] = weight(rng);
      sum += 2.0 * w[i];
    }
    const double scale = total(rng) / sum;
    std::vector<Atom> atoms;
    for (int i = 0; i < k; ++i) {
      atoms.push_back({unit_at(a[i]), w[i] * scale});
      atoms.push_back({-1.0 * unit_at(a[i]), w[i] * scale});
    }
    return measure_to_json(DiscreteMeasure(std::move(atoms)), prm.p);
  }
  if (name == "hemisphere-bad") {
    std::vector<Atom> atoms;
    for (double deg : {-60.0, 0.0, 60.0}) atoms.push_back({unit_at(deg * std::numbers::pi / 180.0), 0.1});
    return measure_to_json(DiscreteMeasure(std::move(atoms)), prm.p);
  }
  throw invalid_argument("unknown test case '" + name + "'");
}

}  // namespace gaussmink
