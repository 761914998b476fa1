#include <chrono>
#include <random>

#include "doctest.h"
#include "gaussmink/discrete_solver.hpp"
#include "gaussmink/error.hpp"
#include "gaussmink/gaussian.hpp"
#include "gaussmink/verifier.hpp"
#include "oracles.hpp"

using namespace gaussmink;
using doctest::Approx;

namespace {

constexpr double kTwoPi = 2.0 * oracle::kPi;

DiscreteMeasure measure_of(const EdgeMeasure& s) {
  std::vector<Atom> atoms;
  for (const auto& e : s.edges) atoms.push_back({e.normal, e.mass});
  return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure uniform_measure(int m, double total, double phase = 0.0) {
  std::vector<Atom> atoms;
  for (int i = 0; i < m; ++i) atoms.push_back({unit_at(phase + kTwoPi * i / m), total / m});
  return DiscreteMeasure(std::move(atoms));
}

// gamma of the regular m-gon with apothem a by quadrature of the radial function over one sector
double regular_gamma(int m, double a) {
  const double half = oracle::kPi / m;
  const double sector = oracle::simpson(
      [&](double t) {
        const double rho = a / std::cos(t);
        return 1.0 - std::exp(-0.5 * rho * rho);
      },
      -half, half, 4000);
  return m * sector / kTwoPi;
}

double segment_mass(Vec2 a, Vec2 b) {
  const double len = norm(b - a);
  return oracle::simpson(
      [&](double s) {
        const Vec2 x = a + (s / len) * (b - a);
        return std::exp(-0.5 * dot(x, x)) / kTwoPi;
      },
      0.0, len, 4000);
}

std::vector<double> support_on(const SupportPolygon& body, const DiscreteMeasure& mu) {
  std::vector<double> h;
  for (const auto& a : mu.atoms()) h.push_back(support_eval(body, a.direction));
  return h;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("objective examples") {
  const auto mu = uniform_measure(4, 4.0);
  CHECK(phi_objective(std::vector<double>(4, 1.0), mu, 1.7) == Approx(4.0).epsilon(1e-15));
  const std::vector<double> h{0.3, 0.8, 1.1, 2.0};
  std::vector<double> h2(h);
  for (auto& x : h2) x *= 2.0;
  CHECK(phi_objective(h2, mu, 1.0) == Approx(2.0 * phi_objective(h, mu, 1.0)).epsilon(1e-15));
  CHECK(phi_objective(std::vector<double>{1, 2, 1, 2}, mu, 2.0) == 10.0);
  CHECK_THROWS_AS(phi_objective(std::vector<double>{1, 2, 1}, mu, 2.0), Error);
}

TEST_CASE("volume gradient is the edge mass") {
  const auto sq = box(1.0, 1.0);
  const auto g = volume_gradient(sq);
  const double edge = segment_mass({1, -1}, {1, 1});
  REQUIRE(g.size() == 4);
  for (double v : g) CHECK(std::abs(v - edge) <= 1e-12);
  CHECK(edge == Approx(0.165191).epsilon(1e-6));

  const auto disc = regular_polygon(512, 1.0);
  const auto gd = volume_gradient(disc);
  double sum = 0.0;
  for (double v : gd) sum += v;
  CHECK(sum == Approx(std::exp(-0.5)).epsilon(1e-4));
  CHECK(gd[17] == Approx(std::exp(-0.5) / 512).epsilon(1e-4));
}

TEST_CASE("volume gradient matches finite differences") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const auto body = random_polygon(rng);
    std::vector<Vec2> n(body.normals().begin(), body.normals().end());
    std::vector<double> h(body.support().begin(), body.support().end());
    // one redundant normal far outside
    n.push_back(unit_at(angle_of(n[0]) + 0.01));
    h.push_back(50.0);
    const auto w = wulff_shape(n, h);
    const auto g = volume_gradient(w, n.size());
    REQUIRE(g.size() == n.size());
    CHECK(g.back() == 0.0);
    const double eps = 1e-5;
    for (std::size_t i = 0; i < n.size(); ++i) {
      auto hp = h, hm = h;
      hp[i] += eps;
      hm[i] -= eps;
      const double fd = (gauss_volume_exact(wulff_shape(n, hp)) - gauss_volume_exact(wulff_shape(n, hm))) / (2 * eps);
      CHECK(std::abs(fd - g[i]) <= 1e-6);
    }
  }
}

TEST_CASE("uniform measure gives the regular octagon") {
  const auto mu = uniform_measure(8, 0.3);
  VariationalProblem prob{mu, 1.0};
  const auto rep = solve_constrained(prob);
  REQUIRE(rep.polygon);
  CHECK(rep.converged);
  const double a = oracle::bisect([](double x) { return regular_gamma(8, x) - 0.5; }, 0.1, 3.0, 100);
  for (double h : rep.support_numbers) CHECK(std::abs(h - a) <= 1e-8);
  CHECK(std::abs(gauss_volume_exact(*rep.polygon) - 0.5) <= 1e-8);
  const auto& poly = *rep.polygon;
  const double edge = segment_mass(poly.edge_start(0), poly.edge_end(0));
  CHECK(rep.lambda == Approx(0.3 / 8 / edge).epsilon(1e-6));
}

TEST_CASE("square round trip") {
  const double a = std_normal_quantile(0.5 * (1.0 + std::sqrt(0.5)));
  CHECK(std::pow(2.0 * oracle::normal_cdf(a) - 1.0, 2) == Approx(0.5).epsilon(1e-10));
  const auto sq = box(a, a);
  for (double p : {1.0, 2.0}) {
    const auto mu = measure_of(lp_gauss_surface_polygon(sq, p));
    const auto rep = solve_constrained({mu, p});
    REQUIRE(rep.polygon);
    CHECK(rep.converged);
    const auto dirs = uniform_directions(256);
    CHECK(hausdorff_distance(sq, *rep.polygon, dirs) <= 1e-4);
    CHECK(rep.lambda / p == Approx(1.0).epsilon(1e-3));
    CHECK(rep.stationarity_residual <= 1e-4);
    CHECK(rep.volume_residual <= 1e-8);
  }
}

TEST_CASE("random round trips") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 4; ++rep) {
    const double p = rep % 2 ? 1.5 : 1.0;
    auto body = random_polygon(rng, 9);
    body = body.scaled(volume_scale(body, 0.5));
    const auto mu = measure_of(lp_gauss_surface_polygon(body, p));
    const auto r = solve_constrained({mu, p});
    REQUIRE(r.polygon);
    CHECK(hausdorff_distance(body, *r.polygon, uniform_directions(256)) <= 1e-4);
    CHECK(r.lambda / p == Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("measures on a closed hemisphere are rejected") {
  std::vector<Atom> atoms;
  for (double deg : {-90.0, -40.0, 0.0, 55.0, 90.0}) atoms.push_back({unit_at(deg * oracle::kPi / 180.0), 0.05});
  const std::string msg = error_text([&] { solve_constrained({DiscreteMeasure(atoms), 1.0}); });
  CHECK(msg.find("closed hemisphere") != std::string::npos);
  CHECK(msg.find("unbounded") != std::string::npos);
  try {
    solve_constrained({DiscreteMeasure(atoms), 1.0});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("multiplier recovery") {
  const auto oct = regular_polygon(8, 1.1);
  const auto s = lp_gauss_surface_polygon(oct, 1.0);
  const auto mu = uniform_measure(8, 0.24);
  const auto m = recover_multiplier(oct, mu, 1.0);
  CHECK(m.matched == 8);
  CHECK(m.residual <= 1e-12);
  CHECK(m.lambda == Approx(0.03 / s.edges[0].mass).epsilon(1e-12));

  // exact stationary pair
  std::mt19937_64 rng(8);
  const auto body = random_polygon(rng);
  const auto sp = lp_gauss_surface_polygon(body, 2.0);
  const auto exact = measure_of(sp).scaled(0.7);
  const auto me = recover_multiplier(body, exact, 2.0);
  CHECK(me.residual <= 1e-12);
  CHECK(me.lambda == Approx(2.0 * 0.7).epsilon(1e-12));

  // noisy bodies
  std::vector<double> prev_res;
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> noise(body.size());
  for (auto& x : noise) x = z(rng);
  double last = 0.0;
  for (double amp : {1e-4, 1e-3, 1e-2}) {
    std::vector<double> h(body.support().begin(), body.support().end());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += amp * noise[i];
    const auto pert = wulff_shape(body.normals(), h);
    const double r = recover_multiplier(pert, exact, 2.0).residual;
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("objective trace never increases") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 4; ++rep) {
    const auto body = random_polygon(rng, 10);
    const auto mu = measure_of(lp_gauss_surface_polygon(body, 1.0)).scaled(0.8);
    const auto r = solve_constrained({mu, 1.0});
    REQUIRE_FALSE(r.objective_trace.empty());
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
  }
}

TEST_CASE("scaling the measure scales the multiplier only") {
  std::mt19937_64 rng(41);
  const auto body = random_even_polygon(rng);
  const auto mu = measure_of(lp_gauss_surface_polygon(body, 1.0));
  const auto r1 = solve_constrained({mu, 1.0});
  const auto r3 = solve_constrained({mu.scaled(3.0), 1.0});
  CHECK(hausdorff_distance(*r1.polygon, *r3.polygon, uniform_directions(256)) <= 1e-6);
  CHECK(r3.lambda == Approx(3.0 * r1.lambda).epsilon(1e-6));
}

TEST_CASE("even measures give origin-symmetric bodies") {
  std::mt19937_64 rng(51);
  for (int rep = 0; rep < 3; ++rep) {
    std::uniform_real_distribution<double> u(0.01, 0.06), ang(0.0, oracle::kPi);
    std::vector<Atom> atoms;
    const int pairs = 3 + rep;
    for (int i = 0; i < pairs; ++i) {
      const double t = oracle::kPi * i / pairs + 0.3 * ang(rng) / pairs;
      const double m = u(rng);
      atoms.push_back({unit_at(t), m});
      atoms.push_back({unit_at(t + oracle::kPi), m});
    }
    const DiscreteMeasure mu(atoms);
    const auto r = solve_constrained({mu, 1.0});
    REQUIRE(r.polygon);
    for (int i = 0; i < pairs; ++i) {
      CHECK(std::abs(r.support_numbers[2 * i] - r.support_numbers[2 * i + 1]) <= 1e-8);
    }
  }
}

TEST_CASE("three atoms beat a random search over triangles") {
  const std::vector<double> ang{0.0, 2.0 * oracle::kPi / 3.0 + 0.2, 4.0 * oracle::kPi / 3.0 - 0.1};
  const std::vector<double> mass{0.05, 0.07, 0.06};
  std::vector<Atom> atoms;
  std::vector<Vec2> normals;
  for (int i = 0; i < 3; ++i) {
    atoms.push_back({unit_at(ang[i]), mass[i]});
    normals.push_back(unit_at(ang[i]));
  }
  for (double p : {1.0, 2.0}) {
    const auto r = solve_constrained({DiscreteMeasure(atoms), p});
    const double solver = phi_objective(r.support_numbers, DiscreteMeasure(atoms), p);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    double best = 1e300;
    for (int k = 0; k < 10000; ++k) {
      std::vector<double> h{u(rng), u(rng), u(rng)};
      const auto tri = wulff_shape(normals, h);
      const double s = volume_scale(tri, 0.5);
      for (auto& x : h) x *= s;
      best = std::min(best, phi_objective(h, DiscreteMeasure(atoms), p));
    }
    CHECK(solver <= best * (1.0 + 1e-9));
    CHECK(solver >= best * (1.0 - 1e-2));
  }
}

TEST_CASE("uniqueness certificate flag") {
  // a non-even measure gets the flag and refuses when a certificate is demanded
  std::vector<Atom> atoms;
  for (double deg : {0.0, 100.0, 230.0}) atoms.push_back({unit_at(deg * oracle::kPi / 180.0), 0.05});
  const auto r = solve_constrained({DiscreteMeasure(atoms), 1.0});
  CHECK(r.has_flag("no-uniqueness-certificate"));
  VariationalProblem strict{DiscreteMeasure(atoms), 1.0};
  strict.require_certificate = true;
  CHECK_THROWS_AS(solve_constrained(strict), Error);
}

TEST_CASE("solver input validation") {
  const auto mu = uniform_measure(6, 0.2);
  VariationalProblem bad{mu, -1.0};
  CHECK_THROWS_AS(solve_constrained(bad), Error);
  VariationalProblem bad_target{mu, 1.0, 1.5};
  CHECK_THROWS_AS(solve_constrained(bad_target), Error);
}
