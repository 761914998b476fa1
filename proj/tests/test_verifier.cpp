#include <random>

#include "doctest.h"
#include "gaussmink/error.hpp"
#include "gaussmink/gaussian.hpp"
#include "gaussmink/verifier.hpp"
#include "oracles.hpp"

using namespace gaussmink;
using doctest::Approx;

namespace {

constexpr double kTwoPi = 2.0 * oracle::kPi;
const std::vector<double> kTs{1e-3, 5e-4, 2.5e-4};
const std::vector<double> kLambdas{0.0, 0.25, 0.5, 0.75, 1.0};

double segment_mass(Vec2 a, Vec2 b) {
  const double len = norm(b - a);
  return oracle::simpson(
      [&](double s) {
        const Vec2 x = a + (s / len) * (b - a);
        return std::exp(-0.5 * dot(x, x)) / kTwoPi;
      },
      0.0, len, 4000);
}

SupportPolygon half_volume(const SupportPolygon& k) { return k.scaled(volume_scale(k, 0.5)); }

// Symmetric hexagon: facets x = +-1 and four slanted facets with support `far`.
SupportPolygon stretched_hexagon(double far) {
  std::vector<Vec2> n;
  std::vector<double> h;
  for (double deg : {0.0, 80.0, 100.0, 180.0, 260.0, 280.0}) {
    n.push_back(unit_at(deg * oracle::kPi / 180.0));
    h.push_back(deg == 0.0 || deg == 180.0 ? 1.0 : far);
  }
  return wulff_shape(n, h);
}

bool has_flag(const CheckResult& r, const std::string& prefix) {
  for (const auto& f : r.flags) {
    if (f.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("variational formula on a fine disc") {
  const auto disc = regular_polygon(512, 1.0);
  const std::vector<double> one(disc.size(), 1.0);
  const auto r = check_variational_formula(disc, one, 1.0, kTs);
  CHECK(r.passed);
  CHECK(r.worst_violation <= 1e-4);
  const double limit = r.witness["limit"].get<double>();
  CHECK(limit == Approx(std::exp(-0.5)).epsilon(1e-4));
  CHECK(limit == Approx(0.606531).epsilon(1e-4));
  const std::vector<double> t1{1e-4};
  const auto single = check_variational_formula(disc, one, 1.0, t1);
  CHECK(single.witness["fitted_C"].get<double>() * 1e-4 <= 1e-5);
}

TEST_CASE("variational formula in the self direction") {
  std::mt19937_64 rng(4);
  const auto body = random_polygon(rng);
  std::vector<double> h(body.support().begin(), body.support().end());
  const auto s1 = gauss_surface_polygon(body);
  for (double p : {1.0, 1.5, 2.0}) {
    const auto r = check_variational_formula(body, h, p, kTs);
    double expect = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) expect += h[i] * s1.edges[i].mass / p;
    CHECK(r.witness["limit"].get<double>() == Approx(expect).epsilon(1e-12));
    CHECK(r.passed);
  }
}

TEST_CASE("variational formula on the square") {
  const auto sq = box(1.0, 1.0);
  const auto r = check_variational_formula(sq, std::vector<double>(4, 1.0), 1.0, kTs);
  const double oracle_total = 4.0 * segment_mass({1, -1}, {1, 1});
  CHECK(r.witness["limit"].get<double>() == Approx(oracle_total).epsilon(1e-10));
  CHECK(oracle_total == Approx(0.660763).epsilon(1e-6));
  CHECK(r.passed);
}

TEST_CASE("variational formula rejects bad input and skips large t") {
  const auto sq = box(1.0, 1.0);
  CHECK_THROWS_AS(check_variational_formula(sq, std::vector<double>(3, 1.0), 1.0, kTs), Error);
  CHECK_THROWS_AS(check_variational_formula(sq, std::vector<double>(4, -1.0), 1.0, kTs), Error);
  CHECK_THROWS_AS(check_variational_formula(sq, std::vector<double>(4, 1.0), 0.0, kTs), Error);
  // a short facet disappears when its neighbours push out fast
  std::vector<Vec2> n{unit_at(0.0), unit_at(0.05), unit_at(0.1), unit_at(2.0), unit_at(4.0)};
  const auto body = wulff_shape(n, std::vector<double>{1.0, 1.0005, 1.0, 1.0, 1.0});
  REQUIRE(body.size() == 5);
  const std::vector<double> f{4.0, 0.01, 4.0, 1.0, 1.0};
  const std::vector<double> ts{0.5, 1e-4, 5e-5};
  const auto r = check_variational_formula(body, f, 1.0, ts);
  CHECK(has_flag(r, "skipped t=0.5"));
}

TEST_CASE("ehrhard") {
  const auto disc = regular_polygon(256, 1.0);
  const auto sq = box(1.0, 1.0);
  const auto same = check_ehrhard(sq, sq, kLambdas);
  CHECK(same.passed);
  CHECK(std::abs(same.worst_violation) <= 1e-12);
  CHECK(has_flag(same, "equality-case"));

  const std::vector<double> ends{0.0, 1.0};
  const auto e = check_ehrhard(disc, sq, ends);
  CHECK(std::abs(e.worst_violation) <= 1e-12);

  const std::vector<double> half{0.5};
  const auto strict = check_ehrhard(disc, sq, half);
  CHECK(strict.passed);
  CHECK(strict.worst_violation < -1e-6);
  CHECK_FALSE(has_flag(strict, "equality-case"));
  CHECK_THROWS_AS(check_ehrhard(disc, sq, std::vector<double>{1.5}), Error);
}

TEST_CASE("log-concavity") {
  const auto sq = box(0.7, 1.3);
  const auto same = check_log_concavity(sq, sq, kLambdas, 2.0);
  CHECK(std::abs(same.worst_violation) <= 1e-9);

  const auto b08 = regular_polygon(512, 0.8);
  const auto b15 = regular_polygon(512, 1.5);
  const std::vector<double> lam{0.3};
  const auto r = check_log_concavity(b08, b15, lam, 2.0);
  CHECK(r.passed);
  // closed form for discs: the L_2 combination of B_0.8 and B_1.5 is a disc
  const double radius = std::sqrt(0.3 * 1.5 * 1.5 + 0.7 * 0.8 * 0.8);
  const double gap = std::pow(1.0 - std::exp(-1.125), 0.3) * std::pow(1.0 - std::exp(-0.32), 0.7) -
                     (1.0 - std::exp(-0.5 * radius * radius));
  CHECK(gap < -1e-3);
  CHECK(r.worst_violation < 0.0);
  CHECK_THROWS_AS(check_log_concavity(b08, b15, lam, 0.5), Error);
}

TEST_CASE("ehrhard implies log-concavity") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 40; ++i) {
    const auto K = random_polygon(rng);
    const auto L = random_polygon(rng);
    const auto e = check_ehrhard(K, L, kLambdas);
    const auto l = check_log_concavity(K, L, kLambdas, 1.0);
    if (e.passed) CHECK(l.passed);
  }
}

TEST_CASE("mixed-measure inequality") {
  const auto disc = regular_polygon(512, 1.0);
  const auto sq = box(1.0, 1.0);
  const auto same = check_mixed_measure_inequality(sq, sq.scaled(1.7), 1.0);
  CHECK(std::abs(same.worst_violation) <= 1e-12);
  CHECK(has_flag(same, "equality-case"));
  for (double p : {1.0, 2.0}) {
    const auto a = check_mixed_measure_inequality(disc, sq, p);
    const auto b = check_mixed_measure_inequality(sq, disc, p);
    CHECK(a.worst_violation < -1e-4);
    CHECK(b.worst_violation < -1e-4);
  }
  // second-order margin under a small perturbation
  auto perturbed = [&](double eps) {
    std::vector<double> h(disc.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 + eps * std::cos(2.0 * angle_of(disc.normal(i)));
    return wulff_shape(disc.normals(), h);
  };
  const double m1 = check_mixed_measure_inequality(disc, perturbed(1e-2), 1.0).witness["margin"].get<double>();
  const double m2 = check_mixed_measure_inequality(disc, perturbed(2e-2), 1.0).witness["margin"].get<double>();
  CHECK(m1 > 0.0);
  CHECK(m2 / m1 == Approx(4.0).epsilon(0.1));
}

TEST_CASE("isoperimetric bound") {
  const double r2 = std::sqrt(2.0 * std::log(2.0));
  const auto disc = regular_polygon(1024, r2);
  const auto r1 = check_isoperimetric(disc, 1.0);
  CHECK(r1.passed);
  CHECK(r1.witness["total"].get<double>() == Approx(r2 / 2.0).epsilon(1e-5));
  CHECK(r1.witness["total"].get<double>() == Approx(0.588705).epsilon(1e-5));
  const auto rp = check_isoperimetric(disc, 2.0);
  CHECK(rp.witness["total"].get<double>() == Approx(0.5).epsilon(1e-5));
  CHECK(r1.witness["bound"].get<double>() == Approx(gauss_constants(2, 1.0).mass_bound).epsilon(1e-15));

  CHECK_THROWS_AS(check_isoperimetric(wulff_shape(uniform_directions(3), std::vector<double>(3, 1.0)), 1.0), Error);
  CHECK_THROWS_AS(check_isoperimetric(disc, 0.5), Error);
}

TEST_CASE("stretched hexagons stay above the isoperimetric bound") {
  const double a = std_normal_quantile(0.75);
  for (double p : {1.0, 2.0}) {
    const double bound = gauss_constants(2, p).mass_bound;
    // gamma = 1/2 strip |x| <= a: two lines of Gaussian mass e^{-a^2/2}/sqrt(2 pi) each
    const double strip = std::sqrt(2.0 / oracle::kPi) * std::pow(a, 1.0 - p) * std::exp(-0.5 * a * a);
    double last = 0.0;
    for (double far : {2.0, 5.0, 20.0, 100.0, 1000.0}) {
      const auto r = check_isoperimetric(stretched_hexagon(far), p);
      CHECK(r.passed);
      last = r.witness["total"].get<double>();
      CHECK(last >= bound);
    }
    CHECK(last == Approx(strip).epsilon(1e-6));
  }
}

TEST_CASE("ball bound") {
  const double bound = 4.0 * std::pow(2.0, 0.25);
  CHECK(bound == Approx(4.756828).epsilon(1e-6));
  const auto d = check_ball_bound(regular_polygon(512, 1.0));
  CHECK(d.passed);
  CHECK(d.witness["total"].get<double>() == Approx(0.606531).epsilon(1e-4));
  const auto big = check_ball_bound(box(50.0, 50.0));
  CHECK(big.passed);
  CHECK(big.witness["total"].get<double>() < 1e-300);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) CHECK(check_ball_bound(random_polygon(rng)).passed);
}

TEST_CASE("uniqueness on polygons") {
  const auto K = half_volume(box(1.0, 2.0));
  const auto same = check_uniqueness(K, K, 1.0);
  CHECK(same.passed);
  CHECK(same.worst_violation == 0.0);

  // equal constant densities r^{2-p} e^{-r^2/2} on both sides of the peak
  const double p = 1.0;
  const double small = 0.6;
  const double target = small * std::exp(-0.5 * small * small);
  const double large =
      oracle::bisect([&](double r) { return target - r * std::exp(-0.5 * r * r); }, 1.0, 6.0, 200);
  CHECK(large * std::exp(-0.5 * large * large) == Approx(target).epsilon(1e-12));
  const auto skipped = check_uniqueness(regular_polygon(512, small), regular_polygon(512, large), p);
  CHECK(skipped.passed);
  CHECK(has_flag(skipped, "skipped"));

  const auto different = check_uniqueness(K, half_volume(box(1.0, 1.0)), 1.0);
  CHECK(has_flag(different, "premise not met"));
}

TEST_CASE("every witness replays exactly") {
  const auto results = run_suite(99, 6);
  REQUIRE(results.size() == 8);
  for (const auto& r : results) {
    CAPTURE(r.name);
    const auto again = replay_witness(r.witness);
    CHECK(again.worst_violation == r.worst_violation);
    CHECK(again.tolerance_used == r.tolerance_used);
    // witnesses survive a text round trip
    const auto text = replay_witness(Json::parse(r.witness.dump(17)));
    CHECK(text.worst_violation == r.worst_violation);
  }
  CHECK_THROWS_AS(replay_witness(Json{{"check", "nonsense"}}), Error);
  CHECK_THROWS_AS(replay_witness(Json::parse("[1,2]")), Error);
}

TEST_CASE("suite is deterministic and passes") {
  const auto a = run_suite(5, 8);
  const auto b = run_suite(5, 8);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].worst_violation == b[i].worst_violation);
    CHECK(a[i].witness.dump() == b[i].witness.dump());
    CHECK(a[i].passed);
  }
  const auto c = run_suite(6, 8);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].witness.dump() != c[i].witness.dump();
  CHECK(differs);
  const std::string table = format_table(a);
  CHECK(table.find("ehrhard") != std::string::npos);
  CHECK(table.find("PASS") != std::string::npos);
}

TEST_CASE("pass flag is monotone in the tolerance") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto K = random_polygon(rng);
    const auto L = random_polygon(rng);
    for (const auto& r : {check_ehrhard(K, L, kLambdas), check_log_concavity(K, L, kLambdas, 2.0),
                          check_mixed_measure_inequality(K, L, 1.0), check_ball_bound(K)}) {
      CHECK(r.passed == (r.worst_violation <= r.tolerance_used));
      for (double loosen : {1.0, 2.0, 10.0}) {
        if (r.passed) CHECK(r.worst_violation <= r.tolerance_used * loosen);
      }
    }
  }
}
