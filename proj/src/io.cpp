#include "gaussmink/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gaussmink/error.hpp"

namespace gaussmink {

namespace {

std::string fmt9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

Vec2 vec_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw invalid_argument(std::string(what) + " must be a [x, y] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

void require_dimension(const Json& j) {
  if (j.contains("dimension") && j.at("dimension").get<int>() != 2) {
    throw invalid_argument("only dimension 2 is supported");
  }
}

template <typename Fn>
auto parse_guard(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw invalid_argument(std::string("malformed input: ") + e.what());
  }
}

}  // namespace

double sig9(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  return std::stod(fmt9(x));
}

Json body_to_json(const SupportPolygon& body, bool round) {
  auto r = [round](double x) { return round ? sig9(x) : x; };
  Json normals = Json::array(), support = Json::array();
  for (std::size_t i = 0; i < body.size(); ++i) {
    normals.push_back({r(body.normal(i).x), r(body.normal(i).y)});
    support.push_back(r(body.support(i)));
  }
  return {{"dimension", 2}, {"normals", normals}, {"support", support}};
}

SupportPolygon body_from_json(const Json& j) {
  return parse_guard([&] {
    require_dimension(j);
    const auto& jn = j.at("normals");
    const auto& js = j.at("support");
    if (jn.size() != js.size()) throw invalid_argument("normals and support differ in length");
    std::vector<Vec2> normals;
    std::vector<double> h;
    for (const auto& n : jn) {
      Vec2 v = vec_from_json(n, "normal");
      const double len = norm(v);
      if (std::abs(len - 1.0) <= 1e-9) v = (1.0 / len) * v;
      normals.push_back(v);
    }
    for (const auto& s : js) h.push_back(s.get<double>());
    return wulff_shape(normals, h);
  });
}

Json measure_to_json(const DiscreteMeasure& mu, double p) {
  Json atoms = Json::array();
  for (const auto& a : mu.atoms()) {
    atoms.push_back({{"direction", {a.direction.x, a.direction.y}}, {"mass", a.mass}});
  }
  return {{"dimension", 2}, {"p", p}, {"atoms", atoms}};
}

MeasureFile measure_from_json(const Json& j) {
  return parse_guard([&] {
    require_dimension(j);
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
      atoms.push_back({vec_from_json(a.at("direction"), "direction"), a.at("mass").get<double>()});
    }
    return MeasureFile{DiscreteMeasure(std::move(atoms)), j.value("p", 1.0)};
  });
}

Json edge_measure_to_json(const EdgeMeasure& m) {
  Json edges = Json::array();
  for (const auto& e : m.edges) {
    edges.push_back({{"normal", {sig9(e.normal.x), sig9(e.normal.y)}}, {"mass", sig9(e.mass)}});
  }
  return {{"p", m.p}, {"edges", edges}, {"total", sig9(m.total())}};
}

Json density_to_json(std::span<const double> values) {
  return {{"resolution", values.size()}, {"values", std::vector<double>(values.begin(), values.end())}};
}

std::vector<double> density_from_json(const Json& j) {
  return parse_guard([&] {
    auto values = j.at("values").get<std::vector<double>>();
    if (j.contains("resolution") && j.at("resolution").get<std::size_t>() != values.size()) {
      throw invalid_argument("resolution does not match the number of values");
    }
    if (values.empty()) throw invalid_argument("density has no values");
    return values;
  });
}

Json field_to_json(const SupportField& field, bool round) {
  std::vector<double> h(field.values().begin(), field.values().end());
  if (round) {
    for (auto& x : h) x = sig9(x);
  }
  return {{"kind", "support-field"}, {"p", field.p_exponent()}, {"resolution", h.size()}, {"values", h}};
}

Json report_to_json(const SolveReport& r) {
  Json j;
  j["kind"] = r.field ? "smooth" : "discrete";
  j["converged"] = r.converged;
  j["p"] = r.p;
  j["lambda"] = sig9(r.lambda);
  j["gauss_volume"] = sig9(r.gauss_volume);
  j["volume_residual"] = sig9(r.volume_residual);
  j["stationarity_residual"] = sig9(r.stationarity_residual);
  j["objective"] = sig9(r.objective);
  j["iterations"] = r.iterations;
  j["flags"] = r.flags;
  if (r.polygon) j["body"] = body_to_json(*r.polygon, true);
  if (!r.support_numbers.empty()) {
    Json s = Json::array();
    for (double x : r.support_numbers) s.push_back(sig9(x));
    j["support_numbers"] = s;
  }
  if (!r.objective_trace.empty()) {
    Json t = Json::array();
    for (double x : r.objective_trace) t.push_back(sig9(x));
    j["objective_trace"] = t;
  }
  if (r.field) {
    j["residual"] = sig9(r.stationarity_residual);
    j["start"] = {{"c0", sig9(r.start_c0)}, {"r0", sig9(r.start_r0)}};
    j["field"] = field_to_json(*r.field, true);
    Json steps = Json::array();
    for (const auto& s : r.homotopy_trace) {
      steps.push_back({{"t", sig9(s.t)},
                       {"newton_iters", s.newton_iters},
                       {"residual", sig9(s.residual)},
                       {"min_convexity", sig9(s.min_convexity)},
                       {"gauss_volume", sig9(s.gauss_volume)}});
    }
    j["homotopy_trace"] = steps;
  }
  return j;
}

std::string constants_text(const GaussConstants& c) {
  std::ostringstream os;
  os << "n=" << c.n << "\n"
     << "p=" << fmt9(c.p) << "\n"
     << "r_half=" << fmt9(c.r_half) << "\n"
     << "a_half=" << fmt9(c.a_half) << "\n"
     << "mass_bound=" << fmt9(c.mass_bound) << "\n";
  return os.str();
}

std::string boundary_svg(const SupportPolygon& body) {
  constexpr int kSamples = 1024;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-4 -4 8 8\" width=\"512\" height=\"512\">\n"
     << "<g transform=\"scale(1,-1)\">\n"
     << "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#999\" stroke-width=\"0.01\" "
        "stroke-dasharray=\"0.05 0.05\"/>\n"
     << "<polyline fill=\"none\" stroke=\"#036\" stroke-width=\"0.02\" points=\"";
  for (int k = 0; k < kSamples; ++k) {
    const Vec2 u = unit_at(2.0 * std::numbers::pi * k / kSamples);
    const double rho = radial_eval(body, u);
    os << (k ? " " : "") << fmt9(rho * u.x) << "," << fmt9(rho * u.y);
  }
  os << " " << fmt9(radial_eval(body, {1.0, 0.0})) << ",0";
  os << "\"/>\n</g>\n</svg>\n";
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw invalid_argument(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace gaussmink
