#include "gaussmink/gaussmink.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "gaussmink/discrete_solver.hpp"
#include "gaussmink/error.hpp"
#include "gaussmink/gaussian.hpp"
#include "gaussmink/io.hpp"
#include "gaussmink/smooth_solver.hpp"
#include "gaussmink/testcases.hpp"
#include "gaussmink/verifier.hpp"

namespace gm = gaussmink;

struct gm_body {
  gm::SupportPolygon poly;
};
struct gm_measure {
  gm::DiscreteMeasure mu;
};
struct gm_report {
  gm::SolveReport report;
};

namespace {

thread_local std::string last_error;

gm_status fail(gm_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename Fn>
gm_status guard(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return GM_OK;
  } catch (const gm::Error& e) {
    switch (e.kind()) {
      case gm::ErrorKind::InvalidArgument: return fail(GM_INVALID_ARGUMENT, e.what());
      case gm::ErrorKind::Infeasible: return fail(GM_INFEASIBLE, e.what());
      case gm::ErrorKind::NoConvergence: return fail(GM_NO_CONVERGENCE, e.what());
      case gm::ErrorKind::Io: return fail(GM_IO_ERROR, e.what());
    }
    return fail(GM_INTERNAL_ERROR, e.what());
  } catch (const gm::Json::exception& e) {
    return fail(GM_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GM_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(GM_INTERNAL_ERROR, e.what());
  }
}

void require(const void* p, const char* what) {
  if (!p) throw gm::invalid_argument(std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double* dup_doubles(std::span<const double> v) {
  double* out = static_cast<double*>(std::malloc(std::max<std::size_t>(v.size(), 1) * sizeof(double)));
  if (!out) throw std::bad_alloc();
  std::copy(v.begin(), v.end(), out);
  return out;
}

gm::Json check_to_json(const gm::CheckResult& r) {
  return {{"name", r.name},
          {"passed", r.passed},
          {"worst_violation", r.worst_violation},
          {"tolerance_used", r.tolerance_used},
          {"flags", r.flags},
          {"witness", r.witness}};
}

}  // namespace

extern "C" {

const char* gm_last_error(void) { return last_error.c_str(); }

const char* gm_status_name(gm_status status) {
  switch (status) {
    case GM_OK: return "ok";
    case GM_VERIFICATION_FAILED: return "verification failed";
    case GM_INVALID_ARGUMENT: return "invalid argument";
    case GM_NO_CONVERGENCE: return "no convergence";
    case GM_INFEASIBLE: return "infeasible";
    case GM_IO_ERROR: return "i/o error";
    case GM_INTERNAL_ERROR: return "internal error";
  }
  return "unknown";
}

void gm_string_free(char* s) { std::free(s); }
void gm_doubles_free(double* values) { std::free(values); }

gm_status gm_body_create(size_t count, const double* normals_xy, const double* support, gm_body** out) {
  return guard([&] {
    require(out, "out");
    require(normals_xy, "normals");
    require(support, "support");
    std::vector<gm::Vec2> n(count);
    for (size_t i = 0; i < count; ++i) n[i] = {normals_xy[2 * i], normals_xy[2 * i + 1]};
    *out = new gm_body{gm::wulff_shape(n, std::span<const double>(support, count))};
  });
}

gm_status gm_body_from_json(const char* json, gm_body** out) {
  return guard([&] {
    require(json, "json");
    require(out, "out");
    *out = new gm_body{gm::body_from_json(gm::Json::parse(json))};
  });
}

gm_status gm_body_load(const char* path, gm_body** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new gm_body{gm::body_from_json(gm::read_json_file(path))};
  });
}

void gm_body_free(gm_body* body) { delete body; }

size_t gm_body_facet_count(const gm_body* body) { return body ? body->poly.size() : 0; }

gm_status gm_body_facet(const gm_body* body, size_t i, double* nx, double* ny, double* h) {
  return guard([&] {
    require(body, "body");
    if (i >= body->poly.size()) throw gm::invalid_argument("facet index out of range");
    if (nx) *nx = body->poly.normal(i).x;
    if (ny) *ny = body->poly.normal(i).y;
    if (h) *h = body->poly.support(i);
  });
}

gm_status gm_body_to_json(const gm_body* body, char** out) {
  return guard([&] {
    require(body, "body");
    require(out, "out");
    *out = dup_string(gm::body_to_json(body->poly).dump());
  });
}

gm_status gm_body_gauss_volume(const gm_body* body, int resolution, double* out) {
  return guard([&] {
    require(body, "body");
    require(out, "out");
    *out = gm::gauss_volume(body->poly, resolution);
  });
}

gm_status gm_body_gauss_volume_exact(const gm_body* body, double* out) {
  return guard([&] {
    require(body, "body");
    require(out, "out");
    *out = gm::gauss_volume_exact(body->poly);
  });
}

gm_status gm_body_gauss_volume_mc(const gm_body* body, uint64_t samples, uint64_t seed, unsigned shards,
                                  double* estimate, double* std_error) {
  return guard([&] {
    require(body, "body");
    const auto r = gm::gauss_volume_mc(body->poly, samples, seed, shards);
    if (estimate) *estimate = r.estimate;
    if (std_error) *std_error = r.std_error;
  });
}

gm_status gm_body_surface_measure_json(const gm_body* body, double p, char** out) {
  return guard([&] {
    require(body, "body");
    require(out, "out");
    *out = dup_string(gm::edge_measure_to_json(gm::lp_gauss_surface_polygon(body->poly, p)).dump(2) + "\n");
  });
}

gm_status gm_body_svg(const gm_body* body, char** out) {
  return guard([&] {
    require(body, "body");
    require(out, "out");
    *out = dup_string(gm::boundary_svg(body->poly));
  });
}

gm_status gm_measure_create(size_t count, const double* directions_xy, const double* masses, gm_measure** out) {
  return guard([&] {
    require(out, "out");
    require(directions_xy, "directions");
    require(masses, "masses");
    std::vector<gm::Atom> atoms(count);
    for (size_t i = 0; i < count; ++i) atoms[i] = {{directions_xy[2 * i], directions_xy[2 * i + 1]}, masses[i]};
    *out = new gm_measure{gm::DiscreteMeasure(std::move(atoms))};
  });
}

gm_status gm_measure_from_json(const char* json, gm_measure** out, double* p_out) {
  return guard([&] {
    require(json, "json");
    require(out, "out");
    auto file = gm::measure_from_json(gm::Json::parse(json));
    *out = new gm_measure{std::move(file.mu)};
    if (p_out) *p_out = file.p;
  });
}

gm_status gm_measure_load(const char* path, gm_measure** out, double* p_out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    auto file = gm::measure_from_json(gm::read_json_file(path));
    *out = new gm_measure{std::move(file.mu)};
    if (p_out) *p_out = file.p;
  });
}

void gm_measure_free(gm_measure* measure) { delete measure; }
size_t gm_measure_atom_count(const gm_measure* measure) { return measure ? measure->mu.size() : 0; }
double gm_measure_total_mass(const gm_measure* measure) { return measure ? measure->mu.total_mass() : 0.0; }

gm_status gm_measure_hemisphere_margin(const gm_measure* measure, double* out) {
  return guard([&] {
    require(measure, "measure");
    require(out, "out");
    *out = gm::hemisphere_margin(measure->mu).value;
  });
}

void gm_discrete_options_init(gm_discrete_options* opts) {
  if (!opts) return;
  const gm::VariationalProblem d;
  *opts = {d.p, d.target_volume, d.stationarity_tol, d.volume_tol, d.require_certificate ? 1 : 0, d.max_outer};
}

void gm_smooth_options_init(gm_smooth_options* opts) {
  if (!opts) return;
  const gm::HomotopyOptions d;
  *opts = {d.resolution, d.t_step_initial, d.t_step_min, d.newton_tol, d.newton_max_iters, 0.0, 0, 0};
}

gm_status gm_solve_discrete(const gm_measure* measure, const gm_discrete_options* opts, gm_report** out) {
  return guard([&] {
    require(measure, "measure");
    require(out, "out");
    gm_discrete_options o;
    gm_discrete_options_init(&o);
    if (opts) o = *opts;
    gm::VariationalProblem prob{measure->mu, o.p, o.target_volume, o.stationarity_tol, o.volume_tol,
                                o.require_certificate != 0};
    prob.max_outer = o.max_outer;
    *out = new gm_report{gm::solve_constrained(prob)};
  });
}

gm_status gm_solve_smooth(const double* f, size_t count, double p, const gm_smooth_options* opts, gm_report** out) {
  return guard([&] {
    require(f, "f");
    require(out, "out");
    gm_smooth_options o;
    gm_smooth_options_init(&o);
    if (opts) o = *opts;
    gm::HomotopyOptions h;
    h.resolution = o.resolution;
    h.t_step_initial = o.t_step_initial;
    h.t_step_min = o.t_step_min;
    h.newton_tol = o.newton_tol;
    h.newton_max_iters = o.newton_max_iters;
    if (o.start_radius > 0.0) h.start_radius = o.start_radius;
    h.allow_uncertified = o.allow_uncertified != 0;
    h.require_certificate = o.require_certificate != 0;
    *out = new gm_report{gm::solve_homotopy(std::span<const double>(f, count), p, h)};
  });
}

void gm_report_free(gm_report* report) { delete report; }
int gm_report_converged(const gm_report* r) { return r && r->report.converged ? 1 : 0; }
double gm_report_lambda(const gm_report* r) { return r ? r->report.lambda : 0.0; }
double gm_report_volume_residual(const gm_report* r) { return r ? r->report.volume_residual : 0.0; }
double gm_report_stationarity_residual(const gm_report* r) { return r ? r->report.stationarity_residual : 0.0; }
double gm_report_gauss_volume(const gm_report* r) { return r ? r->report.gauss_volume : 0.0; }
size_t gm_report_flag_count(const gm_report* r) { return r ? r->report.flags.size() : 0; }

const char* gm_report_flag(const gm_report* r, size_t i) {
  if (!r || i >= r->report.flags.size()) return nullptr;
  return r->report.flags[i].c_str();
}

gm_status gm_report_body(const gm_report* r, gm_body** out) {
  return guard([&] {
    require(r, "report");
    require(out, "out");
    if (r->report.polygon) {
      *out = new gm_body{*r->report.polygon};
    } else if (r->report.field) {
      *out = new gm_body{gm::field_to_polygon(*r->report.field)};
    } else {
      throw gm::invalid_argument("report holds no body");
    }
  });
}

gm_status gm_report_field(const gm_report* r, double** values, size_t* count) {
  return guard([&] {
    require(r, "report");
    require(values, "values");
    require(count, "count");
    if (!r->report.field) throw gm::invalid_argument("report holds no support field");
    *values = dup_doubles(r->report.field->values());
    *count = r->report.field->resolution();
  });
}

gm_status gm_report_to_json(const gm_report* r, char** out) {
  return guard([&] {
    require(r, "report");
    require(out, "out");
    *out = dup_string(gm::report_to_json(r->report).dump(2) + "\n");
  });
}

gm_status gm_density_load(const char* path, double** values, size_t* count) {
  return guard([&] {
    require(path, "path");
    require(values, "values");
    require(count, "count");
    const auto v = gm::density_from_json(gm::read_json_file(path));
    *values = dup_doubles(v);
    *count = v.size();
  });
}

gm_status gm_density_family(const char* family, int resolution, double p, double amplitude, int frequency,
                            double base_radius, double* out) {
  return guard([&] {
    require(family, "family");
    require(out, "out");
    const std::string name = family;
    std::vector<double> v;
    if (name == "constant") {
      v = gm::cos_density(resolution, p, 0.0, 0, base_radius);
    } else if (name == "cos") {
      v = gm::cos_density(resolution, p, amplitude, frequency, base_radius);
    } else {
      throw gm::invalid_argument("unknown density family '" + name + "' (expected constant or cos)");
    }
    std::copy(v.begin(), v.end(), out);
  });
}

gm_status gm_density_svg(const double* h, size_t count, char** out) {
  return guard([&] {
    require(h, "h");
    require(out, "out");
    const gm::SupportField field(std::vector<double>(h, h + count));
    *out = dup_string(gm::boundary_svg(gm::field_to_polygon(field)));
  });
}

gm_status gm_constants(int n, double p, gm_constants_t* out) {
  return guard([&] {
    require(out, "out");
    const auto c = gm::gauss_constants(n, p);
    *out = {c.n, c.p, c.r_half, c.a_half, c.mass_bound};
  });
}

gm_status gm_constants_text(int n, double p, char** out) {
  return guard([&] {
    require(out, "out");
    *out = dup_string(gm::constants_text(gm::gauss_constants(n, p)));
  });
}

gm_status gm_verify_suite(uint64_t seed, int instances, char** table_out, char** json_out, int* all_passed) {
  return guard([&] {
    const auto results = gm::run_suite(seed, instances);
    bool ok = true;
    gm::Json j = gm::Json::array();
    for (const auto& r : results) {
      ok = ok && r.passed;
      j.push_back(check_to_json(r));
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
    if (table_out) *table_out = dup_string(gm::format_table(results));
    if (json_out) *json_out = dup_string(j.dump(2) + "\n");
  });
}

gm_status gm_verify_witness(const char* witness_json, char** result_json, int* passed) {
  return guard([&] {
    require(witness_json, "witness");
    auto w = gm::Json::parse(witness_json);
    if (w.contains("witness")) w = w.at("witness");
    const auto r = gm::replay_witness(w);
    if (passed) *passed = r.passed ? 1 : 0;
    if (result_json) *result_json = dup_string(check_to_json(r).dump(2) + "\n");
  });
}

void gm_testcase_params_init(gm_testcase_params* params) {
  if (!params) return;
  const gm::TestcaseParams d;
  *params = {d.m, d.mass, d.seed, d.p, d.resolution, d.amplitude, d.frequency, d.base_radius};
}

gm_status gm_generate_testcase(const char* name, const gm_testcase_params* params, char** json_out) {
  return guard([&] {
    require(name, "name");
    require(json_out, "out");
    gm_testcase_params p;
    gm_testcase_params_init(&p);
    if (params) p = *params;
    const gm::TestcaseParams prm{p.m, p.mass, p.seed, p.p, p.resolution, p.amplitude, p.frequency, p.base_radius};
    *json_out = dup_string(gm::generate_testcase(name, prm).dump(2) + "\n");
  });
}

gm_status gm_plot_json(const char* json, char** svg_out) {
  return guard([&] {
    require(json, "json");
    require(svg_out, "out");
    const auto j = gm::Json::parse(json);
    auto field_svg = [](const gm::Json& f) {
      const gm::SupportField field(f.at("values").get<std::vector<double>>());
      return gm::boundary_svg(gm::field_to_polygon(field));
    };
    if (j.contains("normals")) {
      *svg_out = dup_string(gm::boundary_svg(gm::body_from_json(j)));
    } else if (j.contains("field")) {
      *svg_out = dup_string(field_svg(j.at("field")));
    } else if (j.contains("body")) {
      *svg_out = dup_string(gm::boundary_svg(gm::body_from_json(j.at("body"))));
    } else if (j.value("kind", "") == "support-field") {
      *svg_out = dup_string(field_svg(j));
    } else {
      throw gm::invalid_argument("input holds neither a body nor a support field");
    }
  });
}

}  // extern "C"
