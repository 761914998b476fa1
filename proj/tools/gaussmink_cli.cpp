// gaussmink command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaussmink/gaussmink.h"

namespace {

enum Exit { kSuccess = 0, kVerificationFailed = 1, kInvalid = 2, kNoConvergence = 3 };

struct Config {
  std::string input;
  std::string output;
  double p = 1.0;
  int resolution = 512;
  std::uint64_t seed = 7;
  double tol = -1.0;  // < 0: command default
  std::string family = "cos";
  double amplitude = 0.2;
  int frequency = 2;
  int n = 2;
  double base_radius = 2.0;
  double start_radius = 0.0;
  int instances = 100;
  std::string name;
  int m = 8;
  double mass = 0.3;
  bool require_certificate = false;
  bool allow_uncertified = false;
  bool p_given = false;
};

int exit_code(gm_status s) {
  switch (s) {
    case GM_OK: return kSuccess;
    case GM_VERIFICATION_FAILED: return kVerificationFailed;
    case GM_NO_CONVERGENCE: return kNoConvergence;
    default: return kInvalid;
  }
}

int report_error(gm_status s) {
  std::cerr << "error (" << gm_status_name(s) << "): " << gm_last_error() << "\n";
  return exit_code(s);
}

struct StringDeleter {
  void operator()(char* s) const { gm_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

// Writes to --output, or stdout when none was given.
int emit(const Config& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return kSuccess;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << cfg.output << "\n";
    return kInvalid;
  }
  return kSuccess;
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  ok = static_cast<bool>(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_constants(const Config& cfg) {
  char* text = nullptr;
  if (gm_status s = gm_constants_text(cfg.n, cfg.p, &text); s != GM_OK) return report_error(s);
  OwnedString owned(text);
  return emit(cfg, text);
}

int run_measure(const Config& cfg) {
  gm_body* body = nullptr;
  if (gm_status s = gm_body_load(cfg.input.c_str(), &body); s != GM_OK) return report_error(s);
  std::unique_ptr<gm_body, decltype(&gm_body_free)> owned(body, gm_body_free);
  char* json = nullptr;
  if (gm_status s = gm_body_surface_measure_json(body, cfg.p, &json); s != GM_OK) return report_error(s);
  OwnedString text(json);
  return emit(cfg, json);
}

int finish_report(const Config& cfg, gm_report* report) {
  std::unique_ptr<gm_report, decltype(&gm_report_free)> owned(report, gm_report_free);
  char* json = nullptr;
  if (gm_status s = gm_report_to_json(report, &json); s != GM_OK) return report_error(s);
  OwnedString text(json);
  if (int rc = emit(cfg, json); rc != kSuccess) return rc;
  for (std::size_t i = 0; i < gm_report_flag_count(report); ++i) {
    std::cerr << "note: " << gm_report_flag(report, i) << "\n";
  }
  if (!gm_report_converged(report)) {
    std::cerr << "error: solver did not reach the requested tolerances\n";
    return kNoConvergence;
  }
  return kSuccess;
}

int run_solve_discrete(const Config& cfg) {
  gm_measure* mu = nullptr;
  double file_p = 1.0;
  if (gm_status s = gm_measure_load(cfg.input.c_str(), &mu, &file_p); s != GM_OK) return report_error(s);
  std::unique_ptr<gm_measure, decltype(&gm_measure_free)> owned(mu, gm_measure_free);
  gm_discrete_options opts;
  gm_discrete_options_init(&opts);
  opts.p = cfg.p_given ? cfg.p : file_p;
  if (cfg.tol > 0.0) opts.stationarity_tol = cfg.tol;
  opts.require_certificate = cfg.require_certificate ? 1 : 0;
  gm_report* report = nullptr;
  if (gm_status s = gm_solve_discrete(mu, &opts, &report); s != GM_OK) return report_error(s);
  return finish_report(cfg, report);
}

int run_solve_smooth(const Config& cfg) {
  std::vector<double> f;
  if (!cfg.input.empty()) {
    double* values = nullptr;
    std::size_t count = 0;
    if (gm_status s = gm_density_load(cfg.input.c_str(), &values, &count); s != GM_OK) return report_error(s);
    f.assign(values, values + count);
    gm_doubles_free(values);
  } else {
    f.resize(static_cast<std::size_t>(cfg.resolution));
    if (gm_status s = gm_density_family(cfg.family.c_str(), cfg.resolution, cfg.p, cfg.amplitude, cfg.frequency,
                                        cfg.base_radius, f.data());
        s != GM_OK) {
      return report_error(s);
    }
  }
  gm_smooth_options opts;
  gm_smooth_options_init(&opts);
  opts.resolution = static_cast<int>(f.size());
  if (cfg.tol > 0.0) opts.newton_tol = cfg.tol;
  opts.start_radius = cfg.start_radius;
  opts.allow_uncertified = cfg.allow_uncertified ? 1 : 0;
  opts.require_certificate = cfg.require_certificate ? 1 : 0;
  gm_report* report = nullptr;
  if (gm_status s = gm_solve_smooth(f.data(), f.size(), cfg.p, &opts, &report); s != GM_OK) return report_error(s);
  return finish_report(cfg, report);
}

int run_verify(const Config& cfg) {
  if (!cfg.input.empty()) {
    bool ok = false;
    const std::string witness = read_file(cfg.input, ok);
    if (!ok) {
      std::cerr << "error: cannot read " << cfg.input << "\n";
      return kInvalid;
    }
    char* json = nullptr;
    int passed = 0;
    if (gm_status s = gm_verify_witness(witness.c_str(), &json, &passed); s != GM_OK) return report_error(s);
    OwnedString text(json);
    if (int rc = emit(cfg, json); rc != kSuccess) return rc;
    return passed ? kSuccess : kVerificationFailed;
  }
  char* table = nullptr;
  char* json = nullptr;
  int passed = 0;
  if (gm_status s = gm_verify_suite(cfg.seed, cfg.instances, &table, cfg.output.empty() ? nullptr : &json, &passed);
      s != GM_OK) {
    return report_error(s);
  }
  OwnedString owned_table(table), owned_json(json);
  std::cout << table;
  if (json) {
    Config to_file = cfg;
    if (int rc = emit(to_file, json); rc != kSuccess) return rc;
  }
  return passed ? kSuccess : kVerificationFailed;
}

int run_plot(const Config& cfg) {
  bool ok = false;
  const std::string input = read_file(cfg.input, ok);
  if (!ok) {
    std::cerr << "error: cannot read " << cfg.input << "\n";
    return kInvalid;
  }
  char* svg = nullptr;
  if (gm_status s = gm_plot_json(input.c_str(), &svg); s != GM_OK) return report_error(s);
  OwnedString owned(svg);
  return emit(cfg, svg);
}

int run_generate(const Config& cfg) {
  gm_testcase_params prm;
  gm_testcase_params_init(&prm);
  prm.m = cfg.m;
  prm.mass = cfg.mass;
  prm.seed = cfg.seed;
  prm.p = cfg.p;
  prm.resolution = cfg.resolution;
  prm.amplitude = cfg.amplitude;
  prm.frequency = cfg.frequency;
  prm.base_radius = cfg.base_radius;
  char* json = nullptr;
  if (gm_status s = gm_generate_testcase(cfg.name.c_str(), &prm, &json); s != GM_OK) return report_error(s);
  OwnedString owned(json);
  return emit(cfg, json);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar convex bodies: Gaussian volume, L_p Gaussian surface measures and bodies with a prescribed measure"};
  app.require_subcommand(1);
  Config cfg;

  auto finite = CLI::Validator(
      [](std::string& s) {
        return std::isfinite(std::stod(s)) ? std::string() : std::string("value must be finite");
      },
      "FINITE");
  auto add_p = [&](CLI::App* sub) {
    sub->add_option_function<double>("--p", [&](const double& v) { cfg.p = v, cfg.p_given = true; }, "exponent p")
        ->check(finite);
  };
  auto add_output = [&](CLI::App* sub) { sub->add_option("--output", cfg.output, "output file (default stdout)"); };
  auto add_resolution = [&](CLI::App* sub) {
    sub->add_option("--resolution", cfg.resolution, "grid resolution")->check(CLI::Range(64, 1 << 20));
  };

  auto* constants = app.add_subcommand("constants", "print r_half, a_half and the mass bound");
  constants->add_option("--n", cfg.n, "dimension")->check(CLI::Range(2, 1 << 20));
  add_p(constants);
  add_output(constants);

  auto* measure = app.add_subcommand("measure", "L_p Gaussian surface measure of a body file");
  measure->add_option("--input", cfg.input, "body file")->required();
  add_p(measure);
  add_output(measure);

  auto* discrete = app.add_subcommand("solve-discrete", "variational solver for a discrete measure");
  discrete->add_option("--input", cfg.input, "measure file")->required();
  add_p(discrete);
  discrete->add_option("--tol", cfg.tol, "relative stationarity tolerance")->check(CLI::PositiveNumber);
  discrete->add_flag("--require-certificate", cfg.require_certificate, "refuse inputs without a uniqueness certificate");
  add_output(discrete);

  auto* smooth = app.add_subcommand("solve-smooth", "homotopy solver for a density on the circle");
  smooth->add_option("--input", cfg.input, "density file");
  smooth->add_option("--family", cfg.family, "built-in density family")->check(CLI::IsMember({"constant", "cos"}));
  smooth->add_option("--amplitude", cfg.amplitude, "cos family amplitude");
  smooth->add_option("--frequency", cfg.frequency, "cos family frequency");
  smooth->add_option("--base-radius", cfg.base_radius, "radius whose ball density sets the family level")
      ->check(CLI::PositiveNumber);
  smooth->add_option("--start-radius", cfg.start_radius, "constant solution to start from")
      ->check(CLI::PositiveNumber);
  add_p(smooth);
  add_resolution(smooth);
  smooth->add_option("--tol", cfg.tol, "Newton residual tolerance")->check(CLI::PositiveNumber);
  smooth->add_flag("--allow-uncertified", cfg.allow_uncertified, "accept 0 < p < 1");
  smooth->add_flag("--require-certificate", cfg.require_certificate, "refuse densities that are not even");
  add_output(smooth);

  auto* verify = app.add_subcommand("verify", "run the inequality suite, or replay a witness");
  verify->add_option("--seed", cfg.seed, "random seed");
  verify->add_option("--instances", cfg.instances, "random instances per check")->check(CLI::Range(1, 100000));
  verify->add_option("--input", cfg.input, "witness to replay");
  add_output(verify);

  auto* plot = app.add_subcommand("plot", "SVG of a body, field or solve report");
  plot->add_option("--input", cfg.input, "input file")->required();
  add_output(plot);

  auto* generate = app.add_subcommand("generate", "write a built-in test input");
  generate->add_option("--name", cfg.name, "uniform-mgon, square-measure, cos-density, random-even, hemisphere-bad")
      ->required();
  generate->add_option("--m", cfg.m, "atoms (uniform-mgon)");
  generate->add_option("--mass", cfg.mass, "total mass (uniform-mgon)");
  generate->add_option("--seed", cfg.seed, "random seed");
  generate->add_option("--amplitude", cfg.amplitude, "cos amplitude");
  generate->add_option("--frequency", cfg.frequency, "cos frequency");
  generate->add_option("--base-radius", cfg.base_radius, "cos base radius")->check(CLI::PositiveNumber);
  add_p(generate);
  add_resolution(generate);
  add_output(generate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kSuccess : kInvalid;
  }

  if (*constants) return run_constants(cfg);
  if (*measure) return run_measure(cfg);
  if (*discrete) return run_solve_discrete(cfg);
  if (*smooth) return run_solve_smooth(cfg);
  if (*verify) return run_verify(cfg);
  if (*plot) return run_plot(cfg);
  if (*generate) return run_generate(cfg);
  return kInvalid;
}
