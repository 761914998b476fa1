/*
 * C interface to the gaussmink library. Objects are opaque handles released
 * with the matching *_free call. Every function returning gm_status records a
 * message for gm_last_error() on failure. Strings and arrays handed out by the
 * library are released with gm_string_free / gm_doubles_free.
 */
#ifndef GAUSSMINK_H
#define GAUSSMINK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GAUSSMINK_BUILDING)
#define GM_API __declspec(dllexport)
#else
#define GM_API __declspec(dllimport)
#endif
#else
#define GM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gm_status {
  GM_OK = 0,
  GM_VERIFICATION_FAILED = 1,
  GM_INVALID_ARGUMENT = 2,
  GM_NO_CONVERGENCE = 3,
  GM_INFEASIBLE = 4,
  GM_IO_ERROR = 5,
  GM_INTERNAL_ERROR = 6
} gm_status;

typedef struct gm_body gm_body;
typedef struct gm_measure gm_measure;
typedef struct gm_report gm_report;

/* Message of the last failure on the calling thread ("" if none). */
GM_API const char* gm_last_error(void);
GM_API const char* gm_status_name(gm_status status);
GM_API void gm_string_free(char* s);
GM_API void gm_doubles_free(double* values);

/* Bodies: planar convex polygons given by unit normals and support numbers. */
GM_API gm_status gm_body_create(size_t count, const double* normals_xy, const double* support, gm_body** out);
GM_API gm_status gm_body_from_json(const char* json, gm_body** out);
GM_API gm_status gm_body_load(const char* path, gm_body** out);
GM_API void gm_body_free(gm_body* body);
GM_API size_t gm_body_facet_count(const gm_body* body);
GM_API gm_status gm_body_facet(const gm_body* body, size_t i, double* nx, double* ny, double* h);
GM_API gm_status gm_body_to_json(const gm_body* body, char** out);
/* Trapezoid rule in polar angle; resolution >= 256. */
GM_API gm_status gm_body_gauss_volume(const gm_body* body, int resolution, double* out);
/* Closed form through Owen's T function. */
GM_API gm_status gm_body_gauss_volume_exact(const gm_body* body, double* out);
GM_API gm_status gm_body_gauss_volume_mc(const gm_body* body, uint64_t samples, uint64_t seed, unsigned shards,
                                         double* estimate, double* std_error);
/* Per-edge L_p Gaussian surface measure as {"p":..,"edges":[{"normal":[x,y],"mass":m}],"total":..}. */
GM_API gm_status gm_body_surface_measure_json(const gm_body* body, double p, char** out);
GM_API gm_status gm_body_svg(const gm_body* body, char** out);

/* Discrete measures on the circle. */
GM_API gm_status gm_measure_create(size_t count, const double* directions_xy, const double* masses,
                                   gm_measure** out);
/* Also reports the "p" recorded in the file (1 when absent) if p_out is non-null. */
GM_API gm_status gm_measure_from_json(const char* json, gm_measure** out, double* p_out);
GM_API gm_status gm_measure_load(const char* path, gm_measure** out, double* p_out);
GM_API void gm_measure_free(gm_measure* measure);
GM_API size_t gm_measure_atom_count(const gm_measure* measure);
GM_API double gm_measure_total_mass(const gm_measure* measure);
/* min over unit e of sum m_i (e.v_i)_+. */
GM_API gm_status gm_measure_hemisphere_margin(const gm_measure* measure, double* out);

typedef struct gm_discrete_options {
  double p;
  double target_volume;
  double stationarity_tol;
  double volume_tol;
  int require_certificate;
  int max_outer;
} gm_discrete_options;

typedef struct gm_smooth_options {
  int resolution;
  double t_step_initial;
  double t_step_min;
  double newton_tol;
  int newton_max_iters;
  double start_radius; /* <= 0: default choice */
  int allow_uncertified;
  int require_certificate;
} gm_smooth_options;

GM_API void gm_discrete_options_init(gm_discrete_options* opts);
GM_API void gm_smooth_options_init(gm_smooth_options* opts);

/* GM_INFEASIBLE for measures violating the hemisphere condition or a requested
 * certificate; GM_NO_CONVERGENCE when the iteration stalls. A report that
 * finished without meeting the tolerances is returned with GM_OK and
 * gm_report_converged() == 0. */
GM_API gm_status gm_solve_discrete(const gm_measure* measure, const gm_discrete_options* opts, gm_report** out);
GM_API gm_status gm_solve_smooth(const double* f, size_t count, double p, const gm_smooth_options* opts,
                                 gm_report** out);

GM_API void gm_report_free(gm_report* report);
GM_API int gm_report_converged(const gm_report* report);
GM_API double gm_report_lambda(const gm_report* report);
GM_API double gm_report_volume_residual(const gm_report* report);
GM_API double gm_report_stationarity_residual(const gm_report* report);
GM_API double gm_report_gauss_volume(const gm_report* report);
GM_API size_t gm_report_flag_count(const gm_report* report);
GM_API const char* gm_report_flag(const gm_report* report, size_t i);
/* Polygon of the solution (the Wulff shape of the field samples for smooth solves). */
GM_API gm_status gm_report_body(const gm_report* report, gm_body** out);
/* Support samples of a smooth solution; GM_INVALID_ARGUMENT for discrete reports. */
GM_API gm_status gm_report_field(const gm_report* report, double** values, size_t* count);
GM_API gm_status gm_report_to_json(const gm_report* report, char** out);

/* Smooth densities on the uniform grid. */
GM_API gm_status gm_density_load(const char* path, double** values, size_t* count);
/* family "constant": level (1/2pi) r^{2-p} e^{-r^2/2} with r = base_radius;
 * "cos": that level times (1 + amplitude cos(frequency theta)). out holds resolution values. */
GM_API gm_status gm_density_family(const char* family, int resolution, double p, double amplitude, int frequency,
                                   double base_radius, double* out);
GM_API gm_status gm_density_svg(const double* h, size_t count, char** out);

typedef struct gm_constants_t {
  int n;
  double p;
  double r_half;
  double a_half;
  double mass_bound;
} gm_constants_t;

GM_API gm_status gm_constants(int n, double p, gm_constants_t* out);
/* key=value lines */
GM_API gm_status gm_constants_text(int n, double p, char** out);

/* Runs every check over `instances` random inputs. *all_passed is 1 when no
 * check fails; table_out receives the text table, json_out (optional) the
 * per-check results with witnesses. */
GM_API gm_status gm_verify_suite(uint64_t seed, int instances, char** table_out, char** json_out, int* all_passed);
/* Re-run the check stored in a witness; writes the result as JSON. */
GM_API gm_status gm_verify_witness(const char* witness_json, char** result_json, int* passed);

typedef struct gm_testcase_params {
  int m;
  double mass;
  uint64_t seed;
  double p;
  int resolution;
  double amplitude;
  int frequency;
  double base_radius;
} gm_testcase_params;

GM_API void gm_testcase_params_init(gm_testcase_params* params);
/* Names: uniform-mgon, square-measure, cos-density, random-even, hemisphere-bad. */
GM_API gm_status gm_generate_testcase(const char* name, const gm_testcase_params* params, char** json_out);

/* SVG of a body file, a solve report containing a body or field, or a field file. */
GM_API gm_status gm_plot_json(const char* json, char** svg_out);

#ifdef __cplusplus
}
#endif

#endif
