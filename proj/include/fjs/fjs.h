/* C interface to the fjs library. Every function that can fail returns an
 * fjs_status; the message of the most recent failure on the calling thread is
 * available from fjs_last_error(). Vectors are caller-owned arrays of length n
 * where n must equal the node count of the graph. */
#ifndef FJS_FJS_H
#define FJS_FJS_H

#include <stddef.h>
#include <stdint.h>

#if defined(FJS_BUILDING_LIBRARY)
#define FJS_API __attribute__((visibility("default")))
#else
#define FJS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fjs_status {
  FJS_OK = 0,
  FJS_ERR_INPUT = 1,
  FJS_ERR_NUMERICAL = 2,
  FJS_ERR_SIZE_GUARD = 3,
  FJS_ERR_INTERNAL = 4
} fjs_status;

typedef struct fjs_graph fjs_graph;
typedef struct fjs_stubbornness fjs_stubbornness;

FJS_API const char* fjs_last_error(void);
FJS_API const char* fjs_version(void);

/* Worker threads for per-node loops. Results do not depend on this value. */
FJS_API void fjs_set_threads(unsigned count);
FJS_API unsigned fjs_get_threads(void);

/* ---- graphs ---- */

FJS_API fjs_status fjs_graph_load(const char* path, fjs_graph** out);
/* w may be NULL for unit weights. */
FJS_API fjs_status fjs_graph_from_edges(size_t m, const int64_t* u, const int64_t* v,
                                        const double* w, fjs_graph** out);

typedef enum fjs_graph_family {
  FJS_FAMILY_REGULAR = 0,       /* param = even degree */
  FJS_FAMILY_PREFERENTIAL = 1,  /* param = links per new node */
  FJS_FAMILY_CONNECTED = 2      /* param = expected degree */
} fjs_graph_family;

FJS_API fjs_status fjs_graph_generate(fjs_graph_family family, size_t n, size_t param,
                                      uint64_t seed, fjs_graph** out);
FJS_API void fjs_graph_free(fjs_graph* g);

FJS_API size_t fjs_graph_node_count(const fjs_graph* g);
FJS_API size_t fjs_graph_edge_count(const fjs_graph* g);
FJS_API size_t fjs_graph_dropped_self_loops(const fjs_graph* g);
FJS_API size_t fjs_graph_merged_edges(const fjs_graph* g);
FJS_API int64_t fjs_graph_node_id(const fjs_graph* g, size_t index);
FJS_API uint64_t fjs_graph_fingerprint(const fjs_graph* g);

FJS_API fjs_status fjs_laplacian_apply(const fjs_graph* g, const double* x, double* y, size_t n);

/* ---- stubbornness ---- */

FJS_API fjs_status fjs_stubbornness_uniform(size_t n, double value, fjs_stubbornness** out);
FJS_API fjs_status fjs_stubbornness_from_values(size_t n, const double* k, fjs_stubbornness** out);
FJS_API fjs_status fjs_stubbornness_random(size_t n, double lo, double hi, uint64_t seed,
                                           fjs_stubbornness** out);
/* "node k" lines; every node of g exactly once. */
FJS_API fjs_status fjs_stubbornness_load(const char* path, const fjs_graph* g,
                                         fjs_stubbornness** out);
FJS_API void fjs_stubbornness_free(fjs_stubbornness* k);
FJS_API size_t fjs_stubbornness_size(const fjs_stubbornness* k);
FJS_API fjs_status fjs_stubbornness_values(const fjs_stubbornness* k, double* out, size_t n);

typedef struct fjs_spectrum_bounds {
  double lower;        /* k_min */
  double upper;        /* k_max + 2 d_max */
  double coarse_upper; /* k_max + n w_max */
} fjs_spectrum_bounds;

FJS_API fjs_status fjs_eigen_bounds(const fjs_graph* g, const fjs_stubbornness* k,
                                    fjs_spectrum_bounds* out);

/* ---- opinions ---- */

/* "node value" lines with values in [-1, 1]; every node of g exactly once. */
FJS_API fjs_status fjs_opinions_load(const char* path, const fjs_graph* g, double* out, size_t n);
/* dist: uniform | powerlaw | normal | exponential */
FJS_API fjs_status fjs_opinions_generate(size_t n, const char* dist, uint64_t seed, double* out);

typedef enum fjs_centering { FJS_CENTER_WEIGHTED = 0, FJS_CENTER_BY_COUNT = 1 } fjs_centering;

FJS_API fjs_status fjs_opinions_center(const fjs_stubbornness* k, const double* s, double* out,
                                       size_t n, fjs_centering rule);
/* Writes "id value" lines. path NULL or "-" writes to standard output. g may
 * be NULL, in which case ids are 0..n-1. */
FJS_API fjs_status fjs_write_node_values(const char* path, const fjs_graph* g, const double* values,
                                         size_t n);

/* ---- dynamics ---- */

FJS_API fjs_status fjs_step(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                            const double* z, double* out, size_t n);

typedef enum fjs_solve_mode { FJS_SOLVE_EXACT = 0, FJS_SOLVE_ITERATIVE = 1 } fjs_solve_mode;

FJS_API fjs_status fjs_equilibrium(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                                   double* out, size_t n, fjs_solve_mode mode, double delta);
/* Row-major n x n. */
FJS_API fjs_status fjs_fundamental_matrix(const fjs_graph* g, const fjs_stubbornness* k,
                                          double* out, size_t n);

typedef struct fjs_spectral_estimate {
  double rho;
  double upper;
  double residual;
  size_t iterations;
  int converged;
} fjs_spectral_estimate;

FJS_API fjs_status fjs_spectral_radius(const fjs_graph* g, const fjs_stubbornness* k, double tol,
                                       size_t max_iterations, fjs_spectral_estimate* out);
FJS_API fjs_status fjs_convergence_bound(double rho, double f0_norm, double eps, uint64_t* out);

typedef void (*fjs_trace_callback)(uint64_t t, double e_norm, double f_norm, void* user);

typedef struct fjs_simulation_summary {
  uint64_t stop_time;
  uint64_t bound;
  int within_bound;
  double f0_norm;
  double final_f_norm;
  fjs_spectral_estimate spectral;
} fjs_simulation_summary;

/* z_out (may be NULL) receives z at the stop time; callback (may be NULL)
 * receives every trace entry. max_steps 0 selects the default. */
FJS_API fjs_status fjs_simulate_until(const fjs_graph* g, const fjs_stubbornness* k,
                                      const double* s, const double* z0, size_t n, double eps,
                                      uint64_t max_steps, double* z_out,
                                      fjs_trace_callback callback, void* user,
                                      fjs_simulation_summary* out);

/* ---- solver ---- */

typedef struct fjs_solve_info {
  size_t iterations;
  size_t refinements;
  double residual_norm;
  double relative_residual;
  double target;
  int certified;
} fjs_solve_info;

/* y ~ (L + K)^{-1} b in the energy norm within delta. An uncertified result
 * still returns FJS_OK; check info->certified. */
FJS_API fjs_status fjs_solve(const fjs_graph* g, const fjs_stubbornness* k, const double* b,
                             double* y, size_t n, double delta, size_t max_iterations,
                             fjs_solve_info* info);

/* ---- metrics ---- */

typedef struct fjs_delta_thresholds {
  double delta1;
  double delta2;
  double delta3;
  double delta;
} fjs_delta_thresholds;

FJS_API fjs_status fjs_delta_budget(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                                    size_t n, double eps, fjs_delta_thresholds* out);

typedef enum fjs_metrics_mode { FJS_METRICS_EXACT = 0, FJS_METRICS_APPROX = 1 } fjs_metrics_mode;

typedef struct fjs_metrics_report {
  double conflict;
  double disagreement;
  double polarization;
  double pd_index;
  double sum_z;
  double weighted_sum_z;
  fjs_metrics_mode mode;
  double delta_used;
  double eps_requested;
  double conservation_residual;
  double conservation_relative;
  double pd_identity_residual;
  int certified;
  int centered;
  uint64_t solver_iterations;
  uint64_t node_count;
  uint64_t edge_count;
  uint64_t graph_fingerprint;
  double solve_seconds;
  double norms_seconds;
  double total_seconds;
} fjs_metrics_report;

/* dense_cap 0 selects the default cap. With solver_fallback nonzero, graphs
 * above the cap use the certified solver at delta 1e-12 instead of failing
 * with FJS_ERR_SIZE_GUARD. */
FJS_API fjs_status fjs_metrics_exact(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                                     size_t n, size_t dense_cap, int solver_fallback,
                                     fjs_metrics_report* out);
FJS_API fjs_status fjs_metrics_approx(const fjs_graph* g, const fjs_stubbornness* k,
                                      const double* s, size_t n, double eps,
                                      fjs_metrics_report* out);

/* ---- forest oracle ---- */

/* Row-major n x n; total_weight may be NULL. */
FJS_API fjs_status fjs_forest_matrix(const fjs_graph* g, const fjs_stubbornness* k, double* out,
                                     size_t n, double* total_weight);

/* ---- report serialization ---- */

typedef struct fjs_report_context {
  const char* command;      /* may be NULL */
  const char* graph_path;   /* may be NULL */
  const char* distribution; /* may be NULL */
  uint64_t seed;
  int has_seed;
  unsigned threads;
} fjs_report_context;

/* One-line JSON object. Writes at most cap bytes including the terminator;
 * *needed receives the full length plus one. ctx may be NULL. */
FJS_API fjs_status fjs_report_to_json(const fjs_metrics_report* report,
                                      const fjs_report_context* ctx, char* buffer, size_t cap,
                                      size_t* needed);
FJS_API fjs_status fjs_report_from_json(const char* text, fjs_metrics_report* out);

/* ---- verification ---- */

typedef void (*fjs_line_callback)(const char* line, void* user);

/* full: 0 = small scale, 1 = full scale. failed receives the number of
 * failing properties. */
FJS_API fjs_status fjs_verify_run(int full, uint64_t seed, int inject_fault,
                                  fjs_line_callback callback, void* user, size_t* failed);

#ifdef __cplusplus
}
#endif

#endif /* FJS_FJS_H */
