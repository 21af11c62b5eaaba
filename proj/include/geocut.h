/* geocut: centerpoint cutting-plane optimization on Hadamard manifolds.
 *
 * C API over the C++ core: opaque handles, status codes, flat double buffers
 * in chart coordinates.  Chart coordinate layout per manifold kind:
 *   euclidean(n), klein(n): n doubles.
 *   spd(n):                 n(n+1)/2 doubles, diagonal entries first, then
 *                           the strict upper triangle row by row.
 * Buffer lengths are always geocut_manifold_dim() doubles unless stated
 * otherwise.  All functions returning geocut_status set a thread-local
 * message retrievable via geocut_last_error() on failure.
 */
#ifndef GEOCUT_H
#define GEOCUT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GEOCUT_API __declspec(dllexport)
#else
#define GEOCUT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum geocut_status {
  GEOCUT_OK = 0,
  GEOCUT_ERR_INVALID_ARGUMENT = 1,
  GEOCUT_ERR_CHART_DOMAIN = 2,
  GEOCUT_ERR_BASE_MISMATCH = 3,
  GEOCUT_ERR_DEGENERATE_REGION = 4,
  GEOCUT_ERR_NO_CONVERGENCE = 5,
  GEOCUT_ERR_IO = 6,
  GEOCUT_ERR_UNKNOWN = 7
} geocut_status;

typedef struct geocut_manifold geocut_manifold;
typedef struct geocut_region geocut_region;
typedef struct geocut_samples geocut_samples;
typedef struct geocut_oracle geocut_oracle;
typedef struct geocut_trace geocut_trace;

GEOCUT_API const char* geocut_status_name(geocut_status s);
GEOCUT_API const char* geocut_last_error(void);
GEOCUT_API void geocut_string_free(char* s);

/* ------------------------------------------------------------------ */
/* manifolds: kind is "euclidean", "klein" or "spd"                    */

GEOCUT_API geocut_status geocut_manifold_create(const char* kind, int n,
                                                geocut_manifold** out);
GEOCUT_API void geocut_manifold_destroy(geocut_manifold* m);
GEOCUT_API int geocut_manifold_dim(const geocut_manifold* m);
GEOCUT_API const char* geocut_manifold_kind(const geocut_manifold* m);

GEOCUT_API geocut_status geocut_exp(const geocut_manifold* m, const double* x,
                                    const double* v, double* out);
GEOCUT_API geocut_status geocut_log(const geocut_manifold* m, const double* x,
                                    const double* y, double* out);
GEOCUT_API geocut_status geocut_inner(const geocut_manifold* m, const double* x,
                                      const double* u, const double* v, double* out);
GEOCUT_API geocut_status geocut_dist(const geocut_manifold* m, const double* x,
                                     const double* y, double* out);
GEOCUT_API geocut_status geocut_volume_density(const geocut_manifold* m,
                                               const double* x, double* out);

/* ------------------------------------------------------------------ */
/* feasible regions: geodesic ball plus halfspace cuts                 */

GEOCUT_API geocut_status geocut_region_create(const geocut_manifold* m,
                                              const double* center, double radius,
                                              geocut_region** out);
GEOCUT_API void geocut_region_destroy(geocut_region* r);
GEOCUT_API geocut_status geocut_region_add_cut(geocut_region* r, const double* base,
                                               const double* normal);
GEOCUT_API size_t geocut_region_cut_count(const geocut_region* r);
GEOCUT_API geocut_status geocut_region_contains(const geocut_region* r,
                                                const double* y, int* out);
/* versioned JSON record; loadable for resumable runs */
GEOCUT_API geocut_status geocut_region_save(const geocut_region* r, const char* path);
GEOCUT_API geocut_status geocut_region_load(const char* path, geocut_region** out);
GEOCUT_API geocut_status geocut_region_manifold(const geocut_region* r,
                                                geocut_manifold** out);

/* ------------------------------------------------------------------ */
/* sampling                                                            */

GEOCUT_API geocut_status geocut_sample_region(const geocut_region* r, uint64_t count,
                                              uint64_t seed, int threads,
                                              geocut_samples** out);
GEOCUT_API void geocut_samples_destroy(geocut_samples* s);
GEOCUT_API size_t geocut_samples_count(const geocut_samples* s);
GEOCUT_API geocut_status geocut_samples_get(const geocut_samples* s, size_t index,
                                            double* out);
GEOCUT_API geocut_status geocut_samples_export_csv(const geocut_samples* s,
                                                   const char* path);

GEOCUT_API geocut_status geocut_estimate_volume(const geocut_region* r,
                                                uint64_t trials, uint64_t seed,
                                                int threads, double* value,
                                                double* stderr_out);
/* fraction of the samples inside the halfspace (base, normal) */
GEOCUT_API geocut_status geocut_empirical_mass(const geocut_samples* s,
                                               const double* cut_base,
                                               const double* cut_normal, double* out);

/* ------------------------------------------------------------------ */
/* centerpoints                                                        */

GEOCUT_API geocut_status geocut_centrality(const geocut_samples* s, const double* y,
                                           int directions, double* depth,
                                           double* worst_direction);
GEOCUT_API geocut_status geocut_karcher_mean(const geocut_samples* s, double tol,
                                             double* out);
GEOCUT_API geocut_status geocut_find_centerpoint(const geocut_samples* s,
                                                 int candidates, double* point,
                                                 double* depth);
GEOCUT_API geocut_status geocut_depth_profile_csv(const geocut_samples* s, int grid,
                                                  const char* path);

/* ------------------------------------------------------------------ */
/* subgradient oracles                                                 */

GEOCUT_API geocut_status geocut_oracle_squared_distance(const geocut_region* domain,
                                                        const double* p,
                                                        geocut_oracle** out);
GEOCUT_API geocut_status geocut_oracle_fermat_weber(const geocut_region* domain,
                                                    const double* points,
                                                    size_t point_count,
                                                    geocut_oracle** out);
GEOCUT_API geocut_status geocut_oracle_max_distance(const geocut_region* domain,
                                                    const double* points,
                                                    size_t point_count,
                                                    geocut_oracle** out);
/* spd only; b_mats is mat_count row-major n*n blocks */
GEOCUT_API geocut_status geocut_oracle_logdet(const geocut_region* domain,
                                              const double* b_mats, size_t mat_count,
                                              geocut_oracle** out);
GEOCUT_API void geocut_oracle_destroy(geocut_oracle* o);
GEOCUT_API double geocut_oracle_lipschitz(const geocut_oracle* o);
GEOCUT_API geocut_status geocut_oracle_eval(const geocut_oracle* o, const double* x,
                                            double* out);
GEOCUT_API geocut_status geocut_oracle_subgrad(const geocut_oracle* o, const double* x,
                                               double* out);

/* ------------------------------------------------------------------ */
/* cutting-plane minimization                                          */

GEOCUT_API geocut_status geocut_stopping_threshold(int dim, double eps,
                                                   double lipschitz, double* out);
GEOCUT_API geocut_status geocut_iteration_budget(int dim, double lipschitz, double vol,
                                                 double eps, uint64_t* out);

typedef struct geocut_minimize_options {
  uint64_t seed;
  uint64_t search_samples; /* 0: default */
  uint64_t volume_trials;  /* 0: default */
  uint64_t max_cuts;       /* 0: three times the iteration budget */
  int threads;             /* 0: single-threaded */
} geocut_minimize_options;

GEOCUT_API geocut_status geocut_minimize(const geocut_region* r,
                                         const geocut_oracle* o, double eps,
                                         const geocut_minimize_options* opts,
                                         geocut_trace** out);
GEOCUT_API void geocut_trace_destroy(geocut_trace* t);
GEOCUT_API size_t geocut_trace_length(const geocut_trace* t);
GEOCUT_API uint64_t geocut_trace_cuts_used(const geocut_trace* t);
GEOCUT_API const char* geocut_trace_termination(const geocut_trace* t);
GEOCUT_API double geocut_trace_best_value(const geocut_trace* t);
GEOCUT_API geocut_status geocut_trace_best_point(const geocut_trace* t, double* out);
GEOCUT_API geocut_status geocut_trace_iterate(const geocut_trace* t, size_t index,
                                              double* f, double* depth, double* volume,
                                              double* volume_stderr, int* flagged);
GEOCUT_API geocut_status geocut_trace_export_jsonl(const geocut_trace* t,
                                                   const char* path);
GEOCUT_API geocut_status geocut_trace_export_csv(const geocut_trace* t,
                                                 const char* path);
GEOCUT_API geocut_status geocut_trace_save_region(const geocut_trace* t,
                                                  const char* path);

/* ------------------------------------------------------------------ */
/* packaged experiments; each writes its outputs and returns a JSON    */
/* summary (free with geocut_string_free)                              */

typedef struct geocut_sharpness_params {
  int n;
  double delta;
  const double* eps_list;
  size_t eps_count;
  uint64_t trials;
  uint64_t seed;
  int threads;
} geocut_sharpness_params;

GEOCUT_API geocut_status geocut_run_sharpness(const geocut_sharpness_params* params,
                                              const char* csv_path,
                                              char** summary_json);

GEOCUT_API geocut_status geocut_run_grunbaum(const char* shape, uint64_t samples,
                                             uint64_t seed, const char* csv_path,
                                             char** summary_json);

typedef struct geocut_convergence_params {
  const char* problem; /* euclidean_quadratic | klein_fermat_weber | spd_logdet */
  const double* eps_list;
  size_t eps_count;
  uint64_t seed;
  int threads;
} geocut_convergence_params;

GEOCUT_API geocut_status geocut_run_convergence(const geocut_convergence_params* params,
                                                const char* csv_path,
                                                char** summary_json);

typedef struct geocut_optimize_params {
  const char* problem;
  double eps;
  uint64_t seed;
  uint64_t search_samples; /* 0: default */
  int threads;
} geocut_optimize_params;

/* writes trace.jsonl, trace_summary.csv and region.json into out_dir */
GEOCUT_API geocut_status geocut_run_optimize(const geocut_optimize_params* params,
                                             const char* out_dir, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* GEOCUT_H */
