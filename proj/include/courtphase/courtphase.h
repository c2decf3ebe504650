/* C interface to the courtphase library. */
#ifndef COURTPHASE_COURTPHASE_H
#define COURTPHASE_COURTPHASE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef COURTPHASE_BUILDING
#    define CP_API __declspec(dllexport)
#  else
#    define CP_API __declspec(dllimport)
#  endif
#else
#  define CP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cp_status {
  CP_OK = 0,
  CP_ERR_CONFIG = 2,
  CP_ERR_DATA = 3,
  CP_ERR_INTERNAL = 4
} cp_status;

typedef enum cp_phase { CP_TRANSITION = 0, CP_DEFENSE = 1, CP_OFFENSE = 2 } cp_phase;

typedef struct cp_context cp_context;
typedef struct cp_cluster_model cp_cluster_model;

CP_API const char* cp_version(void);

/* A context holds the last error, warnings and text output of a call. */
CP_API cp_context* cp_context_new(void);
CP_API void cp_context_free(cp_context* ctx);
CP_API const char* cp_last_error(const cp_context* ctx);
CP_API const char* cp_last_error_module(const cp_context* ctx);
/* {"error":{"module":..,"kind":..,"code":..,"message":..}} or "" */
CP_API const char* cp_last_error_json(const cp_context* ctx);
CP_API size_t cp_warning_count(const cp_context* ctx);
CP_API const char* cp_warning(const cp_context* ctx, size_t index);
/* Human readable summary left by the last command, possibly empty. */
CP_API const char* cp_output(const cp_context* ctx);

/* ---- numerical kernels ---- */

/* points is n x dim, row major. */
CP_API cp_status cp_kmeans(cp_context* ctx, const double* points, size_t n, size_t dim, int k, uint64_t seed,
                           int restarts, int max_iter, double tol, cp_cluster_model** out);
CP_API void cp_cluster_model_free(cp_cluster_model* model);
CP_API int cp_cluster_model_k(const cp_cluster_model* model);
CP_API size_t cp_cluster_model_size(const cp_cluster_model* model);
CP_API size_t cp_cluster_model_dim(const cp_cluster_model* model);
CP_API const int* cp_cluster_model_assignments(const cp_cluster_model* model);
/* k x dim, row major */
CP_API const double* cp_cluster_model_centroids(const cp_cluster_model* model);
CP_API double cp_cluster_model_wcss(const cp_cluster_model* model);
CP_API double cp_cluster_model_tss(const cp_cluster_model* model);
CP_API double cp_cluster_model_bd_td(const cp_cluster_model* model);

/* out_bd_td receives k_max - k_min + 1 values. */
CP_API cp_status cp_bd_td_curve(cp_context* ctx, const double* points, size_t n, size_t dim, int k_min, int k_max,
                                uint64_t seed, int restarts, int max_iter, double tol, double* out_bd_td);
CP_API cp_status cp_select_k(cp_context* ctx, const int* ks, const double* bd_td, size_t count, double threshold,
                             int* out_k, int* out_saturated);

/* d is n x n; coords receives n x dims, eigenvalues receives dims values. */
CP_API cp_status cp_classical_mds(cp_context* ctx, const double* d, size_t n, size_t dims, double* coords,
                                  double* eigenvalues, double* strain_share);

/* counts and percent are k x k with index [to * k + from]; contiguous may be
   NULL, meaning every adjacent pair is contiguous. */
CP_API cp_status cp_transition_matrix(cp_context* ctx, const int* assignments, const unsigned char* contiguous,
                                      size_t n, int k, uint64_t* counts, double* percent, uint64_t* switches);
CP_API cp_phase cp_label_frame(double mean_x_cm, double band_cm, int attack_sign);
/* seconds_per_switch is NaN when there are no switches. */
CP_API cp_status cp_switch_rate(cp_context* ctx, uint64_t switches, int64_t duration_ms, double* per_second,
                                double* seconds_per_switch);

/* ---- commands; each reads and writes files ---- */

typedef struct cp_ingest_options {
  const char* tracking;
  const char* events;
  const char* out;
  int64_t grid_ms;
  int64_t staleness_ms;
  double malformed_tolerance;
  int corner_origin;
} cp_ingest_options;

typedef struct cp_stints_options {
  const char* frames;
  const char* roster;
  const char* out;
  const char* features_dir; /* optional: one features CSV per stint */
  double min_minutes;
} cp_stints_options;

typedef struct cp_cluster_options {
  const char* features;
  const char* out;
  const char* lineup; /* optional, comma separated player ids */
  int64_t grid_ms;
  int k_min;
  int k_max;
  double threshold;
  uint64_t seed;
  int restarts;
  int max_iter;
  double tol;
} cp_cluster_options;

typedef struct cp_mds_options {
  const char* model;
  const char* features;
  const char* out;
  const char* lineup; /* optional when the model carries one */
  size_t dims;
} cp_mds_options;

typedef struct cp_phase_options {
  const char* model;
  const char* frames;
  const char* out;
  const char* lineup; /* optional when the model carries one */
  double band_cm;
  int attack_sign;
} cp_phase_options;

typedef struct cp_shots_options {
  const char* shots;
  const char* phase;
  const char* out;
  int64_t tolerance_ms;
} cp_shots_options;

typedef struct cp_synth_options {
  const char* config; /* optional JSON config; NULL uses the default */
  const char* out_dir;
  uint64_t seed;
} cp_synth_options;

typedef struct cp_run_options {
  const char* tracking;
  const char* events;
  const char* shots; /* optional */
  const char* roster;
  const char* out_dir;
  int64_t grid_ms;
  int64_t staleness_ms;
  double malformed_tolerance;
  int corner_origin;
  double min_minutes;
  int k_min;
  int k_max;
  double threshold;
  uint64_t seed;
  int restarts;
  double band_cm;
  int attack_sign;
  int64_t tolerance_ms;
  int procrustes;
} cp_run_options;

typedef struct cp_plot_options {
  const char* mds;
  const char* phase; /* optional, used for panel titles */
  const char* out_dir;
  int procrustes;
} cp_plot_options;

CP_API void cp_ingest_options_init(cp_ingest_options* o);
CP_API void cp_stints_options_init(cp_stints_options* o);
CP_API void cp_cluster_options_init(cp_cluster_options* o);
CP_API void cp_mds_options_init(cp_mds_options* o);
CP_API void cp_phase_options_init(cp_phase_options* o);
CP_API void cp_shots_options_init(cp_shots_options* o);
CP_API void cp_synth_options_init(cp_synth_options* o);
CP_API void cp_run_options_init(cp_run_options* o);
CP_API void cp_plot_options_init(cp_plot_options* o);

CP_API cp_status cp_cmd_ingest(cp_context* ctx, const cp_ingest_options* o);
CP_API cp_status cp_cmd_stints(cp_context* ctx, const cp_stints_options* o);
CP_API cp_status cp_cmd_cluster(cp_context* ctx, const cp_cluster_options* o);
CP_API cp_status cp_cmd_mds(cp_context* ctx, const cp_mds_options* o);
CP_API cp_status cp_cmd_phase(cp_context* ctx, const cp_phase_options* o);
CP_API cp_status cp_cmd_shots(cp_context* ctx, const cp_shots_options* o);
CP_API cp_status cp_cmd_synth(cp_context* ctx, const cp_synth_options* o);
CP_API cp_status cp_cmd_run_all(cp_context* ctx, const cp_run_options* o);
CP_API cp_status cp_cmd_plot(cp_context* ctx, const cp_plot_options* o);

/* The default generator config as JSON; valid until the next call on ctx. */
CP_API const char* cp_synth_default_config(cp_context* ctx);

#ifdef __cplusplus
}
#endif

#endif
