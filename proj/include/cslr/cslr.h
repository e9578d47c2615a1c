/* C interface to the current status linear regression library.
 *
 * Every function returning int returns CSLR_OK or one of the CSLR_E_* codes;
 * the message of the most recent failure on the calling thread is available
 * from cslr_last_error(). Handles are opaque and owned by the caller. */
#ifndef CSLR_CSLR_H
#define CSLR_CSLR_H

#include <stddef.h>
#include <stdint.h>

#if defined(CSLR_BUILDING_LIBRARY)
#define CSLR_API __attribute__((visibility("default")))
#else
#define CSLR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    CSLR_OK = 0,
    CSLR_E_INVALID_ARGUMENT = 1,
    CSLR_E_DIMENSION_MISMATCH = 2,
    CSLR_E_NO_CROSSING = 3,
    CSLR_E_BRACKET_INVALID = 4,
    CSLR_E_ALL_EXCLUDED = 5,
    CSLR_E_SINGULAR_MATRIX = 6,
    CSLR_E_DIVERGENT_INTEGRAL = 7,
    CSLR_E_ALL_FAILED = 8,
    CSLR_E_UNSUPPORTED_MODEL = 9,
    CSLR_E_IO = 10,
    CSLR_E_INTERNAL = 99
};

enum {
    CSLR_METHOD_SCORE1 = 0,
    CSLR_METHOD_SCORE2 = 1,
    CSLR_METHOD_PLUGIN = 2,
    CSLR_METHOD_PROFILE = 3
};

typedef struct cslr_sample cslr_sample;
typedef struct cslr_step cslr_step;

typedef void (*cslr_progress_fn)(size_t done, size_t total, void* user);

CSLR_API int cslr_abi_version(void);
CSLR_API const char* cslr_last_error(void);
CSLR_API const char* cslr_status_name(int status);
CSLR_API const char* cslr_method_name(int method);
/* Returns the method id, or -1 for an unknown name. */
CSLR_API int cslr_method_from_name(const char* name);

/* Y = beta0 X + eps with T ~ U(t_lo, t_hi), X ~ U(x_lo, x_hi) independent and
 * eps from the rescaled Beta(2,2) law on [0.375, 0.625]. */
typedef struct {
    double beta0;
    double t_lo, t_hi;
    double x_lo, x_hi;
} cslr_model;

CSLR_API void cslr_model_default(cslr_model* model);

/* ---- samples ---------------------------------------------------------- */

/* x is row-major, n rows of k covariates. */
CSLR_API int cslr_sample_create(const double* t, const double* x, const int* delta, size_t n, size_t k,
                                cslr_sample** out);
CSLR_API int cslr_sample_simulate(const cslr_model* model, size_t n, uint64_t seed, cslr_sample** out);
CSLR_API void cslr_sample_free(cslr_sample* sample);
CSLR_API size_t cslr_sample_size(const cslr_sample* sample);
CSLR_API size_t cslr_sample_dim(const cslr_sample* sample);
/* Copies the columns into caller buffers of n, n * k and n entries; any may be NULL. */
CSLR_API int cslr_sample_copy(const cslr_sample* sample, double* t, double* x, int* delta);
CSLR_API int cslr_sample_equal(const cslr_sample* a, const cslr_sample* b);

CSLR_API int cslr_sample_read_csv(const char* path, cslr_sample** out);
CSLR_API int cslr_sample_write_csv(const cslr_sample* sample, const char* path);
CSLR_API int cslr_sample_from_json(const char* text, cslr_sample** out);
/* *out is allocated by the library; release it with cslr_string_free. */
CSLR_API int cslr_sample_to_json(const cslr_sample* sample, char** out);
CSLR_API void cslr_string_free(char* s);

/* ---- fixed-beta MLE ----------------------------------------------------- */

CSLR_API int cslr_mle_fit(const cslr_sample* sample, const double* beta, size_t k, cslr_step** out);
CSLR_API void cslr_step_free(cslr_step* step);
CSLR_API size_t cslr_step_size(const cslr_step* step);
CSLR_API int cslr_step_copy(const cslr_step* step, double* knots, double* values);
CSLR_API double cslr_step_eval(const cslr_step* step, double u);
CSLR_API int cslr_step_write_csv(const cslr_step* step, const char* path);

/* ---- estimation --------------------------------------------------------- */

typedef struct {
    int method;
    double eps;
    double c_beta;
    double c_alpha;
    double lo, hi;
    int grid_points;
    double refine_tol;
    int with_intercept;
} cslr_estimate_options;

typedef struct {
    double beta_hat;
    int has_alpha;
    double alpha_hat;
    int alpha_mass_deficit;
    int method;
    double eps;
    double h_beta;
    double h_alpha;
    double bracket_lo, bracket_hi;
    int evaluations;
    int crossings;
    char search[32];
} cslr_estimate_result;

CSLR_API void cslr_estimate_options_default(cslr_estimate_options* opt);
CSLR_API int cslr_estimate(const cslr_sample* sample, const cslr_estimate_options* opt, cslr_estimate_result* out);

/* Score of a method at beta (k = 1). For CSLR_METHOD_PROFILE the value is the
 * truncated profile log likelihood. */
typedef struct {
    double value;
    size_t n_used;
    size_t n_excluded;
} cslr_score_value;

CSLR_API int cslr_score(const cslr_sample* sample, int method, double beta, double eps, double c,
                        cslr_score_value* out);

/* ---- population oracles ------------------------------------------------- */

typedef struct {
    double value;
    double eps;
    double tol;
    double change;
    int converged;
} cslr_oracle_result;

/* quantity: ip, i, ieps, score1var, interceptvar, interceptvar-simple,
 * popscore, ident. beta is used by popscore and ident only. */
CSLR_API int cslr_oracle(const cslr_model* model, const char* quantity, double eps, double beta,
                         cslr_oracle_result* out);

/* ---- experiments -------------------------------------------------------- */

typedef struct {
    size_t n;
    size_t reps;
    unsigned methods_mask; /* bit m set selects method m */
    double eps;
    double c_beta;
    double c_alpha;
    double lo, hi;
    uint64_t seed;
    unsigned jobs;
    int grid_points;
    cslr_progress_fn progress;
    void* progress_user;
} cslr_mc_config;

typedef struct {
    int parameter; /* 0 beta, 1 alpha */
    int method;
    size_t n;
    size_t N;
    double mean;
    double n_times_var;
    size_t failures;
} cslr_mc_row;

CSLR_API void cslr_mc_config_default(cslr_mc_config* cfg);
/* Writes up to capacity rows (two per method) and sets *count. */
CSLR_API int cslr_mc_table(const cslr_model* model, const cslr_mc_config* cfg, cslr_mc_row* rows, size_t capacity,
                           size_t* count);

typedef struct {
    double c;
    double mse;
    size_t failures;
} cslr_mse_point;

typedef struct {
    size_t n;
    size_t reps;
    const double* c_grid; /* NULL selects the default grid */
    size_t c_count;
    double eps;
    double lo, hi;
    uint64_t seed;
    unsigned jobs;
    int grid_points;
    cslr_progress_fn progress;
    void* progress_user;
} cslr_mse_config;

CSLR_API void cslr_mse_config_default(cslr_mse_config* cfg);
/* Number of points the default c grid has. */
CSLR_API size_t cslr_default_c_grid(double* out, size_t capacity);
/* out needs room for one point per c value. */
CSLR_API int cslr_mse_curve(const cslr_model* model, const cslr_mse_config* cfg, cslr_mse_point* out);

typedef struct {
    const double* c_grid;
    size_t c_count;
    double c0;
    size_t B;
    double eps;
    double lo, hi;
    uint64_t seed;
    unsigned jobs;
    int grid_points;
    cslr_progress_fn progress;
    void* progress_user;
} cslr_bootstrap_config;

CSLR_API void cslr_bootstrap_config_default(cslr_bootstrap_config* cfg);
CSLR_API int cslr_bootstrap_bw(const cslr_sample* sample, const cslr_bootstrap_config* cfg, cslr_mse_point* curve,
                               double* c_opt, double* beta_pilot);

#ifdef __cplusplus
}
#endif

#endif
