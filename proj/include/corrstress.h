/* C API for the correlation stress testing library.
 *
 * Covariance matrices live on the Fisher-Rao manifold of zero-mean Gaussian
 * distributions; correlation stresses move along geodesics of the
 * constant-determinant submanifold, generated by traceless symmetric
 * directions. The API exposes distances, geodesics, stress paths and their
 * plausibility, canonical generators, most-plausible completion of partially
 * specified targets, and isospectral (eigenvalue-preserving) comparison
 * paths.
 *
 * Conventions: all matrix buffers are dense row-major n*n doubles; all
 * functions return cst_status; outputs are written through pointers. Handles
 * are opaque and freed with the matching *_free. On any error the
 * thread-local message of cst_last_error() describes the failure.
 */
#ifndef CORRSTRESS_H
#define CORRSTRESS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cst_status {
    CST_OK = 0,
    CST_ERR_PARSE = 1,            /* unreadable file or malformed JSON/CSV */
    CST_ERR_NOT_SQUARE = 2,
    CST_ERR_NOT_SYMMETRIC = 3,
    CST_ERR_NOT_SPD = 4,          /* not positive definite */
    CST_ERR_NOT_TRACELESS = 5,    /* direction has a nonzero trace */
    CST_ERR_DIM_MISMATCH = 6,
    CST_ERR_DET_MISMATCH = 7,     /* determinants differ: not a correlation stress */
    CST_ERR_SINGULAR = 8,         /* change-of-basis matrix not invertible */
    CST_ERR_BAD_INDICES = 9,
    CST_ERR_BAD_GENERATOR = 10,   /* generator spec string does not parse */
    CST_ERR_NONPOS_VOL = 11,
    CST_ERR_DEGENERATE = 12,      /* repeated eigenvalues where a gap is required */
    CST_ERR_STRESS_TOO_LARGE = 13,/* stressed eigenvalue crossed zero */
    CST_ERR_NOT_ANTISYMMETRIC = 14,
    CST_ERR_NON_SPD_PATH = 15,    /* path left the SPD cone during quadrature */
    CST_ERR_INFEASIBLE = 16,      /* no SPD completion exists */
    CST_ERR_NOT_CONVERGED = 17,   /* optimizer hit its budget; partial result */
    CST_ERR_BAD_SPEC = 18,        /* malformed completion spec */
    CST_ERR_INVALID_ARG = 19,     /* null pointer or out-of-range argument */
    CST_ERR_INTERNAL = 20
} cst_status;

typedef struct cst_matrix cst_matrix;         /* validated SPD matrix */
typedef struct cst_direction cst_direction;   /* symmetric stress generator */
typedef struct cst_completion cst_completion; /* completion result */

const char* cst_version(void);

/* Thread-local message for the most recent failure in this thread. */
const char* cst_last_error(void);

/* ---- SPD matrices ---------------------------------------------------- */

/* rel_tol <= 0 selects the default 1e-12 relative eigenvalue floor. */
cst_status cst_matrix_create(int n, const double* entries, double rel_tol,
                             cst_matrix** out);
cst_status cst_matrix_load(const char* path, double rel_tol, cst_matrix** out);
/* as_csv != 0 writes CSV, otherwise JSON; display_scale divides entries. */
cst_status cst_matrix_save(const cst_matrix* m, const char* path,
                           double display_scale, int as_csv);
void cst_matrix_free(cst_matrix* m);

int cst_matrix_dim(const cst_matrix* m);
cst_status cst_matrix_entries(const cst_matrix* m, double* out);      /* n*n */
cst_status cst_matrix_eigenvalues(const cst_matrix* m, double* out);  /* n, descending */
cst_status cst_matrix_det(const cst_matrix* m, double* out);
cst_status cst_matrix_entropy(const cst_matrix* m, double* out);
/* corr is n*n (unit diagonal), vols is n; either may be NULL to skip. */
cst_status cst_matrix_cov_to_corr(const cst_matrix* m, double* corr, double* vols);

cst_status cst_spd_sqrt(const cst_matrix* m, cst_matrix** out);
cst_status cst_spd_inv_sqrt(const cst_matrix* m, cst_matrix** out);
/* log of an SPD matrix is symmetric with arbitrary trace. */
cst_status cst_spd_log(const cst_matrix* m, cst_direction** out);
/* V^T S V for invertible V (row-major n*n). */
cst_status cst_congruence(const cst_matrix* m, const double* v, cst_matrix** out);
/* V with congruence(s2, V) == s1; out is row-major n*n. */
cst_status cst_equalizing_basis(const cst_matrix* s1, const cst_matrix* s2,
                                double* out);

/* ---- Stress directions ------------------------------------------------ */

/* Symmetrizes the input; rejects a nonzero trace unless allow_trace. */
cst_status cst_direction_create(int n, const double* entries, int allow_trace,
                                cst_direction** out);
/* JSON/CSV file; traceless validation as above. */
cst_status cst_direction_load(const char* path, int allow_trace, cst_direction** out);
/* Mini-language: "pair:i,j" | "diag:i,j" | "row:i" | "all" | "file:<path>". */
cst_status cst_direction_generator(const char* spec, int n, cst_direction** out);
void cst_direction_free(cst_direction* d);

int cst_direction_dim(const cst_direction* d);
cst_status cst_direction_entries(const cst_direction* d, double* out);
cst_status cst_direction_eigenvalues(const cst_direction* d, double* out);
cst_status cst_direction_trace(const cst_direction* d, double* out);
/* exp of a symmetric matrix (always SPD). */
cst_status cst_direction_exp(const cst_direction* d, double t, cst_matrix** out);

/* ---- Fisher-Rao geometry ---------------------------------------------- */

cst_status cst_rao_distance(const cst_matrix* a, const cst_matrix* b, double* out);
/* Point at parameter t on the geodesic from a (t=0) to b (t=1). */
cst_status cst_geodesic_point(const cst_matrix* a, const cst_matrix* b, double t,
                              cst_matrix** out);
/* Sigma(t) = S^{1/2} exp(tX) S^{1/2}. */
cst_status cst_exp_map(const cst_matrix* base, const cst_direction* x, double t,
                       cst_matrix** out);
/* X with exp_map(a, X, 1) == b; requires matching determinants unless
 * allow_det_mismatch (the override direction carries the trace). */
cst_status cst_log_map(const cst_matrix* a, const cst_matrix* b,
                       int allow_det_mismatch, cst_direction** out);
cst_status cst_tangent_inner(const cst_direction* x, const cst_direction* y,
                             double* out);
/* |t| sqrt(0.5 sum x_i^2); base-independent. */
cst_status cst_stress_distance(const cst_direction* x, double t, double* out);
cst_status cst_plausibility(const cst_direction* x, double t, double* out);
cst_status cst_mahalanobis(const cst_matrix* m, const double* x, double* out);

/* Sweep of the stress path: steps+1 rows for t in [0, t_max], each row
 * (t, distance, plausibility, eig_1..eig_n descending, det), so the buffer
 * holds (steps+1)*(n+4) doubles. Eigenvalues and det come from the evaluated
 * matrix; distance is the exact closed form along the path. */
cst_status cst_path_samples(const cst_matrix* base, const cst_direction* x,
                            double t_max, int steps, double* out);
/* Full matrix at one sweep point (row-major n*n). */
cst_status cst_path_point(const cst_matrix* base, const cst_direction* x, double t,
                          double* out);

/* ---- Generators -------------------------------------------------------- */

/* Closed-form exp(t X) for "pair:i,j" | "diag:i,j" | "row:i" | "all". */
cst_status cst_closed_form_exp(const char* spec, int n, double t, cst_matrix** out);
/* Stressed covariance for a pair stress on a diagonal base given vols. */
cst_status cst_pair_stress(const double* vols, int n, int i, int j, double t,
                           cst_matrix** out);
/* Trace-preserving one-parameter eigenvalue stress (distinct inputs only). */
cst_status cst_lawley_stress(const double* eigs, int n, double s, double* out);
/* First/second derivatives at t=0 of the eigenvalues of a path A(t) with
 * A(0)=base, given Adot and Addot (row-major symmetric). Outputs align with
 * the base spectrum (descending); either output may be NULL. */
cst_status cst_eig_derivatives(const cst_matrix* base, const double* adot,
                               const double* addot, double* first, double* second);

/* ---- Isospectral paths -------------------------------------------------- */

/* exp(tA) base exp(tA)^T for antisymmetric A (row-major n*n). */
cst_status cst_isospectral_point(const cst_matrix* base, const double* a, double t,
                                 cst_matrix** out);
/* Numeric Rao length of the isospectral path over [t0, t1]. */
cst_status cst_isospectral_length(const cst_matrix* base, const double* a, double t0,
                                  double t1, int steps, double* out);
/* Numeric Rao length of a caller-defined path. The callback fills a row-major
 * n*n buffer for the requested t and returns 0 on success. */
typedef int (*cst_path_fn)(double t, double* entries_out, void* user);
cst_status cst_path_length(int n, cst_path_fn evaluator, void* user, double t0,
                           double t1, int steps, double* out);
/* Second derivatives of the eigenvalues along exp_map(base, x, t) at t=0;
 * all-zero only for x = 0. */
cst_status cst_isospectral_obstruction(const cst_matrix* base, const cst_direction* x,
                                       double* out);

/* ---- Completion ---------------------------------------------------------- */

/* spec_json: {"base": <path or inline matrix object>,
 *             "pinned": [{"i":.., "j":.., "value":..}, ...],
 *             "preserve_determinant": true, "restarts": 8, "seed": 42}.
 * base_dir resolves relative base paths; pass NULL or "" for the cwd.
 * CST_ERR_NOT_CONVERGED still produces a result handle. */
cst_status cst_complete(const char* spec_json, const char* base_dir,
                        cst_completion** out);
void cst_completion_free(cst_completion* c);

cst_status cst_completion_target(const cst_completion* c, cst_matrix** out);
cst_status cst_completion_direction(const cst_completion* c, cst_direction** out);
cst_status cst_completion_distance(const cst_completion* c, double* out);
cst_status cst_completion_plausibility(const cst_completion* c, double* out);
long cst_completion_iterations(const cst_completion* c);
int cst_completion_converged(const cst_completion* c);
/* Nonzero when restarts disagreed beyond 1e-3 relative (multiple minima). */
int cst_completion_multiple_minima(const cst_completion* c);

#ifdef __cplusplus
}
#endif

#endif /* CORRSTRESS_H */
