#ifndef WEAKSYM_WEAKSYM_H
#define WEAKSYM_WEAKSYM_H

/* C interface to the weaksym library: closed-form Liouvillian spectra of the
 * Kerr oscillator and the dissipative Ising model, plus the dense reference
 * solver used to check them.
 *
 * Every function returns a ws_status. On failure a message describing the
 * problem is available from ws_last_error() on the same thread until the next
 * call. Handles are opaque and owned by the caller; release them with the
 * matching *_free function (passing NULL is allowed). Matrices are column
 * major. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WEAKSYM_BUILDING_LIBRARY)
#    define WS_API __declspec(dllexport)
#  else
#    define WS_API __declspec(dllimport)
#  endif
#else
#  define WS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ws_status {
  WS_OK = 0,
  WS_INVALID_ARGUMENT = 1,
  WS_DIMENSION = 2,
  WS_TRUNCATION = 3,    /* requested state too close to the Fock cutoff */
  WS_UNSUPPORTED = 4,   /* parameters outside the closed form's domain */
  WS_GUARD = 5,         /* size guard refused the computation */
  WS_NUMERIC = 6,
  WS_DEGENERATE = 7,    /* no unique steady state */
  WS_NULL_POINTER = 8,
  WS_BUFFER_TOO_SMALL = 9,
  WS_OUT_OF_MEMORY = 10,
  WS_INTERNAL = 11
} ws_status;

typedef struct ws_complex {
  double re;
  double im;
} ws_complex;

typedef struct ws_kerr_params {
  double omega0;
  double U;
  double kappa;
  double n_th;
  double kappa_phi;
} ws_kerr_params;

typedef enum ws_branch { WS_BRANCH_PLUS = 1, WS_BRANCH_MINUS = -1 } ws_branch;

/* Active-spin eigenvalue convention; WS_SIGN_PRINTED flips the sign of the
 * leading -Γ term and only exists as a negative control. */
typedef enum ws_active_sign { WS_SIGN_TRACE_CONSISTENT = 0, WS_SIGN_PRINTED = 1 } ws_active_sign;

typedef struct ws_matrix ws_matrix;
typedef struct ws_spectrum ws_spectrum;
typedef struct ws_multimode ws_multimode;
typedef struct ws_ising ws_ising;
typedef struct ws_ep_list ws_ep_list;
typedef struct ws_liouvillian ws_liouvillian;
typedef struct ws_match_report ws_match_report;

WS_API const char* ws_version(void);
WS_API const char* ws_last_error(void);
WS_API const char* ws_status_string(ws_status status);

/* ---- dense matrices ---- */
WS_API ws_status ws_matrix_create(size_t rows, size_t cols, ws_matrix** out);
WS_API ws_status ws_matrix_from_data(size_t rows, size_t cols, const ws_complex* column_major,
                                     ws_matrix** out);
WS_API void ws_matrix_free(ws_matrix* m);
WS_API ws_status ws_matrix_shape(const ws_matrix* m, size_t* rows, size_t* cols);
WS_API ws_status ws_matrix_get(const ws_matrix* m, size_t row, size_t col, ws_complex* out);
WS_API ws_status ws_matrix_set(ws_matrix* m, size_t row, size_t col, ws_complex value);
/* Copies rows*cols entries in column-major order. */
WS_API ws_status ws_matrix_copy_data(const ws_matrix* m, ws_complex* out, size_t capacity);

/* ---- eigendecomposition ---- */
WS_API ws_status ws_eig(const ws_matrix* m, ws_spectrum** out);
WS_API void ws_spectrum_free(ws_spectrum* s);
WS_API ws_status ws_spectrum_size(const ws_spectrum* s, size_t* n);
/* overlap is |<l|r>|/(|l||r|) before normalization; defective is 0 or 1. */
WS_API ws_status ws_spectrum_entry(const ws_spectrum* s, size_t k, ws_complex* eigenvalue,
                                   double* overlap, int* defective);
WS_API ws_status ws_expm(const ws_matrix* m, double t, ws_matrix** out);

/* ---- single Kerr oscillator ---- */
WS_API ws_status ws_kerr_gamma(const ws_kerr_params* p, int m, ws_complex* out);
WS_API ws_status ws_kerr_sector_rates(const ws_kerr_params* p, int m, ws_complex* gamma,
                                      double* u_tilde, double* kappa_tilde);
WS_API ws_status ws_kerr_eigenvalue(const ws_kerr_params* p, int m, int mu, ws_complex* out);
WS_API ws_status ws_kerr_eigenpair(const ws_kerr_params* p, int m, int mu, size_t cutoff,
                                   ws_complex* lambda, ws_matrix** right, ws_matrix** left);
WS_API ws_status ws_kerr_green_time(const ws_kerr_params* p, const double* t, size_t n,
                                    ws_complex* out);
WS_API ws_status ws_kerr_green_freq(const ws_kerr_params* p, const double* omega, size_t n,
                                    ws_complex* out);

/* ---- coupled Kerr modes ---- */
/* cross_kerr is row-major modes x modes. */
WS_API ws_status ws_multimode_create(const ws_kerr_params* modes, size_t n_modes,
                                     const double* cross_kerr, ws_multimode** out);
WS_API void ws_multimode_free(ws_multimode* mm);
WS_API ws_status ws_multimode_eigenvalue(const ws_multimode* mm, const int* m, const int* mu,
                                         ws_complex* out);

/* ---- dissipative Ising model ---- */
/* J is row-major n x n, symmetric with zero diagonal. */
WS_API ws_status ws_ising_create(size_t n, const double* J, const double* h,
                                 const double* gamma_minus, const double* gamma_plus,
                                 const double* gamma_phi, ws_ising** out);
WS_API ws_status ws_ising_random(size_t n, uint64_t seed, ws_ising** out);
WS_API void ws_ising_free(ws_ising* s);
/* Any output pointer may be NULL; arrays have n (n*n for J) entries. */
WS_API ws_status ws_ising_params(const ws_ising* s, size_t* n, double* J, double* h,
                                 double* gamma_minus, double* gamma_plus, double* gamma_phi);
/* All 4^n eigenvalues in block order. `blocks` and `branches` (may be NULL)
 * receive n ints per eigenvalue: the block label m_j and the branch (+1/-1,
 * 0 for frozen spins). `count` is always set to 4^n. */
WS_API ws_status ws_ising_spectrum(const ws_ising* s, ws_active_sign sign, ws_complex* lambda,
                                   int* blocks, int* branches, size_t capacity, size_t* count);
WS_API ws_status ws_ising_spin_eigenvalue(const ws_ising* s, const int* block, size_t spin,
                                          ws_branch branch, ws_complex* out);
/* 2x2 generator of an active spin; fails with WS_INVALID_ARGUMENT if frozen. */
WS_API ws_status ws_ising_active_matrix(const ws_ising* s, const int* block, size_t spin,
                                        ws_matrix** out);
WS_API ws_status ws_ising_coherence(const ws_ising* s, size_t spin, const double* t, size_t n,
                                    ws_complex* out);
WS_API ws_status ws_ising_evolve(const ws_ising* s, const ws_matrix* rho0, double t,
                                 ws_matrix** out);
WS_API ws_status ws_ising_detect_eps(const ws_ising* s, double tol, ws_ep_list** out);
WS_API void ws_ep_list_free(ws_ep_list* l);
WS_API ws_status ws_ep_list_size(const ws_ep_list* l, size_t* count);
/* block receives n ints. */
WS_API ws_status ws_ep_list_entry(const ws_ep_list* l, size_t k, int* block, size_t* spin);

/* ---- dense reference solver ---- */
/* max_superop_dim = 0 selects the default guard (4096). */
WS_API ws_status ws_oracle_kerr(const ws_kerr_params* p, size_t cutoff, size_t max_superop_dim,
                                ws_liouvillian** out);
WS_API ws_status ws_oracle_multimode(const ws_multimode* mm, const size_t* cutoffs,
                                     size_t max_superop_dim, ws_liouvillian** out);
WS_API ws_status ws_oracle_ising(const ws_ising* s, size_t max_superop_dim,
                                 ws_liouvillian** out);
WS_API void ws_liouvillian_free(ws_liouvillian* L);
WS_API ws_status ws_liouvillian_dims(const ws_liouvillian* L, size_t* hilbert_dim,
                                     size_t* superop_dim);
WS_API ws_status ws_liouvillian_basis_doc(const ws_liouvillian* L, const char** doc);
/* blocked != 0 diagonalizes symmetry sector by sector; 0 diagonalizes the
 * full matrix. */
WS_API ws_status ws_liouvillian_eigenvalues(const ws_liouvillian* L, int blocked,
                                            ws_complex* out, size_t capacity, size_t* count);
/* Largest commutator entry with any symmetry generator, and the largest
 * column sum of the trace. */
WS_API ws_status ws_liouvillian_checks(const ws_liouvillian* L, double* symmetry_violation,
                                       double* trace_violation);
WS_API ws_status ws_liouvillian_steady_state(const ws_liouvillian* L, ws_matrix** out);
WS_API ws_status ws_liouvillian_evolve(const ws_liouvillian* L, const ws_matrix* rho0, double t,
                                       ws_matrix** out);
WS_API ws_status ws_oracle_kerr_green(const ws_kerr_params* p, size_t cutoff, const double* t,
                                      size_t n, ws_complex* out);

/* ---- spectrum matching ---- */
WS_API ws_status ws_match_spectra(const ws_complex* analytic, size_t n_analytic,
                                  const ws_complex* oracle, size_t n_oracle, double tol,
                                  ws_match_report** out);
WS_API void ws_match_report_free(ws_match_report* r);
WS_API ws_status ws_match_report_summary(const ws_match_report* r, size_t* matched,
                                         size_t* unmatched_analytic, size_t* unmatched_oracle,
                                         double* max_residual);
/* Pair k in analytic order. */
WS_API ws_status ws_match_report_pair(const ws_match_report* r, size_t k, size_t* analytic_index,
                                      size_t* oracle_index, double* residual);
WS_API ws_status ws_match_report_unmatched_analytic(const ws_match_report* r, size_t k,
                                                    size_t* analytic_index);

#ifdef __cplusplus
}
#endif

#endif
