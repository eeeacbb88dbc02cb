#include "weaksym/weaksym.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

#include "weaksym/ising.hpp"
#include "weaksym/kerr.hpp"
#include "weaksym/linalg.hpp"
#include "weaksym/oracle.hpp"

#ifndef WEAKSYM_VERSION_STRING
#define WEAKSYM_VERSION_STRING "0.0.0"
#endif

using weaksym::cplx;
using weaksym::ComplexMatrix;

struct ws_matrix {
  ComplexMatrix m;
};
struct ws_spectrum {
  weaksym::SpectralDecomposition dec;
};
struct ws_multimode {
  weaksym::kerr::MultiModeParams p;
};
struct ws_ising {
  weaksym::ising::IsingParams p;
};
struct ws_ep_list {
  std::vector<weaksym::ising::EpLocation> eps;
};
struct ws_liouvillian {
  weaksym::oracle::DenseLiouvillian L;
};
struct ws_match_report {
  weaksym::MatchReport r;
};

namespace {

thread_local std::string g_last_error;

ws_status fail(ws_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

ws_status map_code(weaksym::ErrorCode c) {
  using weaksym::ErrorCode;
  switch (c) {
    case ErrorCode::kInvalidArgument:
      return WS_INVALID_ARGUMENT;
    case ErrorCode::kDimension:
      return WS_DIMENSION;
    case ErrorCode::kTruncation:
      return WS_TRUNCATION;
    case ErrorCode::kUnsupported:
      return WS_UNSUPPORTED;
    case ErrorCode::kGuard:
      return WS_GUARD;
    case ErrorCode::kNumeric:
      return WS_NUMERIC;
    case ErrorCode::kDegenerate:
      return WS_DEGENERATE;
  }
  return WS_INTERNAL;
}

template <typename F>
ws_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return WS_OK;
  } catch (const weaksym::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(WS_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(WS_INTERNAL, e.what());
  } catch (...) {
    return fail(WS_INTERNAL, "unknown exception");
  }
}

ws_complex to_ws(cplx z) { return {z.real(), z.imag()}; }
cplx from_ws(ws_complex z) { return {z.re, z.im}; }

weaksym::kerr::KerrParams to_kerr(const ws_kerr_params* p) {
  weaksym::kerr::KerrParams k;
  k.omega0 = p->omega0;
  k.U = p->U;
  k.kappa = p->kappa;
  k.n_th = p->n_th;
  k.kappa_phi = p->kappa_phi;
  return k;
}

weaksym::ising::BlockIndex to_block(const weaksym::ising::IsingParams& p, const int* block) {
  weaksym::ising::BlockIndex b;
  b.m.assign(block, block + p.n);
  return b;
}

std::size_t oracle_guard(std::size_t max_superop_dim) {
  return max_superop_dim == 0 ? weaksym::oracle::kDefaultMaxSuperopDim : max_superop_dim;
}

}  // namespace

extern "C" {

const char* ws_version(void) { return WEAKSYM_VERSION_STRING; }

const char* ws_last_error(void) { return g_last_error.c_str(); }

const char* ws_status_string(ws_status status) {
  switch (status) {
    case WS_OK:
      return "ok";
    case WS_INVALID_ARGUMENT:
      return "invalid argument";
    case WS_DIMENSION:
      return "dimension mismatch";
    case WS_TRUNCATION:
      return "truncation too close to cutoff";
    case WS_UNSUPPORTED:
      return "unsupported parameters";
    case WS_GUARD:
      return "size guard";
    case WS_NUMERIC:
      return "numerical failure";
    case WS_DEGENERATE:
      return "degenerate steady state";
    case WS_NULL_POINTER:
      return "null pointer";
    case WS_BUFFER_TOO_SMALL:
      return "buffer too small";
    case WS_OUT_OF_MEMORY:
      return "out of memory";
    case WS_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

#define WS_NEED(ptr)                                                  \
  do {                                                                \
    if ((ptr) == nullptr) return fail(WS_NULL_POINTER, "null " #ptr); \
  } while (0)

ws_status ws_matrix_create(size_t rows, size_t cols, ws_matrix** out) {
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] { *out = new ws_matrix{ComplexMatrix(rows, cols)}; });
}

ws_status ws_matrix_from_data(size_t rows, size_t cols, const ws_complex* data, ws_matrix** out) {
  WS_NEED(out);
  *out = nullptr;
  if (rows * cols > 0) WS_NEED(data);
  return guarded([&] {
    std::vector<cplx> v(rows * cols);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = from_ws(data[k]);
    *out = new ws_matrix{ComplexMatrix(rows, cols, std::move(v))};
  });
}

void ws_matrix_free(ws_matrix* m) { delete m; }

ws_status ws_matrix_shape(const ws_matrix* m, size_t* rows, size_t* cols) {
  WS_NEED(m);
  if (rows) *rows = m->m.rows();
  if (cols) *cols = m->m.cols();
  return WS_OK;
}

ws_status ws_matrix_get(const ws_matrix* m, size_t row, size_t col, ws_complex* out) {
  WS_NEED(m);
  WS_NEED(out);
  if (row >= m->m.rows() || col >= m->m.cols())
    return fail(WS_DIMENSION, "matrix index out of range");
  *out = to_ws(m->m(row, col));
  return WS_OK;
}

ws_status ws_matrix_set(ws_matrix* m, size_t row, size_t col, ws_complex value) {
  WS_NEED(m);
  if (row >= m->m.rows() || col >= m->m.cols())
    return fail(WS_DIMENSION, "matrix index out of range");
  m->m(row, col) = from_ws(value);
  return WS_OK;
}

ws_status ws_matrix_copy_data(const ws_matrix* m, ws_complex* out, size_t capacity) {
  WS_NEED(m);
  WS_NEED(out);
  if (capacity < m->m.size()) return fail(WS_BUFFER_TOO_SMALL, "buffer too small");
  const auto d = m->m.data();
  for (std::size_t k = 0; k < d.size(); ++k) out[k] = to_ws(d[k]);
  return WS_OK;
}

ws_status ws_eig(const ws_matrix* m, ws_spectrum** out) {
  WS_NEED(m);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] { *out = new ws_spectrum{weaksym::eig_nonhermitian(m->m)}; });
}

void ws_spectrum_free(ws_spectrum* s) { delete s; }

ws_status ws_spectrum_size(const ws_spectrum* s, size_t* n) {
  WS_NEED(s);
  WS_NEED(n);
  *n = s->dec.eigenvalues.size();
  return WS_OK;
}

ws_status ws_spectrum_entry(const ws_spectrum* s, size_t k, ws_complex* eigenvalue,
                            double* overlap, int* defective) {
  WS_NEED(s);
  if (k >= s->dec.eigenvalues.size()) return fail(WS_DIMENSION, "spectrum index out of range");
  if (eigenvalue) *eigenvalue = to_ws(s->dec.eigenvalues[k]);
  if (overlap) *overlap = s->dec.overlap.empty() ? 0.0 : s->dec.overlap[k];
  if (defective) *defective = s->dec.defective.empty() ? 0 : int(s->dec.defective[k]);
  return WS_OK;
}

ws_status ws_expm(const ws_matrix* m, double t, ws_matrix** out) {
  WS_NEED(m);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] { *out = new ws_matrix{weaksym::expm(m->m, t)}; });
}

ws_status ws_kerr_gamma(const ws_kerr_params* p, int m, ws_complex* out) {
  WS_NEED(p);
  WS_NEED(out);
  return guarded([&] { *out = to_ws(weaksym::kerr::gamma_m(to_kerr(p), m)); });
}

ws_status ws_kerr_sector_rates(const ws_kerr_params* p, int m, ws_complex* gamma,
                               double* u_tilde, double* kappa_tilde) {
  WS_NEED(p);
  return guarded([&] {
    const auto r = weaksym::kerr::sector_rates(to_kerr(p), m);
    if (gamma) *gamma = to_ws(r.gamma);
    if (u_tilde) *u_tilde = r.u_tilde;
    if (kappa_tilde) *kappa_tilde = r.kappa_tilde;
  });
}

ws_status ws_kerr_eigenvalue(const ws_kerr_params* p, int m, int mu, ws_complex* out) {
  WS_NEED(p);
  WS_NEED(out);
  return guarded([&] { *out = to_ws(weaksym::kerr::kerr_eigenvalue(to_kerr(p), {m, mu})); });
}

ws_status ws_kerr_eigenpair(const ws_kerr_params* p, int m, int mu, size_t cutoff,
                            ws_complex* lambda, ws_matrix** right, ws_matrix** left) {
  WS_NEED(p);
  if (right) *right = nullptr;
  if (left) *left = nullptr;
  return guarded([&] {
    auto e = weaksym::kerr::kerr_eigenpair(to_kerr(p), {m, mu}, cutoff);
    if (lambda) *lambda = to_ws(e.lambda);
    if (right) *right = new ws_matrix{std::move(e.right)};
    if (left) {
      try {
        *left = new ws_matrix{std::move(e.left)};
      } catch (...) {
        if (right) {
          delete *right;
          *right = nullptr;
        }
        throw;
      }
    }
  });
}

ws_status ws_kerr_green_time(const ws_kerr_params* p, const double* t, size_t n,
                             ws_complex* out) {
  WS_NEED(p);
  if (n > 0) {
    WS_NEED(t);
    WS_NEED(out);
  }
  return guarded([&] {
    const auto k = to_kerr(p);
    for (std::size_t i = 0; i < n; ++i) out[i] = to_ws(weaksym::kerr::retarded_green_time(k, t[i]));
  });
}

ws_status ws_kerr_green_freq(const ws_kerr_params* p, const double* omega, size_t n,
                             ws_complex* out) {
  WS_NEED(p);
  if (n > 0) {
    WS_NEED(omega);
    WS_NEED(out);
  }
  return guarded([&] {
    const auto g =
        weaksym::kerr::retarded_green_freq(to_kerr(p), std::span<const double>(omega, n));
    for (std::size_t i = 0; i < n; ++i) out[i] = to_ws(g[i]);
  });
}

ws_status ws_multimode_create(const ws_kerr_params* modes, size_t n_modes,
                              const double* cross_kerr, ws_multimode** out) {
  WS_NEED(out);
  *out = nullptr;
  WS_NEED(modes);
  WS_NEED(cross_kerr);
  return guarded([&] {
    weaksym::kerr::MultiModeParams mp;
    for (std::size_t a = 0; a < n_modes; ++a) mp.modes.push_back(to_kerr(&modes[a]));
    mp.cross_kerr.assign(cross_kerr, cross_kerr + n_modes * n_modes);
    mp.validate();
    *out = new ws_multimode{std::move(mp)};
  });
}

void ws_multimode_free(ws_multimode* mm) { delete mm; }

ws_status ws_multimode_eigenvalue(const ws_multimode* mm, const int* m, const int* mu,
                                  ws_complex* out) {
  WS_NEED(mm);
  WS_NEED(m);
  WS_NEED(mu);
  WS_NEED(out);
  return guarded([&] {
    const std::size_t n = mm->p.size();
    *out = to_ws(weaksym::kerr::multimode_eigenvalue(mm->p, std::span<const int>(m, n),
                                                     std::span<const int>(mu, n)));
  });
}

ws_status ws_ising_create(size_t n, const double* J, const double* h, const double* gamma_minus,
                          const double* gamma_plus, const double* gamma_phi, ws_ising** out) {
  WS_NEED(out);
  *out = nullptr;
  WS_NEED(J);
  WS_NEED(h);
  WS_NEED(gamma_minus);
  WS_NEED(gamma_plus);
  WS_NEED(gamma_phi);
  return guarded([&] {
    weaksym::ising::IsingParams p;
    p.n = n;
    p.J.assign(J, J + n * n);
    p.h.assign(h, h + n);
    p.gamma_minus.assign(gamma_minus, gamma_minus + n);
    p.gamma_plus.assign(gamma_plus, gamma_plus + n);
    p.gamma_phi.assign(gamma_phi, gamma_phi + n);
    p.validate();
    *out = new ws_ising{std::move(p)};
  });
}

ws_status ws_ising_random(size_t n, uint64_t seed, ws_ising** out) {
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] { *out = new ws_ising{weaksym::ising::random_params(n, seed)}; });
}

void ws_ising_free(ws_ising* s) { delete s; }

ws_status ws_ising_params(const ws_ising* s, size_t* n, double* J, double* h,
                          double* gamma_minus, double* gamma_plus, double* gamma_phi) {
  WS_NEED(s);
  const auto& p = s->p;
  if (n) *n = p.n;
  if (J) std::copy(p.J.begin(), p.J.end(), J);
  if (h) std::copy(p.h.begin(), p.h.end(), h);
  if (gamma_minus) std::copy(p.gamma_minus.begin(), p.gamma_minus.end(), gamma_minus);
  if (gamma_plus) std::copy(p.gamma_plus.begin(), p.gamma_plus.end(), gamma_plus);
  if (gamma_phi) std::copy(p.gamma_phi.begin(), p.gamma_phi.end(), gamma_phi);
  return WS_OK;
}

ws_status ws_ising_spectrum(const ws_ising* s, ws_active_sign sign, ws_complex* lambda,
                            int* blocks, int* branches, size_t capacity, size_t* count) {
  WS_NEED(s);
  WS_NEED(count);
  const std::size_t n = s->p.n;
  if (n > weaksym::ising::kDefaultSpectrumGuard)
    return fail(WS_GUARD, "ising spectrum: n = " + std::to_string(n) + " exceeds the guard of " +
                              std::to_string(weaksym::ising::kDefaultSpectrumGuard));
  const std::size_t total = std::size_t{1} << (2 * n);
  *count = total;
  if (capacity < total) return fail(WS_BUFFER_TOO_SMALL, "spectrum needs 4^n entries");
  WS_NEED(lambda);
  return guarded([&] {
    const auto sgn = sign == WS_SIGN_PRINTED ? weaksym::ising::ActiveSign::kPrinted
                                             : weaksym::ising::ActiveSign::kTraceConsistent;
    std::size_t k = 0;
    weaksym::ising::visit_spectrum(
        s->p,
        [&](const weaksym::ising::BlockSpectrum& e) {
          lambda[k] = to_ws(e.lambda_total);
          std::size_t a = 0;
          for (std::size_t j = 0; j < n; ++j) {
            if (blocks) blocks[k * n + j] = e.block.m[j];
            if (branches) {
              int b = 0;
              if (e.block.m[j] == 0)
                b = e.chi[a++] == weaksym::ising::Branch::kPlus ? 1 : -1;
              branches[k * n + j] = b;
            }
          }
          ++k;
        },
        weaksym::ising::kDefaultSpectrumGuard, sgn);
  });
}

ws_status ws_ising_spin_eigenvalue(const ws_ising* s, const int* block, size_t spin,
                                   ws_branch branch, ws_complex* out) {
  WS_NEED(s);
  WS_NEED(block);
  WS_NEED(out);
  return guarded([&] {
    *out = to_ws(weaksym::ising::spin_eigenvalue(
        s->p, to_block(s->p, block), spin,
        branch == WS_BRANCH_MINUS ? weaksym::ising::Branch::kMinus
                                  : weaksym::ising::Branch::kPlus));
  });
}

ws_status ws_ising_active_matrix(const ws_ising* s, const int* block, size_t spin,
                                 ws_matrix** out) {
  WS_NEED(s);
  WS_NEED(block);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] {
    const auto b = to_block(s->p, block);
    if (spin >= s->p.n || b.m[spin] != 0)
      throw weaksym::Error(weaksym::ErrorCode::kInvalidArgument,
                           "ising active matrix: spin is not active in this block");
    *out = new ws_matrix{
        weaksym::ising::active_spin_matrix(s->p, spin, weaksym::ising::j_eff(s->p, b, spin))};
  });
}

ws_status ws_ising_coherence(const ws_ising* s, size_t spin, const double* t, size_t n,
                             ws_complex* out) {
  WS_NEED(s);
  if (n > 0) {
    WS_NEED(t);
    WS_NEED(out);
  }
  return guarded([&] {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = to_ws(weaksym::ising::single_spin_coherence(s->p, spin, t[i]));
  });
}

ws_status ws_ising_evolve(const ws_ising* s, const ws_matrix* rho0, double t, ws_matrix** out) {
  WS_NEED(s);
  WS_NEED(rho0);
  WS_NEED(out);
  *out = nullptr;
  return guarded(
      [&] { *out = new ws_matrix{weaksym::ising::evolve_density_matrix(s->p, rho0->m, t)}; });
}

ws_status ws_ising_detect_eps(const ws_ising* s, double tol, ws_ep_list** out) {
  WS_NEED(s);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] { *out = new ws_ep_list{weaksym::ising::detect_eps(s->p, tol)}; });
}

void ws_ep_list_free(ws_ep_list* l) { delete l; }

ws_status ws_ep_list_size(const ws_ep_list* l, size_t* count) {
  WS_NEED(l);
  WS_NEED(count);
  *count = l->eps.size();
  return WS_OK;
}

ws_status ws_ep_list_entry(const ws_ep_list* l, size_t k, int* block, size_t* spin) {
  WS_NEED(l);
  if (k >= l->eps.size()) return fail(WS_DIMENSION, "ep index out of range");
  const auto& e = l->eps[k];
  if (block) std::copy(e.block.m.begin(), e.block.m.end(), block);
  if (spin) *spin = e.spin;
  return WS_OK;
}

ws_status ws_oracle_kerr(const ws_kerr_params* p, size_t cutoff, size_t max_superop_dim,
                         ws_liouvillian** out) {
  WS_NEED(p);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] {
    *out = new ws_liouvillian{
        weaksym::oracle::build_kerr_liouvillian(to_kerr(p), cutoff, oracle_guard(max_superop_dim))};
  });
}

ws_status ws_oracle_multimode(const ws_multimode* mm, const size_t* cutoffs,
                              size_t max_superop_dim, ws_liouvillian** out) {
  WS_NEED(mm);
  WS_NEED(cutoffs);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] {
    *out = new ws_liouvillian{weaksym::oracle::build_multimode_liouvillian(
        mm->p, std::span<const std::size_t>(cutoffs, mm->p.size()),
        oracle_guard(max_superop_dim))};
  });
}

ws_status ws_oracle_ising(const ws_ising* s, size_t max_superop_dim, ws_liouvillian** out) {
  WS_NEED(s);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] {
    *out = new ws_liouvillian{
        weaksym::oracle::build_ising_liouvillian(s->p, oracle_guard(max_superop_dim))};
  });
}

void ws_liouvillian_free(ws_liouvillian* L) { delete L; }

ws_status ws_liouvillian_dims(const ws_liouvillian* L, size_t* hilbert_dim, size_t* superop_dim) {
  WS_NEED(L);
  if (hilbert_dim) *hilbert_dim = L->L.hilbert_dim;
  if (superop_dim) *superop_dim = L->L.dim();
  return WS_OK;
}

ws_status ws_liouvillian_basis_doc(const ws_liouvillian* L, const char** doc) {
  WS_NEED(L);
  WS_NEED(doc);
  *doc = L->L.basis_doc.c_str();
  return WS_OK;
}

ws_status ws_liouvillian_eigenvalues(const ws_liouvillian* L, int blocked, ws_complex* out,
                                     size_t capacity, size_t* count) {
  WS_NEED(L);
  WS_NEED(count);
  *count = L->L.dim();
  if (capacity < L->L.dim()) return fail(WS_BUFFER_TOO_SMALL, "eigenvalue buffer too small");
  WS_NEED(out);
  return guarded([&] {
    const auto ev = blocked ? weaksym::oracle::blocked_eigenvalues(L->L)
                            : weaksym::eigvals(L->L.matrix);
    for (std::size_t k = 0; k < ev.size(); ++k) out[k] = to_ws(ev[k]);
  });
}

ws_status ws_liouvillian_checks(const ws_liouvillian* L, double* symmetry_violation,
                                double* trace_violation) {
  WS_NEED(L);
  return guarded([&] {
    if (symmetry_violation) {
      const auto v = weaksym::oracle::symmetry_violation(L->L);
      *symmetry_violation = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    }
    if (trace_violation) *trace_violation = weaksym::oracle::trace_violation(L->L);
  });
}

ws_status ws_liouvillian_steady_state(const ws_liouvillian* L, ws_matrix** out) {
  WS_NEED(L);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] { *out = new ws_matrix{weaksym::oracle::steady_state(L->L)}; });
}

ws_status ws_liouvillian_evolve(const ws_liouvillian* L, const ws_matrix* rho0, double t,
                                ws_matrix** out) {
  WS_NEED(L);
  WS_NEED(rho0);
  WS_NEED(out);
  *out = nullptr;
  return guarded([&] {
    const double times[1] = {t};
    auto r = weaksym::oracle::evolve(L->L, rho0->m, times);
    *out = new ws_matrix{std::move(r.front())};
  });
}

ws_status ws_oracle_kerr_green(const ws_kerr_params* p, size_t cutoff, const double* t, size_t n,
                               ws_complex* out) {
  WS_NEED(p);
  if (n > 0) {
    WS_NEED(t);
    WS_NEED(out);
  }
  return guarded([&] {
    const auto g = weaksym::oracle::kerr_green_oracle(to_kerr(p), cutoff,
                                                      std::span<const double>(t, n));
    for (std::size_t i = 0; i < n; ++i) out[i] = to_ws(g[i]);
  });
}

ws_status ws_match_spectra(const ws_complex* analytic, size_t n_analytic,
                           const ws_complex* oracle, size_t n_oracle, double tol,
                           ws_match_report** out) {
  WS_NEED(out);
  *out = nullptr;
  if (n_analytic > 0) WS_NEED(analytic);
  if (n_oracle > 0) WS_NEED(oracle);
  return guarded([&] {
    std::vector<cplx> a(n_analytic), o(n_oracle);
    for (std::size_t k = 0; k < n_analytic; ++k) a[k] = from_ws(analytic[k]);
    for (std::size_t k = 0; k < n_oracle; ++k) o[k] = from_ws(oracle[k]);
    *out = new ws_match_report{weaksym::match_spectra(a, o, tol)};
  });
}

void ws_match_report_free(ws_match_report* r) { delete r; }

ws_status ws_match_report_summary(const ws_match_report* r, size_t* matched,
                                  size_t* unmatched_analytic, size_t* unmatched_oracle,
                                  double* max_residual) {
  WS_NEED(r);
  if (matched) *matched = r->r.pairs.size();
  if (unmatched_analytic) *unmatched_analytic = r->r.unmatched_analytic.size();
  if (unmatched_oracle) *unmatched_oracle = r->r.unmatched_oracle.size();
  if (max_residual) *max_residual = r->r.max_residual;
  return WS_OK;
}

ws_status ws_match_report_pair(const ws_match_report* r, size_t k, size_t* analytic_index,
                               size_t* oracle_index, double* residual) {
  WS_NEED(r);
  if (k >= r->r.pairs.size()) return fail(WS_DIMENSION, "pair index out of range");
  const auto& p = r->r.pairs[k];
  if (analytic_index) *analytic_index = p.analytic_index;
  if (oracle_index) *oracle_index = p.oracle_index;
  if (residual) *residual = p.residual;
  return WS_OK;
}

ws_status ws_match_report_unmatched_analytic(const ws_match_report* r, size_t k,
                                             size_t* analytic_index) {
  WS_NEED(r);
  WS_NEED(analytic_index);
  if (k >= r->r.unmatched_analytic.size()) return fail(WS_DIMENSION, "index out of range");
  *analytic_index = r->r.unmatched_analytic[k];
  return WS_OK;
}

}  // extern "C"
