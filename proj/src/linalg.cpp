#include "weaksym/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <cblas.h>
#include <lapacke.h>

namespace weaksym {

namespace {

void require_finite(std::span<const cplx> v, const char* who) {
  for (const cplx& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorCode::kNumeric, std::string(who) + ": non-finite entry");
    }
  }
}

void require_square(const ComplexMatrix& m, const char* who) {
  if (!m.is_square()) {
    std::ostringstream os;
    os << who << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::kDimension, os.str());
  }
}

double column_norm(std::span<const cplx> c) {
  double s = 0.0;
  for (const cplx& z : c) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::kDimension, "ComplexMatrix: entry count does not match rows*cols");
  }
  require_finite(data_, "ComplexMatrix");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  require_finite(diag, "ComplexMatrix::diagonal");
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  ComplexMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(ErrorCode::kDimension, "from_rows: ragged rows");
    std::size_t j = 0;
    for (const cplx& z : row) m(i, j++) = z;
    ++i;
  }
  require_finite(m.data(), "ComplexMatrix::from_rows");
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t c = 0; c < cols_; ++c)
    for (std::size_t r = 0; r < rows_; ++r) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t c = 0; c < cols_; ++c)
    for (std::size_t r = 0; r < rows_; ++r) out(c, r) = (*this)(r, c);
  return out;
}

cplx ComplexMatrix::trace() const {
  require_square(*this, "trace");
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const { return column_norm(data_); }

double ComplexMatrix::one_norm() const {
  double best = 0.0;
  for (std::size_t c = 0; c < cols_; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
    best = std::max(best, s);
  }
  return best;
}

double ComplexMatrix::max_abs() const {
  double best = 0.0;
  for (const cplx& z : data_) best = std::max(best, std::abs(z));
  return best;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw Error(ErrorCode::kDimension, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw Error(ErrorCode::kDimension, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (cplx& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "matrix product: " << a.rows() << "x" << a.cols() << " times " << b.rows() << "x"
       << b.cols();
    throw Error(ErrorCode::kDimension, os.str());
  }
  ComplexMatrix c(a.rows(), b.cols());
  if (c.size() == 0 || a.cols() == 0) return c;
  const cplx one{1.0, 0.0};
  const cplx zero{0.0, 0.0};
  cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(a.rows()),
              static_cast<int>(b.cols()), static_cast<int>(a.cols()), &one, a.data().data(),
              static_cast<int>(a.rows()), b.data().data(), static_cast<int>(b.rows()), &zero,
              c.data().data(), static_cast<int>(c.rows()));
  return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ac = 0; ac < a.cols(); ++ac)
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
      const cplx s = a(ar, ac);
      if (s == cplx{}) continue;
      for (std::size_t bc = 0; bc < b.cols(); ++bc)
        for (std::size_t br = 0; br < b.rows(); ++br)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

ComplexMatrix vectorize(const ComplexMatrix& rho) {
  require_square(rho, "vectorize");
  // Column-major storage already is the column-stacked vector.
  std::vector<cplx> v(rho.data().begin(), rho.data().end());
  return ComplexMatrix(rho.size(), 1, std::move(v));
}

ComplexMatrix devectorize(std::span<const cplx> column) {
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(column.size()))));
  if (d * d != column.size()) {
    throw Error(ErrorCode::kDimension, "devectorize: length is not a perfect square");
  }
  return ComplexMatrix(d, d, std::vector<cplx>(column.begin(), column.end()));
}

ComplexMatrix devectorize(const ComplexMatrix& column) {
  if (column.cols() != 1) throw Error(ErrorCode::kDimension, "devectorize: expected a column");
  return devectorize(column.data());
}

ComplexMatrix superop_left_right(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "superop_left_right");
  require_square(b, "superop_left_right");
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kDimension, "superop_left_right: operand dimensions differ");
  }
  return kron(b.transpose(), a);
}

ComplexMatrix superop_left(const ComplexMatrix& a) {
  return superop_left_right(a, ComplexMatrix::identity(a.rows()));
}

ComplexMatrix superop_right(const ComplexMatrix& b) {
  return superop_left_right(ComplexMatrix::identity(b.rows()), b);
}

ComplexMatrix dissipator(const ComplexMatrix& x) {
  const ComplexMatrix xdx = x.adjoint() * x;
  ComplexMatrix d = superop_left_right(x, x.adjoint());
  d -= 0.5 * superop_left(xdx);
  d -= 0.5 * superop_right(xdx);
  return d;
}

cplx inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimension, "inner: shape mismatch");
  }
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.data()[i]) * b.data()[i];
  return s;
}

// ---------------------------------------------------------------------------
// Eigensolvers

bool SpectralDecomposition::any_defective() const {
  return std::any_of(defective.begin(), defective.end(), [](bool b) { return b; });
}

namespace {

void raise_eig_failure(const ComplexMatrix& m, lapack_int info, const char* routine) {
  std::ostringstream os;
  os << routine << " failed (info=" << info << ") on a " << m.rows() << "x" << m.cols()
     << " matrix with Frobenius norm " << m.frobenius_norm() << " and max entry " << m.max_abs();
  throw Error(ErrorCode::kNumeric, os.str());
}

double smallest_singular_value(ComplexMatrix s) {
  const auto k = static_cast<lapack_int>(s.rows());
  std::vector<double> sv(static_cast<std::size_t>(k));
  std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(1, k - 1)));
  const lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', k, k, s.data().data(), k,
                                         sv.data(), nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) raise_eig_failure(s, info, "zgesvd");
  return sv.back();
}

// A Jordan block reaches zgeev as a pair split by ~sqrt(eps) whose vectors
// overlap at the same order, so the overlap alone cannot separate it from a
// genuine near-coincidence. Recount the geometric multiplicity at the cluster
// mean from the singular values of (A - μ); if it is short of the cluster size
// the cluster is defective, and the overlap of the exact null vectors is
// returned. Otherwise -1.
double cluster_null_overlap(const ComplexMatrix& m, const std::vector<cplx>& ev,
                            const std::vector<std::size_t>& group, double scale) {
  const auto n = static_cast<lapack_int>(m.rows());
  cplx mean = 0.0;
  for (std::size_t j : group) mean += ev[j];
  mean /= double(group.size());
  ComplexMatrix shifted = m;
  for (std::size_t i = 0; i < m.rows(); ++i) shifted(i, i) -= mean;
  std::vector<double> sv(m.rows());
  std::vector<double> superb(std::max<std::size_t>(1, m.rows()));
  ComplexMatrix u(m.rows(), m.rows()), vt(m.rows(), m.rows());
  const lapack_int info =
      LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'A', 'A', n, n, shifted.data().data(), n, sv.data(),
                     u.data().data(), n, vt.data().data(), n, superb.data());
  if (info != 0) raise_eig_failure(m, info, "zgesvd");
  const double tau = 1e-10 * scale;
  std::size_t g = 0;
  for (double x : sv) g += x < tau ? 1 : 0;
  if (g == 0 || g >= group.size()) return -1.0;
  // Null vectors are the last g columns of U (left) and of V = vt^†.
  ComplexMatrix s(g, g);
  const std::size_t first = m.rows() - g;
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i)
        acc += std::conj(u(i, first + a)) * std::conj(vt(first + b, i));
      s(a, b) = acc;
    }
  return smallest_singular_value(s);
}

// Groups indices whose eigenvalues lie within `radius` of each other
// (transitively).
std::vector<std::vector<std::size_t>> cluster_eigenvalues(const std::vector<cplx>& ev,
                                                          double radius) {
  const std::size_t n = ev.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ev[a].real() < ev[b].real(); });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (ev[order[b]].real() - ev[order[a]].real() > radius) break;
      if (std::abs(ev[order[a]] - ev[order[b]]) <= radius) {
        parent[find(order[a])] = find(order[b]);
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == n) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

}  // namespace

std::vector<cplx> eigvals(const ComplexMatrix& m) {
  EigOptions opts;
  opts.compute_vectors = false;
  return eig_nonhermitian(m, opts).eigenvalues;
}

SpectralDecomposition eig_nonhermitian(const ComplexMatrix& m, const EigOptions& opts) {
  require_square(m, "eig_nonhermitian");
  if (!m.all_finite()) throw Error(ErrorCode::kNumeric, "eig_nonhermitian: non-finite input");
  const auto n = static_cast<lapack_int>(m.rows());
  SpectralDecomposition out;
  if (n == 0) return out;

  ComplexMatrix work = m;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  const char jobv = opts.compute_vectors ? 'V' : 'N';
  ComplexMatrix vl(opts.compute_vectors ? m.rows() : 1, opts.compute_vectors ? m.rows() : 1);
  ComplexMatrix vr(vl.rows(), vl.cols());
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, jobv, jobv, n, work.data().data(), n, out.eigenvalues.data(),
      vl.data().data(), static_cast<lapack_int>(vl.rows()), vr.data().data(),
      static_cast<lapack_int>(vr.rows()));
  if (info != 0) raise_eig_failure(m, info, "zgeev");
  if (!opts.compute_vectors) return out;

  const auto un = static_cast<std::size_t>(n);
  out.overlap.assign(un, 0.0);
  out.defective.assign(un, false);

  const double scale = std::max(1.0, m.max_abs());
  for (const auto& group : cluster_eigenvalues(out.eigenvalues, opts.cluster_radius * scale)) {
    const std::size_t k = group.size();
    ComplexMatrix s(k, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        cplx acc = 0.0;
        const auto la = vl.column(group[a]);
        const auto rb = vr.column(group[b]);
        for (std::size_t i = 0; i < un; ++i) acc += std::conj(la[i]) * rb[i];
        s(a, b) = acc;
      }
    if (k == 1) {
      const std::size_t j = group[0];
      const double ov = std::abs(s(0, 0));
      out.overlap[j] = ov;
      if (ov < opts.defect_threshold) {
        out.defective[j] = true;
        continue;
      }
      const cplx f = 1.0 / std::conj(s(0, 0));
      for (std::size_t i = 0; i < un; ++i) vl(i, j) *= f;
      continue;
    }
    double smin = smallest_singular_value(s);
    if (smin < 1e2 * opts.defect_threshold) {
      const double refined = cluster_null_overlap(m, out.eigenvalues, group, scale);
      if (refined >= 0.0) smin = std::min(smin, refined);
    }
    for (std::size_t j : group) out.overlap[j] = smin;
    if (smin < opts.defect_threshold) {
      for (std::size_t j : group) out.defective[j] = true;
      continue;
    }
    // L_c <- L_c S^{-†} so that L_c^† R_c = I.
    const ComplexMatrix sinv_adj = solve(s, ComplexMatrix::identity(k)).adjoint();
    ComplexMatrix lc(un, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t i = 0; i < un; ++i) lc(i, a) = vl(i, group[a]);
    const ComplexMatrix lnew = lc * sinv_adj;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t i = 0; i < un; ++i) vl(i, group[a]) = lnew(i, a);
  }

  // Residuals.
  const ComplexMatrix mr = m * vr;
  const ComplexMatrix mhl = m.adjoint() * vl;
  out.right_residual.resize(un);
  out.left_residual.resize(un);
  for (std::size_t j = 0; j < un; ++j) {
    const cplx lam = out.eigenvalues[j];
    double rr = 0.0, ll = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      rr += std::norm(mr(i, j) - lam * vr(i, j));
      ll += std::norm(mhl(i, j) - std::conj(lam) * vl(i, j));
    }
    out.right_residual[j] = std::sqrt(rr) / column_norm(vr.column(j));
    out.left_residual[j] = std::sqrt(ll) / column_norm(vl.column(j));
  }
  out.right_vectors = std::move(vr);
  out.left_vectors = std::move(vl);
  return out;
}

std::vector<double> eigvals_hermitian(const ComplexMatrix& m) {
  require_square(m, "eigvals_hermitian");
  ComplexMatrix work = m;
  const auto n = static_cast<lapack_int>(m.rows());
  std::vector<double> w(m.rows());
  if (n == 0) return w;
  const lapack_int info =
      LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'U', n, work.data().data(), n, w.data());
  if (info != 0) raise_eig_failure(m, info, "zheev");
  return w;
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "solve");
  if (b.rows() != a.rows()) throw Error(ErrorCode::kDimension, "solve: rhs row mismatch");
  ComplexMatrix lu = a;
  ComplexMatrix x = b;
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<lapack_int> piv(a.rows());
  const lapack_int info =
      LAPACKE_zgesv(LAPACK_COL_MAJOR, n, static_cast<lapack_int>(b.cols()), lu.data().data(), n,
                    piv.data(), x.data().data(), n);
  if (info != 0) {
    std::ostringstream os;
    os << "zgesv failed (info=" << info << "): matrix is singular to working precision";
    throw Error(ErrorCode::kNumeric, os.str());
  }
  return x;
}

// ---------------------------------------------------------------------------
// Matrix exponential (Higham 2005, scaling and squaring).

namespace {

constexpr double kPade3[] = {120.0, 60.0, 12.0, 1.0};
constexpr double kPade5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr double kPade7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                             25200.0,    1512.0,    56.0,      1.0};
constexpr double kPade9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                             2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};

ComplexMatrix axpy_sum(std::initializer_list<std::pair<double, const ComplexMatrix*>> terms,
                       std::size_t n) {
  ComplexMatrix out(n, n);
  for (const auto& [c, m] : terms) {
    if (m == nullptr) {
      for (std::size_t i = 0; i < n; ++i) out(i, i) += c;
    } else {
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += c * m->data()[i];
    }
  }
  return out;
}

// Returns the rational approximant (V - U)^{-1}(V + U) for the given degree.
ComplexMatrix pade(const ComplexMatrix& a, int degree) {
  const std::size_t n = a.rows();
  const ComplexMatrix a2 = a * a;
  ComplexMatrix u, v;
  if (degree <= 9) {
    const double* b = degree == 3 ? kPade3 : degree == 5 ? kPade5 : degree == 7 ? kPade7 : kPade9;
    std::vector<ComplexMatrix> pw;  // A^2, A^4, ...
    pw.push_back(a2);
    for (int k = 4; k < degree; k += 2) pw.push_back(pw.back() * a2);
    ComplexMatrix uu = ComplexMatrix::identity(n);
    uu *= b[1];
    ComplexMatrix vv = ComplexMatrix::identity(n);
    vv *= b[0];
    for (std::size_t k = 0; k < pw.size(); ++k) {
      const double bu = b[2 * k + 3];
      const double bv = b[2 * k + 2];
      for (std::size_t i = 0; i < uu.size(); ++i) {
        uu.data()[i] += bu * pw[k].data()[i];
        vv.data()[i] += bv * pw[k].data()[i];
      }
    }
    u = a * uu;
    v = std::move(vv);
  } else {
    const double* b = kPade13;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a4 * a2;
    const ComplexMatrix inner_u = axpy_sum({{b[13], &a6}, {b[11], &a4}, {b[9], &a2}}, n);
    ComplexMatrix tu = a6 * inner_u;
    tu += axpy_sum({{b[7], &a6}, {b[5], &a4}, {b[3], &a2}, {b[1], nullptr}}, n);
    u = a * tu;
    const ComplexMatrix inner_v = axpy_sum({{b[12], &a6}, {b[10], &a4}, {b[8], &a2}}, n);
    v = a6 * inner_v;
    v += axpy_sum({{b[6], &a6}, {b[4], &a4}, {b[2], &a2}, {b[0], nullptr}}, n);
  }
  return solve(v - u, v + u);
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& m, double t) {
  require_square(m, "expm");
  if (!std::isfinite(t)) throw Error(ErrorCode::kInvalidArgument, "expm: non-finite time");
  const std::size_t n = m.rows();
  if (n == 0) return ComplexMatrix();
  ComplexMatrix a = cplx{t, 0.0} * m;
  const double norm = a.one_norm();
  if (!std::isfinite(norm) || norm > 1e12) {
    std::ostringstream os;
    os << "expm: ||M t||_1 = " << norm << " is too large for scaling and squaring";
    throw Error(ErrorCode::kNumeric, os.str());
  }
  if (norm == 0.0) return ComplexMatrix::identity(n);

  constexpr double theta[] = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                              2.097847961257068e0};
  constexpr int degrees[] = {3, 5, 7, 9};
  for (int k = 0; k < 4; ++k) {
    if (norm <= theta[k]) return pade(a, degrees[k]);
  }
  constexpr double theta13 = 5.371920351148152;
  int s = 0;
  if (norm > theta13) s = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  a *= std::ldexp(1.0, -s);
  ComplexMatrix r = pade(a, 13);
  for (int k = 0; k < s; ++k) r = r * r;
  if (!r.all_finite()) throw Error(ErrorCode::kNumeric, "expm: result overflowed");
  return r;
}

// ---------------------------------------------------------------------------

MatchReport match_spectra(std::span<const cplx> analytic, std::span<const cplx> oracle,
                          double tol) {
  struct Candidate {
    double dist;
    std::uint32_t a;
    std::uint32_t o;
  };
  std::vector<Candidate> cand;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    for (std::size_t j = 0; j < oracle.size(); ++j) {
      const double d = std::abs(analytic[i] - oracle[j]);
      if (d <= tol) {
        cand.push_back({d, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
  // Ties inside numerically degenerate clusters resolve by imaginary part so
  // the pairing is reproducible.
  std::sort(cand.begin(), cand.end(), [&](const Candidate& x, const Candidate& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    if (x.a != y.a) return analytic[x.a].imag() < analytic[y.a].imag() ||
                           (analytic[x.a].imag() == analytic[y.a].imag() && x.a < y.a);
    return oracle[x.o].imag() < oracle[y.o].imag() ||
           (oracle[x.o].imag() == oracle[y.o].imag() && x.o < y.o);
  });
  std::vector<bool> used_a(analytic.size(), false), used_o(oracle.size(), false);
  std::vector<std::size_t> partner(analytic.size(), oracle.size());
  for (const Candidate& c : cand) {
    if (used_a[c.a] || used_o[c.o]) continue;
    used_a[c.a] = used_o[c.o] = true;
    partner[c.a] = c.o;
  }
  MatchReport rep;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (partner[i] == oracle.size()) {
      rep.unmatched_analytic.push_back(i);
      continue;
    }
    const double d = std::abs(analytic[i] - oracle[partner[i]]);
    rep.pairs.push_back({i, partner[i], analytic[i], oracle[partner[i]], d});
    rep.max_residual = std::max(rep.max_residual, d);
  }
  for (std::size_t j = 0; j < oracle.size(); ++j)
    if (!used_o[j]) rep.unmatched_oracle.push_back(j);
  return rep;
}

}  // namespace weaksym
