#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace weaksym {

using cplx = std::complex<double>;

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimension,
  kTruncation,
  kUnsupported,
  kGuard,
  kNumeric,
  kDegenerate,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Dense complex matrix. Storage is column-major so that it can be handed to
/// BLAS/LAPACK without copies; element access is always (row, col).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> column_major);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const cplx> diag);
  /// Row-wise literal, e.g. from_rows({{1, 2}, {3, 4}}).
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r + rows_ * c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r + rows_ * c]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }
  std::span<const cplx> column(std::size_t c) const {
    return std::span<const cplx>(data_).subspan(c * rows_, rows_);
  }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  cplx trace() const;
  double frobenius_norm() const;
  double one_norm() const;
  double max_abs() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
/// Matrix product (zgemm).
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product a ⊗ b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-stacking: entry (i + D*j) of the result is rho(i, j).
ComplexMatrix vectorize(const ComplexMatrix& rho);
ComplexMatrix devectorize(const ComplexMatrix& column);
ComplexMatrix devectorize(std::span<const cplx> column);

/// Matrix of rho -> A rho B under column stacking, i.e. B^T ⊗ A.
ComplexMatrix superop_left_right(const ComplexMatrix& a, const ComplexMatrix& b);
/// rho -> A rho
ComplexMatrix superop_left(const ComplexMatrix& a);
/// rho -> rho B
ComplexMatrix superop_right(const ComplexMatrix& b);
/// D[X] rho = X rho X^† - {X^† X, rho}/2
ComplexMatrix dissipator(const ComplexMatrix& x);

/// Frobenius inner product Tr(a^† b).
cplx inner(const ComplexMatrix& a, const ComplexMatrix& b);

struct SpectralDecomposition {
  std::vector<cplx> eigenvalues;
  /// Column k pairs with eigenvalues[k]. Empty when vectors were not requested.
  ComplexMatrix right_vectors;
  ComplexMatrix left_vectors;
  std::vector<double> right_residual;  // ||A r - λ r|| / ||r||
  std::vector<double> left_residual;   // ||l^† A - λ l^†|| / ||l||
  std::vector<double> overlap;         // |<l|r>| / (||l|| ||r||) before normalization
  std::vector<bool> defective;

  bool has_vectors() const noexcept { return right_vectors.size() != 0; }
  bool any_defective() const;
};

struct EigOptions {
  bool compute_vectors = true;
  /// Pairs with |<l|r>| < threshold * ||l|| ||r|| are flagged and left
  /// unnormalized.
  double defect_threshold = 1e-8;
  /// Relative radius used to group numerically degenerate eigenvalues; left
  /// vectors are biorthogonalized inside each group. A Jordan block comes out
  /// of zgeev split by about sqrt(eps), so the radius has to be wider than that
  /// for the group test to see it.
  double cluster_radius = 1e-6;
};

/// Non-Hermitian eigendecomposition backed by LAPACK zgeev.
SpectralDecomposition eig_nonhermitian(const ComplexMatrix& m, const EigOptions& opts = {});
std::vector<cplx> eigvals(const ComplexMatrix& m);

/// Hermitian eigenvalues in ascending order (zheev).
std::vector<double> eigvals_hermitian(const ComplexMatrix& m);

/// e^{M t}, scaling and squaring with a degree-13 Padé approximant.
ComplexMatrix expm(const ComplexMatrix& m, double t);

/// Solves A X = B (zgesv).
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b);

struct MatchedPair {
  std::size_t analytic_index;
  std::size_t oracle_index;
  cplx analytic;
  cplx oracle;
  double residual;
};

struct MatchReport {
  std::vector<MatchedPair> pairs;  // in analytic order
  std::vector<std::size_t> unmatched_analytic;
  std::vector<std::size_t> unmatched_oracle;
  double max_residual = 0.0;
};

/// Greedy nearest-neighbour pairing in ascending distance; pairs farther than
/// `tol` apart are never formed. Each oracle value is used at most once.
MatchReport match_spectra(std::span<const cplx> analytic, std::span<const cplx> oracle,
                          double tol);

}  // namespace weaksym
