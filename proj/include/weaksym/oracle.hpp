#pragma once

// Brute-force reference: dense Liouvillian superoperators built from the
// master equation, diagonalized or exponentiated directly.
//
// Vectorization is column stacking, vec(ρ)[i + D j] = ρ(i, j). Every builder
// also records, for each symmetry generator, its eigenvalue (charge) on each
// basis element |i><j|. The generators are diagonal in this basis, so the
// charges alone are enough to check the symmetry and to split the matrix into
// sectors.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "weaksym/ising.hpp"
#include "weaksym/kerr.hpp"
#include "weaksym/linalg.hpp"

namespace weaksym::oracle {

enum class ModelTag { kKerr, kMultiModeKerr, kIsing };

const char* model_name(ModelTag tag);

struct DenseLiouvillian {
  ComplexMatrix matrix;  // D² × D²
  std::size_t hilbert_dim = 0;
  ModelTag model = ModelTag::kKerr;
  std::string basis_doc;
  /// charges[g][k]: eigenvalue of generator g on basis superket k.
  std::vector<std::vector<int>> charges;

  std::size_t dim() const noexcept { return matrix.rows(); }
};

/// Largest superoperator dimension built by default: 4096² complex entries,
/// 256 MiB.
inline constexpr std::size_t kDefaultMaxSuperopDim = 4096;

/// Bytes needed for a D² × D² complex matrix.
double superop_bytes(std::size_t hilbert_dim);

/// Truncated annihilation operator on {|0>, ..., |cutoff-1>}.
ComplexMatrix annihilator(std::size_t cutoff);

DenseLiouvillian build_kerr_liouvillian(const kerr::KerrParams& p, std::size_t cutoff,
                                        std::size_t max_superop_dim = kDefaultMaxSuperopDim);

/// Modes tensor ordered with mode 0 most significant. Hamiltonian
/// Σ_a [ω_a n_a + (U_a/2) a_a†a_a†a_a a_a] + Σ_{a<b} U_ab n_a n_b.
DenseLiouvillian build_multimode_liouvillian(
    const kerr::MultiModeParams& mp, std::span<const std::size_t> cutoffs,
    std::size_t max_superop_dim = kDefaultMaxSuperopDim);

DenseLiouvillian build_ising_liouvillian(const ising::IsingParams& p,
                                         std::size_t max_superop_dim = kDefaultMaxSuperopDim);

/// Largest |(L G - G L)_{ik}| for each generator G.
std::vector<double> symmetry_violation(const DenseLiouvillian& L);

/// Largest |Σ_i L(i+Di, k)|: the identity must be a left null vector.
double trace_violation(const DenseLiouvillian& L);

/// Full diagonalization of the whole matrix.
SpectralDecomposition oracle_spectrum(const DenseLiouvillian& L, const EigOptions& opts = {});

struct Sector {
  std::vector<int> charge;  // one entry per generator
  std::vector<std::size_t> indices;
};

/// Basis superkets grouped by charge, sectors in lexicographic charge order.
std::vector<Sector> sectors(const DenseLiouvillian& L);

/// Submatrix of L on one sector. Throws kNumeric if L couples the sector to
/// anything outside it.
/// `scale` is the magnitude leaks are measured against (max |L_ik| if < 0).
ComplexMatrix sector_block(const DenseLiouvillian& L, const Sector& s, double scale = -1.0);

struct SectorSpectrum {
  std::vector<int> charge;
  std::vector<cplx> eigenvalues;
};

/// Eigenvalues sector by sector; together they are the full spectrum.
std::vector<SectorSpectrum> sector_spectra(const DenseLiouvillian& L);
std::vector<cplx> blocked_eigenvalues(const DenseLiouvillian& L);

/// Unique stationary state: Hermitian, positive, unit trace. Throws
/// kDegenerate, listing the near-zero eigenvalues, if there is more than one.
ComplexMatrix steady_state(const DenseLiouvillian& L);

/// ρ(t) = e^{Lt} ρ0 for each t, propagated sector by sector.
std::vector<ComplexMatrix> evolve(const DenseLiouvillian& L, const ComplexMatrix& rho0,
                                  std::span<const double> times);

struct RegressionCorrelator {
  std::vector<cplx> a_then_b;  // Tr(A e^{Lt}[B ρ])  = <A(t) B(0)>
  std::vector<cplx> b_then_a;  // Tr(A e^{Lt}[ρ B])  = <B(0) A(t)>
};

RegressionCorrelator regression_correlator(const DenseLiouvillian& L, const ComplexMatrix& A,
                                           const ComplexMatrix& B, const ComplexMatrix& rho_ss,
                                           std::span<const double> times);

/// G^R(t) = -iθ(t)<[a(t), a†(0)]> from the quantum regression theorem on a
/// truncated Kerr Liouvillian.
std::vector<cplx> kerr_green_oracle(const kerr::KerrParams& p, std::size_t cutoff,
                                    std::span<const double> times);

}  // namespace weaksym::oracle
