#pragma once

// Dissipative Ising model with local relaxation, pumping and dephasing:
//
//   dρ/dt = -i[Σ_{j<k} J_jk σz_j σz_k + Σ_j h_j σz_j, ρ]
//           + Σ_j γ-_j D[σ-_j]ρ + γ+_j D[σ+_j]ρ + γφ_j D[σz_j]ρ
//
// Every spin carries its own weak U(1) symmetry generated by [σz_j, ·]/2, so
// the Liouvillian splits into 3^n blocks labelled by m ∈ {-1, 0, +1}^n. Inside
// a block the interaction reduces to a static counting field
// J_eff_j = Σ_k J_jk m_k on each spin, and the block factorizes into
// independent single-spin problems: frozen spins (m_j = ±1) are pure
// coherences and active spins (m_j = 0) obey a 2×2 classical rate equation
// with imaginary diagonal shifts ∓2iJ_eff_j.
//
// Basis conventions: local basis {|↑>, |↓>} (index 0 is up), spins tensor
// ordered with spin 0 as the most significant factor.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "weaksym/linalg.hpp"

namespace weaksym::ising {

struct IsingParams {
  std::size_t n = 0;
  std::vector<double> J;  // row-major n×n, symmetric, zero diagonal
  std::vector<double> h;
  std::vector<double> gamma_minus;
  std::vector<double> gamma_plus;
  std::vector<double> gamma_phi;

  double coupling(std::size_t j, std::size_t k) const { return J[j * n + k]; }
  double Gamma(std::size_t j) const { return 0.5 * (gamma_plus[j] + gamma_minus[j]); }
  double eta(std::size_t j) const { return 0.5 * (gamma_plus[j] - gamma_minus[j]); }
  void validate() const;
};

/// Deterministic random instance: J_jk, h_j uniform in [-1, 1], γ± in
/// [0.1, 1], γφ in [0, 0.5]. Uses its own bit-exact generator so the instance
/// for a given seed is identical on every platform.
IsingParams random_params(std::size_t n, std::uint64_t seed);

/// Block label: m_j ∈ {-1, 0, +1} per spin.
struct BlockIndex {
  std::vector<int> m;

  std::size_t active_count() const;
  bool operator==(const BlockIndex&) const = default;
};

enum class Branch { kPlus, kMinus };
enum class SpinRole { kFrozen, kActive };

/// Which closed form to use for active-spin eigenvalues. kTraceConsistent is
/// -Γ ± S (the trace of the 2×2 generator is -2Γ); kPrinted is +Γ ± S and only
/// exists as a negative control for validation runs.
enum class ActiveSign { kTraceConsistent, kPrinted };

double j_eff(const IsingParams& p, const BlockIndex& block, std::size_t j);

/// [[-2iJ - γ-, γ+], [γ-, 2iJ - γ+]] acting on (p↑, p↓).
ComplexMatrix active_spin_matrix(const IsingParams& p, std::size_t j, double jeff);

/// S = sqrt(Γ² - 4 J_eff (J_eff + iη)), principal branch.
cplx discriminant_root(const IsingParams& p, std::size_t j, double jeff);

cplx spin_eigenvalue(const IsingParams& p, const BlockIndex& block, std::size_t j, Branch chi,
                     ActiveSign sign = ActiveSign::kTraceConsistent);

struct SpinEigenpair {
  cplx lambda;
  // Right/left coefficients on (|↑><↑|, |↓><↓|). `l_up`, `l_down` are the
  // conjugated left coefficients l*, so the pairing is l_up r_up + l_down r_down = 1.
  cplx r_up, r_down;
  cplx l_up, l_down;
  Branch chi = Branch::kPlus;
  SpinRole role = SpinRole::kActive;
  /// Set at an exceptional point: (r, l) then hold the single eigenvector and
  /// a generalized eigenvector (A - λ) g = r, not a biorthonormal pair.
  bool exceptional = false;
};

/// Frozen spins return lambda only (their eigenoperator is σ^{m_j}).
SpinEigenpair spin_eigenvectors(const IsingParams& p, const BlockIndex& block, std::size_t j,
                                Branch chi);

struct BlockSpectrum {
  BlockIndex block;
  std::vector<Branch> chi;  // one per active spin, ascending spin index
  cplx lambda_total;
};

inline constexpr std::size_t kDefaultSpectrumGuard = 12;
inline constexpr std::size_t kDefaultEvolveGuard = 10;

/// All 4^n Liouvillian eigenvalues: blocks in lexicographic order over
/// {-1, 0, +1}^n, branches lexicographic over active spins (+ before -).
std::vector<BlockSpectrum> enumerate_spectrum(const IsingParams& p,
                                              std::size_t max_n = kDefaultSpectrumGuard,
                                              ActiveSign sign = ActiveSign::kTraceConsistent);

/// Streaming form of enumerate_spectrum, same order; the visited entry is
/// reused between calls.
void visit_spectrum(const IsingParams& p, const std::function<void(const BlockSpectrum&)>& visit,
                    std::size_t max_n = kDefaultSpectrumGuard,
                    ActiveSign sign = ActiveSign::kTraceConsistent);

/// <σ+_j(t)> starting from every spin polarized along +x.
cplx single_spin_coherence(const IsingParams& p, std::size_t j, double t);

/// ρ(t) = Σ e^{λt} r Tr(l^† ρ0), assembled block by block from per-spin
/// propagators. ρ0 must be a Hermitian unit-trace 2^n × 2^n matrix.
ComplexMatrix evolve_density_matrix(const IsingParams& p, const ComplexMatrix& rho0, double t,
                                    std::size_t max_n = kDefaultEvolveGuard);

struct EpLocation {
  BlockIndex block;
  std::size_t spin;
};

/// Active spins sitting at a second-order exceptional point: η_j = 0 and
/// Γ_j = ±2 J_eff_j within `tol`.
std::vector<EpLocation> detect_eps(const IsingParams& p, double tol = 1e-9,
                                   std::size_t max_n = kDefaultSpectrumGuard);

/// Visits every block in lexicographic order.
template <typename F>
void for_each_block(std::size_t n, F&& f) {
  BlockIndex b;
  b.m.assign(n, -1);
  while (true) {
    f(static_cast<const BlockIndex&>(b));
    bool wrapped = true;
    for (std::size_t k = n; k > 0 && wrapped; --k) {
      if (b.m[k - 1] < 1) {
        ++b.m[k - 1];
        wrapped = false;
      } else {
        b.m[k - 1] = -1;
      }
    }
    if (wrapped) return;
  }
}

}  // namespace weaksym::ising
