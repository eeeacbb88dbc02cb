#pragma once

// Closed-form spectral data of the thermally damped Kerr oscillator
//
//   dρ/dt = -i[ω0 n + (U/2) a†a†aa, ρ] + κ(n̄+1) D[a]ρ + κ n̄ D[a†]ρ + 2κφ D[n]ρ
//
// The Liouvillian is block diagonal in the coherence number m (the eigenvalue
// of [n, ·]); inside each block it is quadratic in the left/right ladder
// superoperators, so every block is a shifted, damped harmonic ladder with
// complex spacing Γ_m.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "weaksym/linalg.hpp"

namespace weaksym::kerr {

struct KerrParams {
  double omega0 = 0.0;
  double U = 0.0;
  double kappa = 0.0;
  double n_th = 0.0;
  double kappa_phi = 0.0;

  /// Throws Error(kInvalidArgument) on negative rates or non-finite values.
  void validate() const;
};

struct SectorIndex {
  int m = 0;
  int mu = 0;
};

struct SectorRates {
  cplx gamma;          // Γ_m
  double u_tilde;      // renormalized nonlinearity, Im Γ_m / m (U at m = 0)
  double kappa_tilde;  // renormalized decay rate, Re Γ_m
};

/// Γ for an arbitrary anticommutator coupling X (X = U m for a single mode):
/// sqrt(κ² - X² + 2iκX(2n̄+1)) on the branch with Re Γ > 0. At κ = 0 the
/// κ → 0⁺ limit iX is returned.
cplx gamma_for_coupling(double kappa, double n_th, double coupling);

cplx gamma_m(const KerrParams& p, int m);

SectorRates sector_rates(const KerrParams& p, int m);

/// λ_{m,μ} = -i(ω0 - U)m - (Γ_m - κ)/2 - Γ_m(|m| + 2μ)/2 - κφ m².
cplx kerr_eigenvalue(const KerrParams& p, SectorIndex s);

/// Main-text parametrization of the same eigenvalue via (Ũ_m, κ̃_m):
/// -i[ω0 - U + Ũ_m(|m|+1+2μ)/2] m - [κ̃_m(|m|+1+2μ) - κ]/2 - κφ m².
cplx kerr_eigenvalue_from_rates(const KerrParams& p, SectorIndex s);

/// Complex Boltzmann factors (e^{-β^r_m}, (e^{-β^l_m})^*) of the sector
/// vacua. Requires κ > 0.
std::pair<cplx, cplx> boltzmann_factors(const KerrParams& p, int m);

struct KerrEigenpair {
  cplx lambda;
  ComplexMatrix right;  // r_{m,μ}
  ComplexMatrix left;   // l_{m,μ}; Tr(left^† right) = 1
  SectorIndex sector;
};

inline constexpr int kDefaultEdgeMargin = 5;

/// Right and left eigenoperators on the Fock space {|0>, ..., |cutoff-1>},
/// built by applying the sector ladder superoperators to the sector vacua.
/// Requires μ + |m| + margin <= cutoff and κ > 0.
KerrEigenpair kerr_eigenpair(const KerrParams& p, SectorIndex s, std::size_t cutoff,
                             int margin = kDefaultEdgeMargin);

/// Retarded Green's function G^R(t) = -iθ(t)<[a(t), a†(0)]> in the thermal
/// steady state. Not defined with dephasing.
cplx retarded_green_time(const KerrParams& p, double t);

struct GreenPole {
  cplx lambda;  // λ_{1,μ}
  cplx weight;  // Σ_μ weight = 1
};

/// Mode expansion G^R(t) = -iθ(t) Σ_μ w_μ e^{λ_{1,μ} t}, truncated once the
/// geometric tail drops below `tail_tol`.
std::vector<GreenPole> green_poles(const KerrParams& p, double tail_tol = 1e-17,
                                   std::size_t max_poles = 100000);

/// G^R[ω] = ∫_0^∞ e^{iωt} G^R(t) dt = Σ_μ w_μ / (ω - iλ_{1,μ}).
std::vector<cplx> retarded_green_freq(const KerrParams& p, std::span<const double> omega_grid);

struct MultiModeParams {
  std::vector<KerrParams> modes;
  std::vector<double> cross_kerr;  // row-major modes×modes, symmetric, zero diagonal

  std::size_t size() const noexcept { return modes.size(); }
  double coupling(std::size_t a, std::size_t b) const { return cross_kerr[a * modes.size() + b]; }
  void validate() const;
};

/// Eigenvalue of the block (m_1..m_N) with ladder indices (μ_1..μ_N) for
/// modes coupled by U_ab n_a n_b. Inside a block mode a sees the
/// anticommutator coupling X_a = U_a m_a + Σ_b U_ab m_b.
cplx multimode_eigenvalue(const MultiModeParams& mp, std::span<const int> m_vec,
                          std::span<const int> mu_vec);

}  // namespace weaksym::kerr
