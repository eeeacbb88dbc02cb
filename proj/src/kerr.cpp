#include "weaksym/kerr.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace weaksym::kerr {

namespace {

constexpr cplx kI{0.0, 1.0};

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

bool finite(double x) { return std::isfinite(x); }

// Single-mode sector quantities shared by the eigenvector construction.
struct SectorCoefficients {
  cplx gamma;
  cplx a;   // Γ + κ
  cplx iu;  // iUm
  double k2;  // 2κ(2n̄+1)
};

SectorCoefficients coefficients(const KerrParams& p, int m) {
  SectorCoefficients c;
  c.gamma = gamma_m(p, m);
  c.a = c.gamma + p.kappa;
  c.iu = kI * (p.U * m);
  c.k2 = 2.0 * p.kappa * (2.0 * p.n_th + 1.0);
  return c;
}

// α a_L + β a_R, or α a_L† + β a_R† when `raising`.
struct Ladder {
  cplx alpha;
  cplx beta;
  bool raising;
};

ComplexMatrix annihilator(std::size_t cutoff) {
  ComplexMatrix a(cutoff, cutoff);
  for (std::size_t n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Ket action: |x> -> |α a x + β x a> (or with a†).
ComplexMatrix apply_ket(const Ladder& op, const ComplexMatrix& x, const ComplexMatrix& a,
                        const ComplexMatrix& ad) {
  const ComplexMatrix& o = op.raising ? ad : a;
  return op.alpha * (o * x) + op.beta * (x * o);
}

// Bra action: <l| X = <y| with y = conj(α) a† l + conj(β) l a† for lowering
// ladders and conj(α) a l + conj(β) l a for raising ones.
ComplexMatrix apply_bra(const Ladder& op, const ComplexMatrix& l, const ComplexMatrix& a,
                        const ComplexMatrix& ad) {
  const ComplexMatrix& o = op.raising ? a : ad;
  return std::conj(op.alpha) * (o * l) + std::conj(op.beta) * (l * o);
}

}  // namespace

void KerrParams::validate() const {
  require(finite(omega0) && finite(U) && finite(kappa) && finite(n_th) && finite(kappa_phi),
          ErrorCode::kInvalidArgument, "KerrParams: all parameters must be finite");
  require(kappa >= 0.0, ErrorCode::kInvalidArgument, "KerrParams: kappa must be >= 0");
  require(n_th >= 0.0, ErrorCode::kInvalidArgument, "KerrParams: n_th must be >= 0");
  require(kappa_phi >= 0.0, ErrorCode::kInvalidArgument, "KerrParams: kappa_phi must be >= 0");
}

cplx gamma_for_coupling(double kappa, double n_th, double coupling) {
  if (kappa == 0.0) return kI * coupling;
  const cplx arg{kappa * kappa - coupling * coupling,
                 2.0 * kappa * coupling * (2.0 * n_th + 1.0)};
  cplx g = std::sqrt(arg);
  if (g.real() < 0.0) g = -g;
  return g;
}

cplx gamma_m(const KerrParams& p, int m) {
  p.validate();
  return gamma_for_coupling(p.kappa, p.n_th, p.U * m);
}

SectorRates sector_rates(const KerrParams& p, int m) {
  const cplx g = gamma_m(p, m);
  SectorRates r;
  r.gamma = g;
  r.kappa_tilde = g.real();
  r.u_tilde = m == 0 ? p.U : g.imag() / m;
  return r;
}

cplx kerr_eigenvalue(const KerrParams& p, SectorIndex s) {
  require(s.mu >= 0, ErrorCode::kInvalidArgument, "kerr_eigenvalue: mu must be >= 0");
  const cplx g = gamma_m(p, s.m);
  const double m = s.m;
  return -kI * ((p.omega0 - p.U) * m) - 0.5 * (g - p.kappa) -
         0.5 * g * static_cast<double>(std::abs(s.m) + 2 * s.mu) - p.kappa_phi * m * m;
}

cplx kerr_eigenvalue_from_rates(const KerrParams& p, SectorIndex s) {
  require(s.mu >= 0, ErrorCode::kInvalidArgument, "kerr_eigenvalue_from_rates: mu must be >= 0");
  const SectorRates r = sector_rates(p, s.m);
  const double level = std::abs(s.m) + 1 + 2 * s.mu;
  const double m = s.m;
  return -kI * ((p.omega0 - p.U + 0.5 * r.u_tilde * level) * m) -
         0.5 * (r.kappa_tilde * level - p.kappa) - p.kappa_phi * m * m;
}

std::pair<cplx, cplx> boltzmann_factors(const KerrParams& p, int m) {
  p.validate();
  require(p.kappa > 0.0, ErrorCode::kUnsupported,
          "boltzmann_factors: sector vacua need kappa > 0");
  const SectorCoefficients c = coefficients(p, m);
  const cplx right = (c.iu - c.a + c.k2) / (c.iu + c.a + c.k2);
  const cplx left_conj = (c.a - c.iu) / (c.a + c.iu);
  return {right, left_conj};
}

KerrEigenpair kerr_eigenpair(const KerrParams& p, SectorIndex s, std::size_t cutoff, int margin) {
  p.validate();
  require(s.mu >= 0, ErrorCode::kInvalidArgument, "kerr_eigenpair: mu must be >= 0");
  require(margin >= 0, ErrorCode::kInvalidArgument, "kerr_eigenpair: margin must be >= 0");
  const int abs_m = std::abs(s.m);
  if (static_cast<long long>(s.mu) + abs_m + margin > static_cast<long long>(cutoff)) {
    std::ostringstream os;
    os << "kerr_eigenpair: cutoff " << cutoff << " too small for (m=" << s.m << ", mu=" << s.mu
       << "); need at least " << s.mu + abs_m + margin;
    throw Error(ErrorCode::kTruncation, os.str());
  }
  require(p.kappa > 0.0, ErrorCode::kUnsupported, "kerr_eigenpair: requires kappa > 0");

  const SectorCoefficients c = coefficients(p, s.m);
  const auto [er, elc] = boltzmann_factors(p, s.m);
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  const cplx two_g = 2.0 * c.gamma;

  const Ladder d_plus{inv_s2 * (c.iu + c.a + c.k2) / two_g, -inv_s2 * (c.iu - c.a + c.k2) / two_g,
                      false};
  const Ladder c_minus{inv_s2 * (c.a - c.iu) / c.a, -inv_s2 * (c.a + c.iu) / c.a, false};
  const Ladder d_minus_dag{-inv_s2 * (c.iu - c.a + c.k2) / two_g,
                           inv_s2 * (c.iu + c.a + c.k2) / two_g, true};
  const Ladder c_plus_dag{inv_s2 * (c.a + c.iu) / c.a, -inv_s2 * (c.a - c.iu) / c.a, true};

  const ComplexMatrix a = annihilator(cutoff);
  const ComplexMatrix ad = a.adjoint();

  // Sector vacua: 0^r = (1 - er·elc) Σ er^n |n><n|, (0^l)^† = Σ elc^n |n><n|.
  ComplexMatrix right(cutoff, cutoff);
  ComplexMatrix left(cutoff, cutoff);
  cplx pr = 1.0 - er * elc;
  cplx pl = 1.0;
  for (std::size_t n = 0; n < cutoff; ++n) {
    right(n, n) = pr;
    left(n, n) = std::conj(pl);
    pr *= er;
    pl *= elc;
  }

  if (s.m >= 0) {
    for (int k = 0; k < abs_m; ++k) right = apply_ket(c_plus_dag, right, a, ad);
    for (int k = 0; k < abs_m; ++k) left = apply_bra(d_plus, left, a, ad);
  } else {
    for (int k = 0; k < abs_m; ++k) right = -1.0 * apply_ket(c_minus, right, a, ad);
    for (int k = 0; k < abs_m; ++k) left = apply_bra(d_minus_dag, left, a, ad);
  }
  for (int k = 0; k < s.mu; ++k) {
    right = apply_ket(c_plus_dag, apply_ket(c_minus, right, a, ad), a, ad);
    left = -1.0 * apply_bra(d_plus, apply_bra(d_minus_dag, left, a, ad), a, ad);
  }
  const double norm =
      std::exp(-0.5 * (std::lgamma(s.mu + 1.0) + std::lgamma(s.mu + abs_m + 1.0)));
  right *= norm;
  left *= norm;

  KerrEigenpair out;
  out.lambda = kerr_eigenvalue(p, s);
  out.right = std::move(right);
  out.left = std::move(left);
  out.sector = s;
  return out;
}

namespace {

struct GreenData {
  cplx gamma1;
  cplx r1;
};

GreenData green_data(const KerrParams& p) {
  p.validate();
  require(p.kappa_phi == 0.0, ErrorCode::kUnsupported,
          "retarded Green's function is only available without dephasing (kappa_phi = 0)");
  GreenData g;
  g.gamma1 = gamma_m(p, 1);
  if (p.U == 0.0) {
    g.r1 = 1.0;
  } else {
    require(std::abs(g.gamma1) > 0.0, ErrorCode::kNumeric, "Green's function: Gamma_1 vanishes");
    g.r1 = cplx{p.kappa, p.U * (2.0 * p.n_th + 1.0)} / g.gamma1;
  }
  return g;
}

}  // namespace

cplx retarded_green_time(const KerrParams& p, double t) {
  const GreenData g = green_data(p);
  require(std::isfinite(t), ErrorCode::kInvalidArgument, "retarded_green_time: non-finite t");
  if (t < 0.0) return 0.0;
  // cosh(x) + R sinh(x) = e^x [(1+R)/2 + (1-R)/2 e^{-2x}] with x = Γ_1 t / 2.
  const cplx decay = std::exp(-g.gamma1 * t);
  const cplx denom = 0.5 * (1.0 + g.r1) + 0.5 * (1.0 - g.r1) * decay;
  const cplx num = std::exp(cplx{0.5 * p.kappa * t, -(p.omega0 - p.U) * t}) * decay;
  return -kI * num / (denom * denom);
}

std::vector<GreenPole> green_poles(const KerrParams& p, double tail_tol, std::size_t max_poles) {
  const GreenData g = green_data(p);
  const cplx q = (g.r1 - 1.0) / (g.r1 + 1.0);
  const double aq = std::abs(q);
  require(aq < 1.0, ErrorCode::kNumeric, "green_poles: mode sum does not converge (|q| >= 1)");
  const cplx w0 = 4.0 / ((g.r1 + 1.0) * (g.r1 + 1.0));
  std::vector<GreenPole> poles;
  cplx qpow = 1.0;
  for (std::size_t mu = 0; mu < max_poles; ++mu) {
    poles.push_back({kerr_eigenvalue(p, {1, static_cast<int>(mu)}),
                     w0 * static_cast<double>(mu + 1) * qpow});
    if (aq == 0.0) break;
    // Σ_{k>μ} (k+1)|q|^k <= (μ+2)|q|^{μ+1} / (1-|q|)^2
    const double tail = std::abs(w0) * (mu + 2.0) * std::pow(aq, mu + 1.0) / ((1 - aq) * (1 - aq));
    if (tail < tail_tol) break;
    qpow *= q;
  }
  return poles;
}

std::vector<cplx> retarded_green_freq(const KerrParams& p, std::span<const double> omega_grid) {
  const std::vector<GreenPole> poles = green_poles(p);
  std::vector<cplx> out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid) {
    require(std::isfinite(w), ErrorCode::kInvalidArgument, "retarded_green_freq: non-finite omega");
    cplx s = 0.0;
    for (const GreenPole& pole : poles) s += pole.weight / (w - kI * pole.lambda);
    out.push_back(s);
  }
  return out;
}

void MultiModeParams::validate() const {
  const std::size_t n = modes.size();
  require(n > 0, ErrorCode::kInvalidArgument, "MultiModeParams: no modes");
  require(cross_kerr.size() == n * n, ErrorCode::kDimension,
          "MultiModeParams: cross_kerr must be modes x modes");
  for (const KerrParams& m : modes) m.validate();
  for (std::size_t a = 0; a < n; ++a) {
    require(coupling(a, a) == 0.0, ErrorCode::kInvalidArgument,
            "MultiModeParams: cross_kerr diagonal must be zero");
    for (std::size_t b = 0; b < n; ++b) {
      require(std::isfinite(coupling(a, b)), ErrorCode::kInvalidArgument,
              "MultiModeParams: non-finite cross_kerr");
      require(coupling(a, b) == coupling(b, a), ErrorCode::kInvalidArgument,
              "MultiModeParams: cross_kerr must be symmetric");
    }
  }
}

cplx multimode_eigenvalue(const MultiModeParams& mp, std::span<const int> m_vec,
                          std::span<const int> mu_vec) {
  mp.validate();
  const std::size_t n = mp.size();
  require(m_vec.size() == n && mu_vec.size() == n, ErrorCode::kDimension,
          "multimode_eigenvalue: m_vec and mu_vec must have one entry per mode");
  cplx total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const KerrParams& p = mp.modes[a];
    require(mu_vec[a] >= 0, ErrorCode::kInvalidArgument, "multimode_eigenvalue: mu must be >= 0");
    const double m = m_vec[a];
    double x = p.U * m;
    for (std::size_t b = 0; b < n; ++b) x += mp.coupling(a, b) * m_vec[b];
    const cplx g = gamma_for_coupling(p.kappa, p.n_th, x);
    // Scalar parts: -iω0 m from the bare frequency, +iUm/2 from normal ordering
    // of the self-Kerr term, +iX/2 from the block-projected anticommutator.
    total += -kI * (p.omega0 * m) + kI * (0.5 * p.U * m) + kI * (0.5 * x) -
             0.5 * (g - p.kappa) - 0.5 * g * static_cast<double>(std::abs(m_vec[a]) + 2 * mu_vec[a]) -
             p.kappa_phi * m * m;
  }
  return total;
}

}  // namespace weaksym::kerr
