#include "weaksym/ising.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace weaksym::ising {

namespace {

constexpr cplx kI{0.0, 1.0};

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

void check_spin(const IsingParams& p, std::size_t j) {
  if (j >= p.n) {
    std::ostringstream os;
    os << "spin index " << j << " out of range for n = " << p.n;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

void check_block(const IsingParams& p, const BlockIndex& b) {
  require(b.m.size() == p.n, ErrorCode::kDimension, "block index length must equal n");
  for (int m : b.m) {
    require(m >= -1 && m <= 1, ErrorCode::kInvalidArgument,
            "block index entries must be -1, 0 or +1");
  }
}

void check_guard(std::size_t n, std::size_t max_n, const char* who) {
  if (n > max_n) {
    std::ostringstream os;
    os << who << ": n = " << n << " exceeds the guard of " << max_n << " spins (4^n = "
       << std::pow(4.0, static_cast<double>(n)) << " eigenvalues)";
    throw Error(ErrorCode::kGuard, os.str());
  }
}

// splitmix64; fixed arithmetic so random instances are reproducible everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::uint64_t state_;
};

cplx sinhc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

// e^{-Γt}[cosh(St) + Γ t sinhc(St)]
cplx population_factor(double gamma, cplx s, double t) {
  const cplx st = s * t;
  if (std::abs(st) < 1.0) {
    return std::exp(-gamma * t) * (std::cosh(st) + gamma * t * sinhc(st));
  }
  // Exponential form; -Γ ± Re S <= 0 so neither term overflows.
  const cplx ratio = gamma / s;
  return 0.5 * ((1.0 + ratio) * std::exp(st - gamma * t) +
                (1.0 - ratio) * std::exp(-st - gamma * t));
}

double frozen_phase_sign(int m) { return m > 0 ? -1.0 : 1.0; }

cplx frozen_eigenvalue(const IsingParams& p, std::size_t j, int m) {
  return kI * (2.0 * frozen_phase_sign(m) * p.h[j]) - p.Gamma(j) - 2.0 * p.gamma_phi[j];
}

// Right vector of [[a, b], [c, d]] for eigenvalue lam, the better-conditioned
// of the two rows of (A - λ).
std::pair<cplx, cplx> null_vector(cplx a, cplx b, cplx c, cplx d, cplx lam) {
  const std::pair<cplx, cplx> v1{b, lam - a};
  const std::pair<cplx, cplx> v2{lam - d, c};
  const double n1 = std::norm(v1.first) + std::norm(v1.second);
  const double n2 = std::norm(v2.first) + std::norm(v2.second);
  if (n1 == 0.0 && n2 == 0.0) return {1.0, 0.0};
  return n1 >= n2 ? v1 : v2;
}

}  // namespace

void IsingParams::validate() const {
  require(n > 0, ErrorCode::kInvalidArgument, "IsingParams: n must be positive");
  require(J.size() == n * n, ErrorCode::kDimension, "IsingParams: J must be n x n");
  require(h.size() == n && gamma_minus.size() == n && gamma_plus.size() == n &&
              gamma_phi.size() == n,
          ErrorCode::kDimension, "IsingParams: h and rate vectors must have length n");
  for (std::size_t j = 0; j < n; ++j) {
    require(coupling(j, j) == 0.0, ErrorCode::kInvalidArgument,
            "IsingParams: J diagonal must be zero");
    for (std::size_t k = 0; k < n; ++k) {
      require(std::isfinite(coupling(j, k)), ErrorCode::kInvalidArgument,
              "IsingParams: non-finite J");
      require(coupling(j, k) == coupling(k, j), ErrorCode::kInvalidArgument,
              "IsingParams: J must be symmetric");
    }
    require(std::isfinite(h[j]), ErrorCode::kInvalidArgument, "IsingParams: non-finite h");
    for (double g : {gamma_minus[j], gamma_plus[j], gamma_phi[j]}) {
      require(std::isfinite(g) && g >= 0.0, ErrorCode::kInvalidArgument,
              "IsingParams: rates must be finite and >= 0");
    }
  }
}

IsingParams random_params(std::size_t n, std::uint64_t seed) {
  require(n > 0, ErrorCode::kInvalidArgument, "random_params: n must be positive");
  SplitMix64 rng(seed);
  IsingParams p;
  p.n = n;
  p.J.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) p.J[j * n + k] = p.J[k * n + j] = rng.uniform(-1, 1);
  for (std::size_t j = 0; j < n; ++j) {
    p.h.push_back(rng.uniform(-1.0, 1.0));
    p.gamma_minus.push_back(rng.uniform(0.1, 1.0));
    p.gamma_plus.push_back(rng.uniform(0.1, 1.0));
    p.gamma_phi.push_back(rng.uniform(0.0, 0.5));
  }
  return p;
}

std::size_t BlockIndex::active_count() const {
  std::size_t z = 0;
  for (int v : m) z += v == 0 ? 1 : 0;
  return z;
}

double j_eff(const IsingParams& p, const BlockIndex& block, std::size_t j) {
  check_spin(p, j);
  check_block(p, block);
  double s = 0.0;
  for (std::size_t k = 0; k < p.n; ++k)
    if (k != j) s += p.coupling(j, k) * block.m[k];
  return s;
}

ComplexMatrix active_spin_matrix(const IsingParams& p, std::size_t j, double jeff) {
  check_spin(p, j);
  const double gm = p.gamma_minus[j];
  const double gp = p.gamma_plus[j];
  return ComplexMatrix::from_rows({{cplx{-gm, -2.0 * jeff}, gp}, {gm, cplx{-gp, 2.0 * jeff}}});
}

cplx discriminant_root(const IsingParams& p, std::size_t j, double jeff) {
  check_spin(p, j);
  const double g = p.Gamma(j);
  return std::sqrt(g * g - 4.0 * jeff * (jeff + kI * p.eta(j)));
}

cplx spin_eigenvalue(const IsingParams& p, const BlockIndex& block, std::size_t j, Branch chi,
                     ActiveSign sign) {
  check_spin(p, j);
  check_block(p, block);
  if (block.m[j] != 0) return frozen_eigenvalue(p, j, block.m[j]);
  const cplx s = discriminant_root(p, j, j_eff(p, block, j));
  const double lead = sign == ActiveSign::kTraceConsistent ? -p.Gamma(j) : p.Gamma(j);
  return chi == Branch::kPlus ? lead + s : lead - s;
}

SpinEigenpair spin_eigenvectors(const IsingParams& p, const BlockIndex& block, std::size_t j,
                                Branch chi) {
  check_spin(p, j);
  check_block(p, block);
  SpinEigenpair out;
  out.chi = chi;
  out.lambda = spin_eigenvalue(p, block, j, chi);
  if (block.m[j] != 0) {
    out.role = SpinRole::kFrozen;
    return out;
  }
  out.role = SpinRole::kActive;

  const double jeff = j_eff(p, block, j);
  const double g = p.Gamma(j);
  const double eta = p.eta(j);
  const cplx s = discriminant_root(p, j, jeff);
  const double sign = chi == Branch::kPlus ? 1.0 : -1.0;
  const double scale = std::max(1.0, g);

  // Closed forms; they divide by η and by S.
  if (std::abs(eta) > 1e-10 * scale && std::abs(s) > 1e-6 * scale) {
    const cplx base = 2.0 * (eta - kI * jeff);
    out.r_up = eta * (g + eta) / (g * (base + g - sign * s));
    out.r_down = eta * (g - eta) / (g * (base - g + sign * s));
    out.l_up = sign * g / (2.0 * eta) * (base - g + sign * s) / s;
    out.l_down = sign * g / (2.0 * eta) * (base + g - sign * s) / s;
    const ComplexMatrix a = active_spin_matrix(p, j, jeff);
    const double res =
        std::abs(a(0, 0) * out.r_up + a(0, 1) * out.r_down - out.lambda * out.r_up) +
        std::abs(a(1, 0) * out.r_up + a(1, 1) * out.r_down - out.lambda * out.r_down);
    const double norm = std::abs(out.r_up) + std::abs(out.r_down);
    if (std::isfinite(res) && std::isfinite(norm) && norm > 0.0 && res <= 1e-10 * norm * scale) {
      return out;
    }
  }

  // Direct 2×2 eigenvectors.
  const ComplexMatrix a = active_spin_matrix(p, j, jeff);
  const cplx lam = out.lambda;
  auto [ru, rd] = null_vector(a(0, 0), a(0, 1), a(1, 0), a(1, 1), lam);
  // Left coefficients solve A^T l* = λ l*.
  auto [lu, ld] = null_vector(a(0, 0), a(1, 0), a(0, 1), a(1, 1), lam);
  const cplx trace = ru + rd;
  if (std::abs(trace) > 1e-12 * (std::abs(ru) + std::abs(rd))) {
    ru /= trace;
    rd /= trace;
  } else {
    const double nr = std::sqrt(std::norm(ru) + std::norm(rd));
    ru /= nr;
    rd /= nr;
  }
  const cplx pairing = lu * ru + ld * rd;
  const double lnorm = std::sqrt(std::norm(lu) + std::norm(ld));
  const double rnorm = std::sqrt(std::norm(ru) + std::norm(rd));
  out.r_up = ru;
  out.r_down = rd;
  // Same criterion as detect_eps: rounding can leave S ~ 1e-8 at a genuine
  // coalescence, with a pairing just above the threshold.
  const bool at_ep = std::abs(eta) < 1e-9 && g > 1e-9 && std::abs(g - 2.0 * std::abs(jeff)) < 1e-9;
  if (at_ep || std::abs(pairing) < 1e-8 * lnorm * rnorm) {
    // Jordan block: replace the left slot with a generalized eigenvector g,
    // (A - λ) g = r, via the rank-one pseudo-inverse N^+ = N^† / ||N||_F^2.
    out.exceptional = true;
    const cplx n00 = a(0, 0) - lam, n01 = a(0, 1), n10 = a(1, 0), n11 = a(1, 1) - lam;
    const double fro = std::norm(n00) + std::norm(n01) + std::norm(n10) + std::norm(n11);
    if (fro == 0.0) {
      out.l_up = 0.0;
      out.l_down = 0.0;
    } else {
      out.l_up = (std::conj(n00) * ru + std::conj(n10) * rd) / fro;
      out.l_down = (std::conj(n01) * ru + std::conj(n11) * rd) / fro;
    }
    return out;
  }
  out.l_up = lu / pairing;
  out.l_down = ld / pairing;
  return out;
}

void visit_spectrum(const IsingParams& p, const std::function<void(const BlockSpectrum&)>& visit,
                    std::size_t max_n, ActiveSign sign) {
  p.validate();
  check_guard(p.n, max_n, "enumerate_spectrum");
  BlockSpectrum entry;
  std::vector<cplx> plus(p.n), minus(p.n);
  for_each_block(p.n, [&](const BlockIndex& block) {
    cplx frozen_sum = 0.0;
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < p.n; ++j) {
      if (block.m[j] == 0) {
        active.push_back(j);
        plus[j] = spin_eigenvalue(p, block, j, Branch::kPlus, sign);
        minus[j] = spin_eigenvalue(p, block, j, Branch::kMinus, sign);
      } else {
        frozen_sum += frozen_eigenvalue(p, j, block.m[j]);
      }
    }
    const std::size_t z = active.size();
    entry.block = block;
    entry.chi.assign(z, Branch::kPlus);
    for (std::size_t code = 0; code < (std::size_t{1} << z); ++code) {
      cplx total = frozen_sum;
      for (std::size_t i = 0; i < z; ++i) {
        const bool is_minus = (code >> (z - 1 - i)) & 1u;
        entry.chi[i] = is_minus ? Branch::kMinus : Branch::kPlus;
        total += is_minus ? minus[active[i]] : plus[active[i]];
      }
      entry.lambda_total = total;
      visit(entry);
    }
  });
}

std::vector<BlockSpectrum> enumerate_spectrum(const IsingParams& p, std::size_t max_n,
                                              ActiveSign sign) {
  std::vector<BlockSpectrum> out;
  p.validate();
  check_guard(p.n, max_n, "enumerate_spectrum");
  out.reserve(std::size_t{1} << (2 * p.n));
  visit_spectrum(p, [&](const BlockSpectrum& e) { out.push_back(e); }, max_n, sign);
  return out;
}

cplx single_spin_coherence(const IsingParams& p, std::size_t j, double t) {
  p.validate();
  check_spin(p, j);
  require(std::isfinite(t) && t >= 0.0, ErrorCode::kInvalidArgument,
          "single_spin_coherence: t must be finite and >= 0");
  cplx value = 0.5 * std::exp((2.0 * kI * p.h[j] - p.Gamma(j) - 2.0 * p.gamma_phi[j]) * t);
  for (std::size_t k = 0; k < p.n; ++k) {
    if (k == j) continue;
    const double jeff = -p.coupling(k, j);
    value *= population_factor(p.Gamma(k), discriminant_root(p, k, jeff), t);
  }
  return value;
}

namespace {

// 2×2 propagator e^{A t} of an active spin in (p↑, p↓) coordinates. A + Γ is
// traceless, so (A + Γ)^2 = S^2 and
//   e^{At} = e^{-Γt}[cosh(St) + t sinhc(St) (A + Γ)],
// which is Σ_χ e^{λ_χ t} r_χ l_χ^† with the 1/S of the projectors cancelled.
// It stays exact at and near an exceptional point.
std::array<cplx, 4> active_propagator(const IsingParams& p, const BlockIndex& block,
                                      std::size_t j, double t) {
  const double jeff = j_eff(p, block, j);
  const ComplexMatrix a = active_spin_matrix(p, j, jeff);
  const double g = p.Gamma(j);
  const cplx s = discriminant_root(p, j, jeff);
  const cplx st = s * t;
  cplx c, sc;  // e^{-Γt} cosh(St), e^{-Γt} t sinhc(St)
  if (std::abs(st) < 1.0) {
    const double e = std::exp(-g * t);
    c = e * std::cosh(st);
    sc = e * t * sinhc(st);
  } else {
    const cplx up = std::exp(st - g * t), down = std::exp(-st - g * t);
    c = 0.5 * (up + down);
    sc = (up - down) / (2.0 * s);
  }
  return {c + sc * (a(0, 0) + g), sc * a(0, 1), sc * a(1, 0), c + sc * (a(1, 1) + g)};
}

}  // namespace

ComplexMatrix evolve_density_matrix(const IsingParams& p, const ComplexMatrix& rho0, double t,
                                    std::size_t max_n) {
  p.validate();
  check_guard(p.n, max_n, "evolve_density_matrix");
  require(std::isfinite(t) && t >= 0.0, ErrorCode::kInvalidArgument,
          "evolve_density_matrix: t must be finite and >= 0");
  const std::size_t dim = std::size_t{1} << p.n;
  if (rho0.rows() != dim || rho0.cols() != dim) {
    std::ostringstream os;
    os << "evolve_density_matrix: rho0 must be " << dim << "x" << dim;
    throw Error(ErrorCode::kDimension, os.str());
  }
  require(std::abs(rho0.trace() - 1.0) <= 1e-8, ErrorCode::kInvalidArgument,
          "evolve_density_matrix: rho0 must have unit trace");
  require((rho0 - rho0.adjoint()).max_abs() <= 1e-9 * std::max(1.0, rho0.max_abs()),
          ErrorCode::kInvalidArgument, "evolve_density_matrix: rho0 must be Hermitian");

  ComplexMatrix out(dim, dim);
  std::vector<cplx> buf;
  for_each_block(p.n, [&](const BlockIndex& block) {
    std::size_t row0 = 0, col0 = 0;
    cplx phase_rate = 0.0;
    std::vector<std::size_t> active_bits;
    std::vector<std::array<cplx, 4>> props;
    for (std::size_t j = 0; j < p.n; ++j) {
      const std::size_t bit = std::size_t{1} << (p.n - 1 - j);
      if (block.m[j] == 1) {
        col0 |= bit;  // |↑><↓|
        phase_rate += frozen_eigenvalue(p, j, 1);
      } else if (block.m[j] == -1) {
        row0 |= bit;  // |↓><↑|
        phase_rate += frozen_eigenvalue(p, j, -1);
      } else {
        active_bits.push_back(bit);
        props.push_back(active_propagator(p, block, j, t));
      }
    }
    const std::size_t z = active_bits.size();
    const std::size_t count = std::size_t{1} << z;
    auto offset = [&](std::size_t code) {
      std::size_t o = 0;
      for (std::size_t i = 0; i < z; ++i)
        if ((code >> (z - 1 - i)) & 1u) o |= active_bits[i];
      return o;
    };
    buf.resize(count);
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t o = offset(c);
      buf[c] = rho0(row0 | o, col0 | o);
    }
    for (std::size_t i = 0; i < z; ++i) {
      const std::size_t stride = std::size_t{1} << (z - 1 - i);
      const auto& pm = props[i];
      for (std::size_t c = 0; c < count; ++c) {
        if (c & stride) continue;
        const cplx up = buf[c];
        const cplx down = buf[c | stride];
        buf[c] = pm[0] * up + pm[1] * down;
        buf[c | stride] = pm[2] * up + pm[3] * down;
      }
    }
    const cplx phase = std::exp(phase_rate * t);
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t o = offset(c);
      out(row0 | o, col0 | o) = phase * buf[c];
    }
  });
  return out;
}

std::vector<EpLocation> detect_eps(const IsingParams& p, double tol, std::size_t max_n) {
  p.validate();
  check_guard(p.n, max_n, "detect_eps");
  require(tol > 0.0, ErrorCode::kInvalidArgument, "detect_eps: tol must be > 0");
  std::vector<EpLocation> out;
  for_each_block(p.n, [&](const BlockIndex& block) {
    for (std::size_t j = 0; j < p.n; ++j) {
      if (block.m[j] != 0) continue;
      const double g = p.Gamma(j);
      if (std::abs(p.eta(j)) >= tol || g <= tol) continue;
      if (std::abs(g - 2.0 * std::abs(j_eff(p, block, j))) < tol) out.push_back({block, j});
    }
  });
  return out;
}

}  // namespace weaksym::ising
