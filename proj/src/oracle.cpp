#include "weaksym/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace weaksym::oracle {

namespace {

constexpr cplx kI{0.0, 1.0};

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

void check_guard(std::size_t hilbert_dim, std::size_t max_superop_dim, const char* who) {
  const std::size_t dim = hilbert_dim * hilbert_dim;
  if (dim > max_superop_dim) {
    std::ostringstream os;
    os << who << ": superoperator would be " << dim << "x" << dim << " ("
       << superop_bytes(hilbert_dim) / (1024.0 * 1024.0) << " MiB), above the limit of "
       << max_superop_dim << "x" << max_superop_dim << " ("
       << 16.0 * double(max_superop_dim) * double(max_superop_dim) / (1024.0 * 1024.0)
       << " MiB)";
    throw Error(ErrorCode::kGuard, os.str());
  }
}

// L += alpha * kron(A, B), skipping zero entries of A.
void add_kron(ComplexMatrix& L, cplx alpha, const ComplexMatrix& A, const ComplexMatrix& B) {
  const std::size_t nb = B.rows();
  const std::size_t mb = B.cols();
  for (std::size_t ja = 0; ja < A.cols(); ++ja) {
    for (std::size_t ia = 0; ia < A.rows(); ++ia) {
      const cplx a = alpha * A(ia, ja);
      if (a == cplx{}) continue;
      for (std::size_t jb = 0; jb < mb; ++jb) {
        for (std::size_t ib = 0; ib < nb; ++ib) {
          const cplx b = B(ib, jb);
          if (b != cplx{}) L(ia * nb + ib, ja * mb + jb) += a * b;
        }
      }
    }
  }
}

ComplexMatrix conj(const ComplexMatrix& m) { return m.adjoint().transpose(); }

// -i[H, ρ] + Σ D[c]ρ  =  -i H_eff ρ + i ρ H_eff† + Σ c ρ c†.
ComplexMatrix assemble(const ComplexMatrix& H, const std::vector<ComplexMatrix>& jumps) {
  const std::size_t d = H.rows();
  ComplexMatrix heff = H;
  for (const auto& c : jumps) heff -= (0.5 * kI) * (c.adjoint() * c);
  const ComplexMatrix id = ComplexMatrix::identity(d);
  ComplexMatrix L(d * d, d * d);
  add_kron(L, -kI, id, heff);
  add_kron(L, kI, conj(heff), id);
  for (const auto& c : jumps) add_kron(L, 1.0, conj(c), c);
  return L;
}

// Charges of |i><j| for a diagonal generator with eigenvalues `diag` acting
// as (G ρ - ρ G) / divisor.
std::vector<int> charges_from_diag(const std::vector<int>& diag, int divisor) {
  const std::size_t d = diag.size();
  std::vector<int> out(d * d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) out[i + d * j] = (diag[i] - diag[j]) / divisor;
  return out;
}

ComplexMatrix number_op(std::size_t cutoff) {
  ComplexMatrix n(cutoff, cutoff);
  for (std::size_t k = 0; k < cutoff; ++k) n(k, k) = double(k);
  return n;
}

// Kerr Hamiltonian and jumps for one mode.
void kerr_terms(const kerr::KerrParams& p, const ComplexMatrix& a, const ComplexMatrix& n,
                ComplexMatrix& H, std::vector<ComplexMatrix>& jumps) {
  const ComplexMatrix ad = a.adjoint();
  H += cplx{p.omega0} * n;
  H += cplx{0.5 * p.U} * (ad * ad * a * a);
  if (p.kappa > 0.0) {
    jumps.push_back(cplx{std::sqrt(p.kappa * (p.n_th + 1.0))} * a);
    if (p.n_th > 0.0) jumps.push_back(cplx{std::sqrt(p.kappa * p.n_th)} * ad);
  }
  if (p.kappa_phi > 0.0) jumps.push_back(cplx{std::sqrt(2.0 * p.kappa_phi)} * n);
}

double zero_tolerance(const ComplexMatrix& block) {
  return 1e-8 * std::max(1.0, block.one_norm());
}

}  // namespace

const char* model_name(ModelTag tag) {
  switch (tag) {
    case ModelTag::kKerr:
      return "kerr";
    case ModelTag::kMultiModeKerr:
      return "multimode-kerr";
    case ModelTag::kIsing:
      return "ising";
  }
  return "unknown";
}

double superop_bytes(std::size_t hilbert_dim) {
  const double d2 = double(hilbert_dim) * double(hilbert_dim);
  return 16.0 * d2 * d2;
}

ComplexMatrix annihilator(std::size_t cutoff) {
  ComplexMatrix a(cutoff, cutoff);
  for (std::size_t k = 1; k < cutoff; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

DenseLiouvillian build_kerr_liouvillian(const kerr::KerrParams& p, std::size_t cutoff,
                                        std::size_t max_superop_dim) {
  p.validate();
  require(cutoff >= 2, ErrorCode::kInvalidArgument, "build_kerr_liouvillian: cutoff must be >= 2");
  check_guard(cutoff, max_superop_dim, "build_kerr_liouvillian");
  const ComplexMatrix a = annihilator(cutoff);
  const ComplexMatrix n = number_op(cutoff);
  ComplexMatrix H(cutoff, cutoff);
  std::vector<ComplexMatrix> jumps;
  kerr_terms(p, a, n, H, jumps);

  DenseLiouvillian L;
  L.matrix = assemble(H, jumps);
  L.hilbert_dim = cutoff;
  L.model = ModelTag::kKerr;
  std::ostringstream doc;
  doc << "Fock basis |0>..|" << cutoff - 1 << ">; superket |p><q| at index p + " << cutoff
      << "*q; generator [n, .] with charge p - q";
  L.basis_doc = doc.str();
  std::vector<int> diag(cutoff);
  for (std::size_t k = 0; k < cutoff; ++k) diag[k] = int(k);
  L.charges.push_back(charges_from_diag(diag, 1));
  return L;
}

DenseLiouvillian build_multimode_liouvillian(const kerr::MultiModeParams& mp,
                                             std::span<const std::size_t> cutoffs,
                                             std::size_t max_superop_dim) {
  mp.validate();
  const std::size_t modes = mp.size();
  require(cutoffs.size() == modes, ErrorCode::kDimension,
          "build_multimode_liouvillian: one cutoff per mode required");
  std::size_t d = 1;
  for (std::size_t c : cutoffs) {
    require(c >= 2, ErrorCode::kInvalidArgument,
            "build_multimode_liouvillian: cutoffs must be >= 2");
    d *= c;
  }
  check_guard(d, max_superop_dim, "build_multimode_liouvillian");

  // Embed single-mode operators.
  auto embed = [&](std::size_t mode, const ComplexMatrix& op) {
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (std::size_t b = 0; b < modes; ++b)
      out = kron(out, b == mode ? op : ComplexMatrix::identity(cutoffs[b]));
    return out;
  };
  std::vector<ComplexMatrix> a_ops, n_ops;
  ComplexMatrix H(d, d);
  std::vector<ComplexMatrix> jumps;
  for (std::size_t m = 0; m < modes; ++m) {
    a_ops.push_back(embed(m, annihilator(cutoffs[m])));
    n_ops.push_back(embed(m, number_op(cutoffs[m])));
    kerr_terms(mp.modes[m], a_ops[m], n_ops[m], H, jumps);
  }
  for (std::size_t x = 0; x < modes; ++x)
    for (std::size_t y = x + 1; y < modes; ++y)
      if (mp.coupling(x, y) != 0.0) H += cplx{mp.coupling(x, y)} * (n_ops[x] * n_ops[y]);

  DenseLiouvillian L;
  L.matrix = assemble(H, jumps);
  L.hilbert_dim = d;
  L.model = ModelTag::kMultiModeKerr;
  std::ostringstream doc;
  doc << "product Fock basis, mode 0 most significant, cutoffs (";
  for (std::size_t m = 0; m < modes; ++m) doc << (m ? "," : "") << cutoffs[m];
  doc << "); superket |i><j| at index i + " << d << "*j; generators [n_a, .]";
  L.basis_doc = doc.str();
  for (std::size_t m = 0; m < modes; ++m) {
    std::vector<int> diag(d);
    for (std::size_t k = 0; k < d; ++k) diag[k] = int(std::lround(n_ops[m](k, k).real()));
    L.charges.push_back(charges_from_diag(diag, 1));
  }
  return L;
}

DenseLiouvillian build_ising_liouvillian(const ising::IsingParams& p,
                                         std::size_t max_superop_dim) {
  p.validate();
  if (p.n > 16) {
    std::ostringstream os;
    os << "build_ising_liouvillian: n = " << p.n << " needs "
       << 16.0 * std::pow(16.0, double(p.n)) / (1024.0 * 1024.0) << " MiB";
    throw Error(ErrorCode::kGuard, os.str());
  }
  const std::size_t d = std::size_t{1} << p.n;
  check_guard(d, max_superop_dim, "build_ising_liouvillian");

  const ComplexMatrix sz = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  const ComplexMatrix sm = ComplexMatrix::from_rows({{0.0, 0.0}, {1.0, 0.0}});  // |↓><↑|
  auto embed = [&](std::size_t spin, const ComplexMatrix& op) {
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (std::size_t k = 0; k < p.n; ++k)
      out = kron(out, k == spin ? op : ComplexMatrix::identity(2));
    return out;
  };
  std::vector<ComplexMatrix> z_ops, m_ops;
  for (std::size_t j = 0; j < p.n; ++j) {
    z_ops.push_back(embed(j, sz));
    m_ops.push_back(embed(j, sm));
  }
  ComplexMatrix H(d, d);
  std::vector<ComplexMatrix> jumps;
  for (std::size_t j = 0; j < p.n; ++j) {
    H += cplx{p.h[j]} * z_ops[j];
    for (std::size_t k = j + 1; k < p.n; ++k)
      if (p.coupling(j, k) != 0.0) H += cplx{p.coupling(j, k)} * (z_ops[j] * z_ops[k]);
    if (p.gamma_minus[j] > 0.0) jumps.push_back(cplx{std::sqrt(p.gamma_minus[j])} * m_ops[j]);
    if (p.gamma_plus[j] > 0.0)
      jumps.push_back(cplx{std::sqrt(p.gamma_plus[j])} * m_ops[j].adjoint());
    if (p.gamma_phi[j] > 0.0) jumps.push_back(cplx{std::sqrt(p.gamma_phi[j])} * z_ops[j]);
  }

  DenseLiouvillian L;
  L.matrix = assemble(H, jumps);
  L.hilbert_dim = d;
  L.model = ModelTag::kIsing;
  std::ostringstream doc;
  doc << "spin product basis, spin 0 most significant, local order (up, down); superket "
         "|i><j| at index i + "
      << d << "*j; generators [sz_j, .]/2";
  L.basis_doc = doc.str();
  for (std::size_t j = 0; j < p.n; ++j) {
    std::vector<int> diag(d);
    for (std::size_t k = 0; k < d; ++k) diag[k] = int(std::lround(z_ops[j](k, k).real()));
    L.charges.push_back(charges_from_diag(diag, 2));
  }
  return L;
}

std::vector<double> symmetry_violation(const DenseLiouvillian& L) {
  const std::size_t n = L.dim();
  std::vector<double> out;
  for (const auto& g : L.charges) {
    require(g.size() == n, ErrorCode::kDimension, "symmetry_violation: charge vector size");
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(L.matrix(i, k) * double(g[k] - g[i])));
    out.push_back(worst);
  }
  return out;
}

double trace_violation(const DenseLiouvillian& L) {
  const std::size_t d = L.hilbert_dim;
  double worst = 0.0;
  for (std::size_t k = 0; k < L.dim(); ++k) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += L.matrix(i + d * i, k);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

SpectralDecomposition oracle_spectrum(const DenseLiouvillian& L, const EigOptions& opts) {
  return eig_nonhermitian(L.matrix, opts);
}

std::vector<Sector> sectors(const DenseLiouvillian& L) {
  std::map<std::vector<int>, std::vector<std::size_t>> groups;
  std::vector<int> key(L.charges.size());
  for (std::size_t k = 0; k < L.dim(); ++k) {
    for (std::size_t g = 0; g < L.charges.size(); ++g) key[g] = L.charges[g][k];
    groups[key].push_back(k);
  }
  std::vector<Sector> out;
  out.reserve(groups.size());
  for (auto& [charge, idx] : groups) out.push_back({charge, std::move(idx)});
  return out;
}

ComplexMatrix sector_block(const DenseLiouvillian& L, const Sector& s, double scale) {
  const std::size_t b = s.indices.size();
  ComplexMatrix out(b, b);
  std::vector<char> inside(L.dim(), 0);
  for (std::size_t k : s.indices) inside[k] = 1;
  double leak = 0.0;
  for (std::size_t c = 0; c < b; ++c) {
    const std::size_t col = s.indices[c];
    for (std::size_t row = 0; row < L.dim(); ++row)
      if (!inside[row]) leak = std::max(leak, std::abs(L.matrix(row, col)));
    for (std::size_t r = 0; r < b; ++r) out(r, c) = L.matrix(s.indices[r], col);
  }
  if (scale < 0.0) scale = L.matrix.max_abs();
  if (leak > 1e-12 * std::max(1.0, scale)) {
    std::ostringstream os;
    os << "sector_block: matrix couples the sector to its complement (" << leak << ")";
    throw Error(ErrorCode::kNumeric, os.str());
  }
  return out;
}

std::vector<SectorSpectrum> sector_spectra(const DenseLiouvillian& L) {
  std::vector<SectorSpectrum> out;
  const double scale = L.matrix.max_abs();
  for (const auto& s : sectors(L)) out.push_back({s.charge, eigvals(sector_block(L, s, scale))});
  return out;
}

std::vector<cplx> blocked_eigenvalues(const DenseLiouvillian& L) {
  std::vector<cplx> out;
  out.reserve(L.dim());
  for (const auto& s : sector_spectra(L))
    out.insert(out.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  return out;
}

ComplexMatrix steady_state(const DenseLiouvillian& L) {
  std::vector<cplx> near_zero;
  const Sector* home = nullptr;
  const auto all = sectors(L);
  const double scale = L.matrix.max_abs();
  SpectralDecomposition home_dec;
  std::size_t home_index = 0;
  for (const auto& s : all) {
    const ComplexMatrix block = sector_block(L, s, scale);
    const double tol = zero_tolerance(block);
    const bool neutral = std::all_of(s.charge.begin(), s.charge.end(), [](int c) { return c == 0; });
    if (neutral) {
      SpectralDecomposition dec = eig_nonhermitian(block);
      for (std::size_t k = 0; k < dec.eigenvalues.size(); ++k) {
        if (std::abs(dec.eigenvalues[k]) < tol) {
          near_zero.push_back(dec.eigenvalues[k]);
          home_index = k;
        }
      }
      home = &s;
      home_dec = std::move(dec);
    } else {
      for (cplx v : eigvals(block))
        if (std::abs(v) < tol) near_zero.push_back(v);
    }
  }
  if (near_zero.size() != 1 || home == nullptr) {
    std::ostringstream os;
    os << "steady_state: expected one zero eigenvalue, found " << near_zero.size();
    for (cplx v : near_zero) os << " (" << v.real() << "," << v.imag() << ")";
    throw Error(ErrorCode::kDegenerate, os.str());
  }

  std::vector<cplx> full(L.dim(), 0.0);
  for (std::size_t r = 0; r < home->indices.size(); ++r)
    full[home->indices[r]] = home_dec.right_vectors(r, home_index);
  ComplexMatrix rho = devectorize(std::span<const cplx>(full));
  rho = 0.5 * (rho + rho.adjoint());
  const cplx tr = rho.trace();
  require(std::abs(tr) > 1e-300, ErrorCode::kNumeric, "steady_state: null vector is traceless");
  rho *= 1.0 / tr;

  const auto ev = eigvals_hermitian(rho);
  if (!ev.empty() && ev.front() < -1e-10) {
    std::ostringstream os;
    os << "steady_state: state is not positive (min eigenvalue " << ev.front() << ")";
    throw Error(ErrorCode::kNumeric, os.str());
  }
  const ComplexMatrix residual = L.matrix * vectorize(rho);
  if (residual.max_abs() > 1e-8 * std::max(1.0, L.matrix.one_norm())) {
    std::ostringstream os;
    os << "steady_state: residual " << residual.max_abs() << " after Hermitization";
    throw Error(ErrorCode::kNumeric, os.str());
  }
  return rho;
}

std::vector<ComplexMatrix> evolve(const DenseLiouvillian& L, const ComplexMatrix& rho0,
                                  std::span<const double> times) {
  const std::size_t d = L.hilbert_dim;
  require(rho0.rows() == d && rho0.cols() == d, ErrorCode::kDimension,
          "evolve: rho0 has the wrong dimension");
  for (double t : times)
    require(std::isfinite(t) && t >= 0.0, ErrorCode::kInvalidArgument,
            "evolve: times must be finite and >= 0");
  const std::span<const cplx> v0 = rho0.data();
  std::vector<std::vector<cplx>> out(times.size(), std::vector<cplx>(L.dim(), 0.0));
  const double scale = L.matrix.max_abs();
  for (const auto& s : sectors(L)) {
    const std::size_t b = s.indices.size();
    ComplexMatrix sub(b, 1);
    bool any = false;
    for (std::size_t r = 0; r < b; ++r) {
      sub(r, 0) = v0[s.indices[r]];
      any = any || sub(r, 0) != cplx{};
    }
    if (!any) continue;
    const ComplexMatrix block = sector_block(L, s, scale);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const ComplexMatrix w = expm(block, times[ti]) * sub;
      for (std::size_t r = 0; r < b; ++r) out[ti][s.indices[r]] = w(r, 0);
    }
  }
  std::vector<ComplexMatrix> result;
  result.reserve(times.size());
  for (auto& v : out) result.push_back(devectorize(std::span<const cplx>(v)));
  return result;
}

RegressionCorrelator regression_correlator(const DenseLiouvillian& L, const ComplexMatrix& A,
                                           const ComplexMatrix& B, const ComplexMatrix& rho_ss,
                                           std::span<const double> times) {
  const std::size_t d = L.hilbert_dim;
  require(A.rows() == d && A.cols() == d && B.rows() == d && B.cols() == d &&
              rho_ss.rows() == d && rho_ss.cols() == d,
          ErrorCode::kDimension, "regression_correlator: operator dimension mismatch");
  RegressionCorrelator out;
  for (const auto& x : evolve(L, B * rho_ss, times)) out.a_then_b.push_back((A * x).trace());
  for (const auto& x : evolve(L, rho_ss * B, times)) out.b_then_a.push_back((A * x).trace());
  return out;
}

std::vector<cplx> kerr_green_oracle(const kerr::KerrParams& p, std::size_t cutoff,
                                    std::span<const double> times) {
  const DenseLiouvillian L = build_kerr_liouvillian(p, cutoff);
  const ComplexMatrix rho = steady_state(L);
  const ComplexMatrix a = annihilator(cutoff);
  const RegressionCorrelator c = regression_correlator(L, a, a.adjoint(), rho, times);
  std::vector<cplx> g(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) g[k] = -kI * (c.a_then_b[k] - c.b_then_a[k]);
  return g;
}

}  // namespace weaksym::oracle
