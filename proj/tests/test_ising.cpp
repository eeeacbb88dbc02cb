#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "weaksym/ising.hpp"
#include "weaksym/oracle.hpp"

using namespace weaksym;
using namespace weaksym::ising;

namespace {

IsingParams two_spins() {
  IsingParams p;
  p.n = 2;
  p.J = {0, 0.3, 0.3, 0};
  p.h = {0.2, -0.4};
  p.gamma_minus = {0.5, 0.8};
  p.gamma_plus = {0.3, 0.1};
  p.gamma_phi = {0.1, 0.25};
  return p;
}

IsingParams three_spins() {
  IsingParams p;
  p.n = 3;
  p.J = {0, 0.4, -0.7, 0.4, 0, 0.25, -0.7, 0.25, 0};
  p.h = {0.3, -0.5, 0.9};
  p.gamma_minus = {0.6, 0.2, 0.9};
  p.gamma_plus = {0.15, 0.7, 0.35};
  p.gamma_phi = {0.05, 0.3, 0.0};
  return p;
}

IsingParams ep_chain(std::size_t n, double gp) {
  IsingParams p;
  p.n = n;
  p.J.assign(n * n, 0.5);
  for (std::size_t j = 0; j < n; ++j) p.J[j * n + j] = 0.0;
  p.h.assign(n, 0.0);
  p.gamma_minus.assign(n, 1.0);
  p.gamma_plus.assign(n, gp);
  p.gamma_phi.assign(n, 0.0);
  return p;
}

std::vector<cplx> values(const std::vector<BlockSpectrum>& s) {
  std::vector<cplx> v;
  for (auto& b : s) v.push_back(b.lambda_total);
  return v;
}

ComplexMatrix random_state(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix a(d, d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < d; ++r) a(r, c) = cplx(g(rng), g(rng));
  auto rho = a * a.adjoint();
  rho *= 1.0 / rho.trace().real();
  return rho;
}

}  // namespace

TEST_CASE("n=2 spectrum against frozen dense eigenvalues") {
  // numpy eig of the 16x16 superoperator
  const std::vector<cplx> ref{
      {-1.6999999999999977, 0.0},
      {-1.55, -1.2000000000000002},
      {-1.55, -0.4},
      {-1.55, 0.4},
      {-1.55, 1.2000000000000002},
      {-1.478914847464931, -0.3345764961920104},
      {-1.4789148474649283, 0.33457649619201},
      {-1.431484073474352, -0.9504816966208643},
      {-1.4314840734743515, 0.9504816966208641},
      {-1.2210851525350692, -1.2654235038079906},
      {-1.2210851525350706, 1.2654235038079897},
      {-0.9, 0.0},
      {-0.8000000000000006, 0.0},
      {-0.6685159265256483, -0.15048169662086402},
      {-0.6685159265256477, 0.1504816966208647},
      {0.0, 0.0},
  };
  auto an = values(enumerate_spectrum(two_spins()));
  REQUIRE(an.size() == 16);
  auto r = match_spectra(an, ref, 1e-12);
  CHECK(r.pairs.size() == 16);
}

TEST_CASE("spectrum structure") {
  auto p = random_params(4, 5);
  auto s = enumerate_spectrum(p);
  CHECK(s.size() == 256);
  std::size_t zeros = 0;
  for (auto& b : s) {
    CHECK(b.lambda_total.real() <= 1e-12);
    if (std::abs(b.lambda_total) < 1e-12) ++zeros;
    CHECK(b.chi.size() == b.block.active_count());
  }
  CHECK(zeros == 1);
  // closed under complex conjugation
  auto v = values(s);
  std::vector<cplx> conj_v;
  for (auto z : v) conj_v.push_back(std::conj(z));
  CHECK(match_spectra(v, conj_v, 1e-12).pairs.size() == v.size());

  std::size_t visited = 0;
  visit_spectrum(p, [&](const BlockSpectrum& b) {
    CHECK(b.lambda_total == s[visited].lambda_total);
    ++visited;
  });
  CHECK(visited == 256);
}

TEST_CASE("random instances are deterministic and in range") {
  auto a = random_params(6, 99), b = random_params(6, 99), c = random_params(6, 100);
  CHECK(a.J == b.J);
  CHECK(a.gamma_plus == b.gamma_plus);
  CHECK(a.J != c.J);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(a.coupling(j, j) == 0.0);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(a.coupling(j, k) == a.coupling(k, j));
      CHECK(std::abs(a.coupling(j, k)) <= 1.0);
    }
    CHECK(a.gamma_minus[j] >= 0.1);
    CHECK(a.gamma_plus[j] <= 1.0);
    CHECK(a.gamma_phi[j] <= 0.5);
  }
}

TEST_CASE("active spins: closed form matches the 2x2 generator") {
  auto p = random_params(3, 21);
  for_each_block(3, [&](const BlockIndex& blk) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (blk.m[j] != 0) {
        cplx want = cplx(0, blk.m[j] == 1 ? -2.0 * p.h[j] : 2.0 * p.h[j]) - p.Gamma(j) -
                    2.0 * p.gamma_phi[j];
        CHECK(std::abs(spin_eigenvalue(p, blk, j, Branch::kPlus) - want) < 1e-14);
        continue;
      }
      double je = j_eff(p, blk, j);
      auto a = active_spin_matrix(p, j, je);
      CHECK(std::abs(a.trace() + 2.0 * p.Gamma(j)) < 1e-14);
      auto ev = eigvals(a);
      std::vector<cplx> cf{spin_eigenvalue(p, blk, j, Branch::kPlus),
                           spin_eigenvalue(p, blk, j, Branch::kMinus)};
      CHECK(match_spectra(cf, ev, 1e-12).pairs.size() == 2);
      auto printed = spin_eigenvalue(p, blk, j, Branch::kPlus, ActiveSign::kPrinted);
      CHECK(std::abs(printed - cf[0] - 2.0 * p.Gamma(j)) < 1e-14);

      for (auto chi : {Branch::kPlus, Branch::kMinus}) {
        auto e = spin_eigenvectors(p, blk, j, chi);
        CHECK_FALSE(e.exceptional);
        CHECK(std::abs(e.l_up * e.r_up + e.l_down * e.r_down - 1.0) < 1e-12);
        cplx r0 = a(0, 0) * e.r_up + a(0, 1) * e.r_down - e.lambda * e.r_up;
        cplx r1 = a(1, 0) * e.r_up + a(1, 1) * e.r_down - e.lambda * e.r_down;
        CHECK(std::abs(r0) + std::abs(r1) < 1e-12);
      }
    }
  });
}

TEST_CASE("coherence against frozen dense evolution") {
  // numpy expm of the 64x64 superoperator from the all-x state
  auto p = three_spins();
  CHECK(std::abs(single_spin_coherence(p, 0, 0.7) -
                 cplx(0.1616625298406666, 0.13412608099465687)) < 1e-12);
  CHECK(std::abs(single_spin_coherence(p, 0, 2.5) -
                 cplx(0.014268553174379878, -0.009626029265745347)) < 1e-12);
  CHECK(std::abs(single_spin_coherence(p, 1, 0.0) - 0.5) < 1e-15);
}

TEST_CASE("evolution preserves trace, hermiticity and positivity") {
  auto p = three_spins();
  auto rho0 = random_state(8, 4);
  auto r0 = evolve_density_matrix(p, rho0, 0.0);
  CHECK((r0 - rho0).max_abs() < 1e-12);
  auto L = oracle::build_ising_liouvillian(p);
  std::vector<double> ts{0.3, 1.7, 4.0};
  auto ref = oracle::evolve(L, rho0, ts);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    auto r = evolve_density_matrix(p, rho0, ts[k]);
    CHECK((r - ref[k]).max_abs() < 1e-12);
    CHECK(std::abs(r.trace() - 1.0) < 1e-12);
    CHECK((r - r.adjoint()).max_abs() < 1e-13);
    CHECK(eigvals_hermitian(r).front() > -1e-12);
  }
  auto late = evolve_density_matrix(p, rho0, 200.0);
  CHECK((late - oracle::steady_state(L)).max_abs() < 1e-10);

  ComplexMatrix not_hermitian = rho0;
  not_hermitian(0, 1) += 0.1;
  CHECK_THROWS_AS(evolve_density_matrix(p, not_hermitian, 1.0), Error);
  ComplexMatrix wrong_size(4, 4);
  CHECK_THROWS_AS(evolve_density_matrix(p, wrong_size, 1.0), Error);
}

TEST_CASE("exceptional points") {
  auto p = ep_chain(3, 1.0);
  auto eps = detect_eps(p);
  CHECK(eps.size() == 12);
  for (auto& e : eps) {
    CHECK(e.block.m[e.spin] == 0);
    int s = 0;
    for (std::size_t k = 0; k < 3; ++k)
      if (k != e.spin) s += e.block.m[k];
    CHECK(std::abs(s) == 1);
    auto a = active_spin_matrix(p, e.spin, j_eff(p, e.block, e.spin));
    CHECK(eig_nonhermitian(a).any_defective());
    auto v = spin_eigenvectors(p, e.block, e.spin, Branch::kPlus);
    CHECK(v.exceptional);
  }
  CHECK(detect_eps(ep_chain(3, 1.05)).empty());

  // Jordan-form propagation still agrees with the dense solver
  auto rho0 = random_state(8, 8);
  auto L = oracle::build_ising_liouvillian(p);
  std::vector<double> ts{1.5};
  auto ref = oracle::evolve(L, rho0, ts);
  CHECK((evolve_density_matrix(p, rho0, 1.5) - ref[0]).max_abs() < 1e-12);
}

TEST_CASE("guards and argument checks") {
  auto big = random_params(13, 1);
  try {
    enumerate_spectrum(big);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGuard);
  }
  auto p = two_spins();
  p.gamma_minus[0] = -1;
  CHECK_THROWS_AS(p.validate(), Error);
  auto q = two_spins();
  q.J = {0, 0.3, 0.2, 0};
  CHECK_THROWS_AS(q.validate(), Error);
}

namespace {

IsingParams uncoupled(std::size_t n, std::vector<double> h, std::vector<double> gm,
                      std::vector<double> gp, std::vector<double> gphi) {
  IsingParams p;
  p.n = n;
  p.J.assign(n * n, 0.0);
  p.h = std::move(h);
  p.gamma_minus = std::move(gm);
  p.gamma_plus = std::move(gp);
  p.gamma_phi = std::move(gphi);
  return p;
}

}  // namespace

TEST_CASE("effective coupling examples") {
  auto p = ep_chain(4, 1.0);
  BlockIndex zero{{0, 0, 0, 0}};
  for (std::size_t j = 0; j < 4; ++j) CHECK(j_eff(p, zero, j) == 0.0);
  BlockIndex up{{1, 1, 0, 1}};
  CHECK(j_eff(p, up, 2) == doctest::Approx(1.5));

  auto q = random_params(4, 8);
  BlockIndex b{{1, -1, 0, 1}};
  for (std::size_t j = 0; j < 4; ++j) {
    double s = 0;
    for (std::size_t k = 0; k < 4; ++k) s += q.coupling(j, k) * b.m[k];
    CHECK(std::abs(j_eff(q, b, j) - s) < 1e-15);
  }
}

TEST_CASE("2x2 generator examples") {
  auto p = uncoupled(1, {0.0}, {2.0}, {1.0}, {0.0});
  auto a = active_spin_matrix(p, 0, 0.0);
  std::vector<cplx> want{0.0, -3.0};
  CHECK(match_spectra(want, eigvals(a), 1e-14).pairs.size() == 2);

  auto q = uncoupled(1, {0.0}, {0.8}, {0.8}, {0.0});
  CHECK(eig_nonhermitian(active_spin_matrix(q, 0, 0.4)).any_defective());

  auto e = active_spin_matrix(p, 0, 0.3);
  cplx S = std::sqrt(cplx(1.5 * 1.5) - 4 * 0.3 * cplx(0.3, -0.5));
  std::vector<cplx> cf{-1.5 + S, -1.5 - S};
  CHECK(match_spectra(cf, eigvals(e), 1e-14).pairs.size() == 2);
  CHECK(std::abs(discriminant_root(p, 0, 0.3) * discriminant_root(p, 0, 0.3) - S * S) < 1e-14);
}

TEST_CASE("single spin eigenvalue examples") {
  auto p = uncoupled(2, {0.0, 0.0}, {0.6, 0.4}, {0.2, 0.9}, {0.0, 0.0});
  BlockIndex b{{0, 1}};
  CHECK(std::abs(spin_eigenvalue(p, b, 0, Branch::kPlus)) < 1e-15);
  CHECK(std::abs(spin_eigenvalue(p, b, 0, Branch::kMinus) + 0.8) < 1e-15);
  CHECK(std::abs(spin_eigenvalue(p, b, 1, Branch::kPlus) + p.Gamma(1)) < 1e-15);

  IsingParams c;
  c.n = 2;
  c.J = {0, 0.4, 0.4, 0};
  c.h = {0, 0};
  c.gamma_plus = {0.3, 0.2};
  c.gamma_minus = {0.5, 0.7};
  c.gamma_phi = {0, 0};
  auto L = oracle::build_ising_liouvillian(c);
  BlockIndex blk{{1, 0}};
  std::vector<cplx> an{spin_eigenvalue(c, blk, 0, Branch::kPlus) +
                           spin_eigenvalue(c, blk, 1, Branch::kPlus),
                       spin_eigenvalue(c, blk, 0, Branch::kPlus) +
                           spin_eigenvalue(c, blk, 1, Branch::kMinus)};
  for (auto& s : oracle::sector_spectra(L))
    if (s.charge == std::vector<int>{1, 0}) {
      auto r = match_spectra(an, s.eigenvalues, 1e-12);
      CHECK(r.pairs.size() == 2);
      CHECK(s.eigenvalues.size() == 2);
    }
}

TEST_CASE("single spin eigenvector examples") {
  auto p = uncoupled(1, {0.0}, {0.6}, {0.2}, {0.0});
  BlockIndex b{{0}};
  auto e = spin_eigenvectors(p, b, 0, Branch::kPlus);
  CHECK(std::abs(e.r_up / (e.r_up + e.r_down) - 0.25) < 1e-15);
  CHECK(std::abs(e.l_up - e.l_down) < 1e-15);

  // η = 0 with a counting field: eigenvectors from the 2x2 fallback
  auto q = three_spins();
  q.gamma_plus = q.gamma_minus;
  BlockIndex c{{0, 1, -1}};
  auto a = active_spin_matrix(q, 0, j_eff(q, c, 0));
  for (auto chi : {Branch::kPlus, Branch::kMinus}) {
    auto v = spin_eigenvectors(q, c, 0, chi);
    cplx r0 = a(0, 0) * v.r_up + a(0, 1) * v.r_down - v.lambda * v.r_up;
    cplx r1 = a(1, 0) * v.r_up + a(1, 1) * v.r_down - v.lambda * v.r_down;
    CHECK(std::abs(r0) + std::abs(r1) < 1e-10);
    cplx l0 = v.l_up * a(0, 0) + v.l_down * a(1, 0) - v.lambda * v.l_up;
    cplx l1 = v.l_up * a(0, 1) + v.l_down * a(1, 1) - v.lambda * v.l_down;
    CHECK(std::abs(l0) + std::abs(l1) < 1e-10);
  }
}

TEST_CASE("spectrum examples") {
  auto one = uncoupled(1, {0.35}, {0.8}, {0.0}, {0.0});
  std::vector<cplx> want{0.0, -0.8, cplx(-0.4, -0.7), cplx(-0.4, 0.7)};
  CHECK(match_spectra(values(enumerate_spectrum(one)), want, 1e-15).pairs.size() == 4);

  auto a = uncoupled(1, {0.2}, {0.5}, {0.3}, {0.1});
  auto b = uncoupled(1, {-0.4}, {0.8}, {0.1}, {0.25});
  auto two = uncoupled(2, {0.2, -0.4}, {0.5, 0.8}, {0.3, 0.1}, {0.1, 0.25});
  std::vector<cplx> sums;
  for (auto x : values(enumerate_spectrum(a)))
    for (auto y : values(enumerate_spectrum(b))) sums.push_back(x + y);
  CHECK(match_spectra(values(enumerate_spectrum(two)), sums, 1e-14).pairs.size() == 16);
}

TEST_CASE("coherence examples") {
  auto p = uncoupled(3, {0.2, -0.4, 0.1}, {0.5, 0.8, 0.3}, {0.3, 0.1, 0.6}, {0.1, 0.25, 0.0});
  for (std::size_t j = 0; j < 3; ++j)
    for (double t : {0.0, 0.4, 2.0}) {
      cplx want = 0.5 * std::exp(cplx(-p.Gamma(j) - 2 * p.gamma_phi[j], 2 * p.h[j]) * t);
      CHECK(std::abs(single_spin_coherence(p, j, t) - want) < 1e-15);
    }
}

TEST_CASE("evolution examples") {
  auto p = uncoupled(2, {0.2, -0.4}, {0.5, 0.8}, {0.3, 0.1}, {0.1, 0.25});
  auto late = evolve_density_matrix(p, random_state(4, 3), 200.0);
  double u0 = 0.3 / 0.8, u1 = 0.1 / 0.9;
  std::vector<double> diag{u0 * u1, u0 * (1 - u1), (1 - u0) * u1, (1 - u0) * (1 - u1)};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(late(i, i) - diag[i]) < 1e-12);

  auto q = three_spins();
  ComplexMatrix x(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t k = 0; k < 8; ++k) x(i, k) = 1.0 / 8;
  auto L = oracle::build_ising_liouvillian(q);
  auto ref = devectorize(expm(L.matrix, 1.0) * vectorize(x));
  CHECK((evolve_density_matrix(q, x, 1.0) - ref).max_abs() < 1e-9);
}

TEST_CASE("coalescence reached through rounding") {
  // Γ_0 = 0.6 and J_eff = 0.4 - 0.7 differ from 2|J_eff| only by rounding
  auto q = three_spins();
  q.gamma_plus = q.gamma_minus;
  BlockIndex c{{0, 1, 1}};
  bool listed = false;
  for (auto& e : detect_eps(q)) listed = listed || (e.block == c && e.spin == 0);
  CHECK(listed);
  CHECK(spin_eigenvectors(q, c, 0, Branch::kPlus).exceptional);

  auto rho0 = random_state(8, 12);
  auto L = oracle::build_ising_liouvillian(q);
  std::vector<double> ts{0.5, 3.0, 8.0};
  auto ref = oracle::evolve(L, rho0, ts);
  for (std::size_t k = 0; k < ts.size(); ++k)
    CHECK((evolve_density_matrix(q, rho0, ts[k]) - ref[k]).max_abs() < 1e-12);
}

TEST_CASE("no exceptional points away from the condition") {
  auto p = ep_chain(3, 1.0);
  p.gamma_plus = {1.1, 1.2, 0.7};
  CHECK(detect_eps(p).empty());
  auto q = ep_chain(3, 1.0);
  q.J.assign(9, 0.0);
  CHECK(detect_eps(q).empty());
}
