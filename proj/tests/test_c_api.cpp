#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "weaksym/weaksym.h"

namespace {

const ws_kerr_params kRef{0.0, 1.0, 1.0, 0.1, 0.0};

double dist(ws_complex a, double re, double im) { return std::hypot(a.re - re, a.im - im); }

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(ws_version()).size() > 0);
  CHECK(std::string(ws_status_string(WS_OK)) != std::string(ws_status_string(WS_GUARD)));
  CHECK(ws_status_string(static_cast<ws_status>(999)) != nullptr);
}

TEST_CASE("null pointers are rejected") {
  ws_complex z;
  CHECK(ws_kerr_gamma(nullptr, 1, &z) == WS_NULL_POINTER);
  CHECK(ws_kerr_gamma(&kRef, 1, nullptr) == WS_NULL_POINTER);
  CHECK(std::string(ws_last_error()).size() > 0);
  CHECK(ws_matrix_create(2, 2, nullptr) == WS_NULL_POINTER);
  ws_matrix_free(nullptr);
  ws_spectrum_free(nullptr);
  ws_ising_free(nullptr);
  ws_liouvillian_free(nullptr);
  ws_match_report_free(nullptr);
  ws_ep_list_free(nullptr);
  ws_multimode_free(nullptr);
}

TEST_CASE("errors map to status codes and clear on success") {
  ws_kerr_params bad = kRef;
  bad.kappa = -1;
  ws_complex z;
  CHECK(ws_kerr_eigenvalue(&bad, 1, 0, &z) == WS_INVALID_ARGUMENT);
  CHECK(std::string(ws_last_error()).find("kappa") != std::string::npos);
  CHECK(ws_kerr_eigenvalue(&kRef, 1, 0, &z) == WS_OK);
  CHECK(std::string(ws_last_error()).empty());
  CHECK(dist(z, -0.5954451150104265, -0.09544511501034769) < 1e-12);

  ws_matrix *r = nullptr, *l = nullptr;
  ws_complex lam;
  CHECK(ws_kerr_eigenpair(&kRef, 3, 10, 12, &lam, &r, &l) == WS_TRUNCATION);
  CHECK(r == nullptr);

  ws_liouvillian* L = nullptr;
  CHECK(ws_oracle_kerr(&kRef, 100, 0, &L) == WS_GUARD);
  CHECK(L == nullptr);

  ws_kerr_params closed{0.0, 1.0, 0.0, 0.0, 0.0};
  REQUIRE(ws_oracle_kerr(&closed, 4, 0, &L) == WS_OK);
  ws_matrix* ss = nullptr;
  CHECK(ws_liouvillian_steady_state(L, &ss) == WS_DEGENERATE);
  ws_liouvillian_free(L);
}

TEST_CASE("matrix round trip, eig and expm") {
  ws_complex data[4] = {{0, 0}, {0, 0}, {1, 0}, {0, 0}};  // [[0,1],[0,0]]
  ws_matrix* m = nullptr;
  REQUIRE(ws_matrix_from_data(2, 2, data, &m) == WS_OK);
  size_t r, c;
  CHECK(ws_matrix_shape(m, &r, &c) == WS_OK);
  CHECK((r == 2 && c == 2));
  ws_complex v;
  CHECK(ws_matrix_get(m, 0, 1, &v) == WS_OK);
  CHECK(v.re == 1.0);
  CHECK(ws_matrix_get(m, 2, 0, &v) == WS_DIMENSION);
  ws_complex buf[4];
  CHECK(ws_matrix_copy_data(m, buf, 3) == WS_BUFFER_TOO_SMALL);
  CHECK(ws_matrix_copy_data(m, buf, 4) == WS_OK);
  CHECK(std::memcmp(buf, data, sizeof data) == 0);

  ws_spectrum* s = nullptr;
  REQUIRE(ws_eig(m, &s) == WS_OK);
  size_t n;
  ws_spectrum_size(s, &n);
  CHECK(n == 2);
  double ov;
  int def;
  CHECK(ws_spectrum_entry(s, 0, &v, &ov, &def) == WS_OK);
  CHECK(def == 1);
  CHECK(ws_spectrum_entry(s, 5, &v, &ov, &def) == WS_DIMENSION);
  ws_spectrum_free(s);

  ws_matrix* e = nullptr;
  REQUIRE(ws_expm(m, 3.0, &e) == WS_OK);
  ws_matrix_get(e, 0, 1, &v);
  CHECK(std::abs(v.re - 3.0) < 1e-14);
  ws_matrix_free(e);
  CHECK(ws_matrix_set(m, 1, 1, ws_complex{2, 0}) == WS_OK);
  ws_matrix_free(m);
}

TEST_CASE("kerr functions") {
  ws_complex g;
  double ut, kt;
  REQUIRE(ws_kerr_sector_rates(&kRef, 2, &g, &ut, &kt) == WS_OK);
  CHECK(kt == g.re);
  CHECK(std::abs(ut - g.im / 2) < 1e-15);

  double ts[2] = {0.0, 1.0};
  ws_complex out[2];
  REQUIRE(ws_kerr_green_time(&kRef, ts, 2, out) == WS_OK);
  CHECK(dist(out[0], 0, -1) == 0.0);
  CHECK(dist(out[1], -0.09808370103265047, -0.5550837372831785) < 1e-10);
  ws_complex ref[2];
  REQUIRE(ws_oracle_kerr_green(&kRef, 40, ts, 2, ref) == WS_OK);
  CHECK(dist(ref[1], out[1].re, out[1].im) < 1e-10);
  double om = 1.0;
  REQUIRE(ws_kerr_green_freq(&kRef, &om, 1, out) == WS_OK);
  CHECK(dist(out[0], 0.7696299467876798, -0.5860096907084623) < 1e-10);

  ws_complex lam;
  ws_matrix *r = nullptr, *l = nullptr;
  REQUIRE(ws_kerr_eigenpair(&kRef, 1, 0, 20, &lam, &r, &l) == WS_OK);
  size_t rows, cols;
  ws_matrix_shape(r, &rows, &cols);
  CHECK(rows == 20);
  ws_matrix_free(r);
  ws_matrix_free(l);
}

TEST_CASE("multimode and its oracle") {
  ws_kerr_params modes[2] = {{0, 1, 1, 0, 0}, {0, 1, 1, 0, 0}};
  double cross[4] = {0, 0.5, 0.5, 0};
  ws_multimode* mm = nullptr;
  REQUIRE(ws_multimode_create(modes, 2, cross, &mm) == WS_OK);
  int m[2] = {1, 0}, mu[2] = {0, 0};
  ws_complex z;
  REQUIRE(ws_multimode_eigenvalue(mm, m, mu, &z) == WS_OK);
  CHECK(dist(z, -0.5, 0.0) < 1e-12);

  size_t cut[2] = {4, 4};
  ws_liouvillian* L = nullptr;
  REQUIRE(ws_oracle_multimode(mm, cut, 0, &L) == WS_OK);
  size_t hd, sd;
  ws_liouvillian_dims(L, &hd, &sd);
  CHECK(hd == 16);
  CHECK(sd == 256);
  double sym, tr;
  ws_liouvillian_checks(L, &sym, &tr);
  CHECK(sym == 0.0);
  CHECK(tr < 1e-13);
  ws_liouvillian_free(L);

  double asym[4] = {0, 0.5, 0.4, 0};
  ws_multimode* bad = nullptr;
  CHECK(ws_multimode_create(modes, 2, asym, &bad) == WS_INVALID_ARGUMENT);
  ws_multimode_free(mm);
}

TEST_CASE("ising spectrum through the C API matches its oracle") {
  ws_ising* s = nullptr;
  REQUIRE(ws_ising_random(3, 7, &s) == WS_OK);
  size_t count = 0;
  std::vector<ws_complex> lam(10);
  CHECK(ws_ising_spectrum(s, WS_SIGN_TRACE_CONSISTENT, lam.data(), nullptr, nullptr, 10, &count) ==
        WS_BUFFER_TOO_SMALL);
  CHECK(count == 64);
  lam.resize(64);
  std::vector<int> blocks(64 * 3), branches(64 * 3);
  REQUIRE(ws_ising_spectrum(s, WS_SIGN_TRACE_CONSISTENT, lam.data(), blocks.data(),
                            branches.data(), 64, &count) == WS_OK);
  for (size_t k = 0; k < 64 * 3; ++k) CHECK((blocks[k] == 0) == (branches[k] != 0));

  ws_liouvillian* L = nullptr;
  REQUIRE(ws_oracle_ising(s, 0, &L) == WS_OK);
  std::vector<ws_complex> orc(64);
  REQUIRE(ws_liouvillian_eigenvalues(L, 0, orc.data(), 64, &count) == WS_OK);
  ws_match_report* rep = nullptr;
  REQUIRE(ws_match_spectra(lam.data(), 64, orc.data(), 64, 1e-8, &rep) == WS_OK);
  size_t matched, ua, uo;
  double maxr;
  ws_match_report_summary(rep, &matched, &ua, &uo, &maxr);
  CHECK(matched == 64);
  CHECK(ua == 0);
  CHECK(maxr < 1e-10);
  size_t ai, oi;
  double res;
  CHECK(ws_match_report_pair(rep, 0, &ai, &oi, &res) == WS_OK);
  CHECK(ws_match_report_pair(rep, 64, &ai, &oi, &res) == WS_DIMENSION);
  ws_match_report_free(rep);

  // evolution against the oracle
  ws_matrix* rho0 = nullptr;
  ws_matrix_create(8, 8, &rho0);
  for (size_t i = 0; i < 8; ++i)
    for (size_t j = 0; j < 8; ++j) ws_matrix_set(rho0, i, j, ws_complex{1.0 / 8, 0});
  ws_matrix *a = nullptr, *b = nullptr;
  REQUIRE(ws_ising_evolve(s, rho0, 1.3, &a) == WS_OK);
  REQUIRE(ws_liouvillian_evolve(L, rho0, 1.3, &b) == WS_OK);
  double worst = 0;
  for (size_t i = 0; i < 8; ++i)
    for (size_t j = 0; j < 8; ++j) {
      ws_complex x, y;
      ws_matrix_get(a, i, j, &x);
      ws_matrix_get(b, i, j, &y);
      worst = std::max(worst, dist(x, y.re, y.im));
    }
  CHECK(worst < 1e-12);
  ws_matrix_free(a);
  ws_matrix_free(b);
  ws_matrix_free(rho0);
  ws_liouvillian_free(L);

  int frozen[3] = {1, 0, -1};
  ws_matrix* am = nullptr;
  CHECK(ws_ising_active_matrix(s, frozen, 0, &am) == WS_INVALID_ARGUMENT);
  REQUIRE(ws_ising_active_matrix(s, frozen, 1, &am) == WS_OK);
  ws_matrix_free(am);
  ws_complex z;
  CHECK(ws_ising_spin_eigenvalue(s, frozen, 1, WS_BRANCH_MINUS, &z) == WS_OK);
  int bad_block[3] = {2, 0, 0};
  CHECK(ws_ising_spin_eigenvalue(s, bad_block, 1, WS_BRANCH_MINUS, &z) == WS_INVALID_ARGUMENT);
  ws_ising_free(s);
}

TEST_CASE("ising parameters and exceptional points") {
  double J[9] = {0, 0.5, 0.5, 0.5, 0, 0.5, 0.5, 0.5, 0};
  double h[3] = {0, 0, 0}, g[3] = {1, 1, 1}, z[3] = {0, 0, 0};
  ws_ising* s = nullptr;
  REQUIRE(ws_ising_create(3, J, h, g, g, z, &s) == WS_OK);
  size_t n;
  double Jout[9];
  REQUIRE(ws_ising_params(s, &n, Jout, nullptr, nullptr, nullptr, nullptr) == WS_OK);
  CHECK(n == 3);
  CHECK(Jout[1] == 0.5);

  ws_ep_list* eps = nullptr;
  REQUIRE(ws_ising_detect_eps(s, 1e-9, &eps) == WS_OK);
  size_t count;
  ws_ep_list_size(eps, &count);
  CHECK(count == 12);
  int block[3];
  size_t spin;
  REQUIRE(ws_ep_list_entry(eps, 0, block, &spin) == WS_OK);
  CHECK(block[spin] == 0);
  ws_ep_list_free(eps);

  double t[2] = {0.0, 1.0};
  ws_complex coh[2];
  REQUIRE(ws_ising_coherence(s, 0, t, 2, coh) == WS_OK);
  CHECK(dist(coh[0], 0.5, 0.0) < 1e-15);
  CHECK(ws_ising_coherence(s, 3, t, 2, coh) == WS_INVALID_ARGUMENT);
  ws_ising_free(s);

  double neg[3] = {-1, 1, 1};
  CHECK(ws_ising_create(3, J, h, neg, g, z, &s) == WS_INVALID_ARGUMENT);
  ws_ising* big = nullptr;
  CHECK(ws_ising_random(20, 1, &big) == WS_OK);
  size_t cnt;
  ws_complex one;
  CHECK(ws_ising_spectrum(big, WS_SIGN_TRACE_CONSISTENT, &one, nullptr, nullptr, 1, &cnt) ==
        WS_GUARD);
  ws_ising_free(big);
}
