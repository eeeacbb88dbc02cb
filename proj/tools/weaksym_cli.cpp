// weaksym command-line front end. Talks to the library only through the C
// interface.
//
// Exit codes: 0 success / validation pass, 1 validation fail, 2 config, usage
// or guard error, 3 numerical or internal failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "run_config.hpp"
#include "weaksym/weaksym.h"

using nlohmann::json;
using wscli::RunConfig;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ApiError : std::runtime_error {
  ws_status status;
  ApiError(ws_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

void check(ws_status s) {
  if (s != WS_OK) {
    std::string msg = ws_last_error();
    if (msg.empty()) msg = ws_status_string(s);
    throw ApiError(s, msg);
  }
}

template <typename T, void (*F)(T*)>
struct Deleter {
  void operator()(T* p) const { F(p); }
};
using MatrixPtr = std::unique_ptr<ws_matrix, Deleter<ws_matrix, ws_matrix_free>>;
using IsingPtr = std::unique_ptr<ws_ising, Deleter<ws_ising, ws_ising_free>>;
using MultiModePtr = std::unique_ptr<ws_multimode, Deleter<ws_multimode, ws_multimode_free>>;
using LiouvillianPtr =
    std::unique_ptr<ws_liouvillian, Deleter<ws_liouvillian, ws_liouvillian_free>>;
using EpListPtr = std::unique_ptr<ws_ep_list, Deleter<ws_ep_list, ws_ep_list_free>>;
using MatchPtr = std::unique_ptr<ws_match_report, Deleter<ws_match_report, ws_match_report_free>>;

using cx = std::complex<double>;
cx from_ws(ws_complex z) { return {z.re, z.im}; }
ws_complex to_ws(cx z) { return {z.real(), z.imag()}; }

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }
  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  std::ostringstream out_;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(cfg.output_path, std::ios::binary);
  if (!f) throw wscli::ConfigError("cannot write output file '" + cfg.output_path + "'");
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json header(const char* command) {
  return json{{"schema_version", wscli::kSchemaVersion}, {"command", command}};
}

json cjson(cx z) { return json::array({z.real(), z.imag()}); }

ws_kerr_params kerr_params(const wscli::KerrBlock& k) {
  return {k.omega0, k.U, k.kappa, k.n_th, k.kappa_phi};
}

IsingPtr make_ising(const RunConfig& cfg) {
  ws_ising* s = nullptr;
  const auto& b = cfg.ising;
  if (b.random) {
    check(ws_ising_random(b.n, cfg.seed, &s));
  } else {
    check(ws_ising_create(b.n, b.J.data(), b.h.data(), b.gamma_minus.data(), b.gamma_plus.data(),
                          b.gamma_phi.data(), &s));
  }
  return IsingPtr(s);
}

MultiModePtr make_multimode(const RunConfig& cfg) {
  std::vector<ws_kerr_params> modes;
  for (const auto& m : cfg.multimode.modes) modes.push_back(kerr_params(m));
  ws_multimode* mm = nullptr;
  check(ws_multimode_create(modes.data(), modes.size(), cfg.multimode.cross_kerr.data(), &mm));
  return MultiModePtr(mm);
}

ws_active_sign active_sign(const RunConfig& cfg) {
  return cfg.ising.active_sign == "printed" ? WS_SIGN_PRINTED : WS_SIGN_TRACE_CONSISTENT;
}

std::string block_label(const int* m, std::size_t n) {
  std::string s;
  for (std::size_t j = 0; j < n; ++j) s += m[j] > 0 ? '+' : (m[j] < 0 ? '-' : '0');
  return s;
}

std::string branch_label(const int* b, std::size_t n) {
  std::string s;
  for (std::size_t j = 0; j < n; ++j) s += b[j] > 0 ? '+' : (b[j] < 0 ? '-' : '.');
  return s;
}

std::vector<cx> to_cx(const std::vector<ws_complex>& v) {
  std::vector<cx> out;
  out.reserve(v.size());
  for (auto z : v) out.push_back(from_ws(z));
  return out;
}

std::vector<cx> read_matrix(const ws_matrix* m, std::size_t& rows, std::size_t& cols) {
  check(ws_matrix_shape(m, &rows, &cols));
  std::vector<ws_complex> buf(rows * cols);
  check(ws_matrix_copy_data(m, buf.data(), buf.size()));
  return to_cx(buf);
}

// ---------------------------------------------------------------------------
// analytic data

std::vector<cx> kerr_analytic(const RunConfig& cfg, std::vector<std::pair<int, int>>* labels) {
  const ws_kerr_params p = kerr_params(cfg.kerr);
  std::vector<cx> out;
  for (int m = -cfg.m_max; m <= cfg.m_max; ++m)
    for (int mu = 0; mu <= cfg.mu_max; ++mu) {
      ws_complex z;
      check(ws_kerr_eigenvalue(&p, m, mu, &z));
      out.push_back(from_ws(z));
      if (labels) labels->emplace_back(m, mu);
    }
  return out;
}

// Every (m_1..m_N, μ_1..μ_N) with |m_a| <= m_max and μ_a <= mu_max, mode 0
// slowest.
std::vector<std::vector<int>> multimode_labels(const RunConfig& cfg) {
  const std::size_t n = cfg.multimode.modes.size();
  std::vector<std::vector<int>> out;
  std::vector<int> cur(2 * n);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == 2 * n) {
      out.push_back(cur);
      return;
    }
    const bool is_m = k < n;
    const int lo = is_m ? -cfg.m_max : 0;
    const int hi = is_m ? cfg.m_max : cfg.mu_max;
    for (int v = lo; v <= hi; ++v) {
      cur[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

std::vector<cx> multimode_analytic(const RunConfig& cfg, const ws_multimode* mm,
                                   const std::vector<std::vector<int>>& labels) {
  const std::size_t n = cfg.multimode.modes.size();
  std::vector<cx> out;
  for (const auto& l : labels) {
    ws_complex z;
    check(ws_multimode_eigenvalue(mm, l.data(), l.data() + n, &z));
    out.push_back(from_ws(z));
  }
  return out;
}

struct IsingSpectrum {
  std::vector<cx> lambda;
  std::vector<int> blocks;
  std::vector<int> branches;
};

IsingSpectrum ising_analytic(const ws_ising* s, ws_active_sign sign) {
  std::size_t n = 0, count = 0;
  check(ws_ising_params(s, &n, nullptr, nullptr, nullptr, nullptr, nullptr));
  ws_status st = ws_ising_spectrum(s, sign, nullptr, nullptr, nullptr, 0, &count);
  if (st != WS_BUFFER_TOO_SMALL) check(st);
  std::vector<ws_complex> lam(count);
  IsingSpectrum out;
  out.blocks.resize(count * n);
  out.branches.resize(count * n);
  check(ws_ising_spectrum(s, sign, lam.data(), out.blocks.data(), out.branches.data(), count,
                          &count));
  out.lambda = to_cx(lam);
  return out;
}

// Product state with every spin along +x.
MatrixPtr all_x_state(std::size_t n) {
  const std::size_t d = std::size_t{1} << n;
  std::vector<ws_complex> v(d * d, ws_complex{1.0 / double(d), 0.0});
  ws_matrix* m = nullptr;
  check(ws_matrix_from_data(d, d, v.data(), &m));
  return MatrixPtr(m);
}

// ρ = G G† / Tr, G entries uniform in [-1, 1] + i[-1, 1] from a fixed engine.
MatrixPtr random_state(std::size_t n, std::uint64_t seed) {
  const std::size_t d = std::size_t{1} << n;
  std::mt19937_64 eng(seed);
  auto uni = [&] { return double(eng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  std::vector<cx> g(d * d);
  for (auto& z : g) {
    const double re = uni();
    z = cx(re, uni());
  }
  std::vector<cx> rho(d * d, 0.0);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < d; ++r) {
      cx acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += g[r + d * k] * std::conj(g[c + d * k]);
      rho[r + d * c] = acc;
    }
  cx tr = 0.0;
  for (std::size_t k = 0; k < d; ++k) tr += rho[k + d * k];
  std::vector<ws_complex> v(d * d);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = to_ws(rho[k] / tr.real());
  ws_matrix* m = nullptr;
  check(ws_matrix_from_data(d, d, v.data(), &m));
  return MatrixPtr(m);
}

MatrixPtr initial_state(const RunConfig& cfg) {
  return cfg.initial_state == "random" ? random_state(cfg.ising.n, cfg.seed)
                                       : all_x_state(cfg.ising.n);
}

// ---------------------------------------------------------------------------
// commands

int cmd_kerr_spectrum(const RunConfig& cfg) {
  const ws_kerr_params p = kerr_params(cfg.kerr);
  std::vector<std::pair<int, int>> labels;
  const auto lam = kerr_analytic(cfg, &labels);
  Csv csv({"m", "mu", "re_lambda", "im_lambda", "kappa_tilde", "u_tilde"});
  json rows = json::array();
  for (std::size_t k = 0; k < lam.size(); ++k) {
    double ut = 0.0, kt = 0.0;
    check(ws_kerr_sector_rates(&p, labels[k].first, nullptr, &ut, &kt));
    csv.row(labels[k].first, labels[k].second, lam[k].real(), lam[k].imag(), kt, ut);
    rows.push_back(json{{"m", labels[k].first},
                        {"mu", labels[k].second},
                        {"lambda", cjson(lam[k])},
                        {"kappa_tilde", kt},
                        {"u_tilde", ut}});
  }
  if (cfg.format == "csv") {
    emit(cfg, csv.str());
  } else {
    json j = header("kerr-spectrum");
    j["rows"] = rows;
    emit(cfg, dump(j));
  }
  return kExitPass;
}

int cmd_kerr_green(const RunConfig& cfg) {
  const ws_kerr_params p = kerr_params(cfg.kerr);
  const bool freq = cfg.domain == "frequency";
  const auto grid = freq ? cfg.omega.points() : cfg.t.points();
  std::vector<ws_complex> g(grid.size());
  if (freq) {
    check(ws_kerr_green_freq(&p, grid.data(), grid.size(), g.data()));
  } else {
    check(ws_kerr_green_time(&p, grid.data(), grid.size(), g.data()));
  }
  const char* x = freq ? "omega" : "t";
  if (cfg.format == "csv") {
    Csv csv({x, "re_G", "im_G"});
    for (std::size_t k = 0; k < grid.size(); ++k) csv.row(grid[k], g[k].re, g[k].im);
    emit(cfg, csv.str());
  } else {
    json j = header("kerr-green");
    j["domain"] = cfg.domain;
    json rows = json::array();
    for (std::size_t k = 0; k < grid.size(); ++k)
      rows.push_back(json{{x, grid[k]}, {"G", cjson(from_ws(g[k]))}});
    j["rows"] = rows;
    emit(cfg, dump(j));
  }
  return kExitPass;
}

int cmd_kerr_eigvec(const RunConfig& cfg) {
  const ws_kerr_params p = kerr_params(cfg.kerr);
  ws_complex lam;
  ws_matrix *r = nullptr, *l = nullptr;
  check(ws_kerr_eigenpair(&p, cfg.m, cfg.mu, cfg.cutoff, &lam, &r, &l));
  MatrixPtr right(r), left(l);
  std::size_t rows = 0, cols = 0;
  const auto rv = read_matrix(right.get(), rows, cols);
  const auto lv = read_matrix(left.get(), rows, cols);
  if (cfg.format == "csv") {
    Csv csv({"which", "p", "q", "re", "im"});
    for (const auto& [name, v] : {std::pair{"right", &rv}, std::pair{"left", &lv}})
      for (std::size_t q = 0; q < cols; ++q)
        for (std::size_t pp = 0; pp < rows; ++pp)
          if ((*v)[pp + rows * q] != cx{})
            csv.row(name, pp, q, (*v)[pp + rows * q].real(), (*v)[pp + rows * q].imag());
    emit(cfg, csv.str());
  } else {
    json j = header("kerr-eigvec");
    j["m"] = cfg.m;
    j["mu"] = cfg.mu;
    j["cutoff"] = cfg.cutoff;
    j["lambda"] = cjson(from_ws(lam));
    for (const auto& [name, v] : {std::pair{"right", &rv}, std::pair{"left", &lv}}) {
      json entries = json::array();
      for (std::size_t q = 0; q < cols; ++q)
        for (std::size_t pp = 0; pp < rows; ++pp)
          if ((*v)[pp + rows * q] != cx{})
            entries.push_back(json{{"p", pp}, {"q", q}, {"value", cjson((*v)[pp + rows * q])}});
      j[name] = entries;
    }
    emit(cfg, dump(j));
  }
  return kExitPass;
}

int cmd_multimode_spectrum(const RunConfig& cfg) {
  const auto mm = make_multimode(cfg);
  const std::size_t n = cfg.multimode.modes.size();
  const auto labels = multimode_labels(cfg);
  const auto lam = multimode_analytic(cfg, mm.get(), labels);
  auto join = [&](const std::vector<int>& l, std::size_t off) {
    std::string s;
    for (std::size_t a = 0; a < n; ++a) s += (a ? ";" : "") + std::to_string(l[off + a]);
    return s;
  };
  if (cfg.format == "csv") {
    Csv csv({"m", "mu", "re_lambda", "im_lambda"});
    for (std::size_t k = 0; k < lam.size(); ++k)
      csv.row(join(labels[k], 0), join(labels[k], n), lam[k].real(), lam[k].imag());
    emit(cfg, csv.str());
  } else {
    json j = header("multimode-spectrum");
    json rows = json::array();
    for (std::size_t k = 0; k < lam.size(); ++k) {
      std::vector<int> m(labels[k].begin(), labels[k].begin() + long(n));
      std::vector<int> mu(labels[k].begin() + long(n), labels[k].end());
      rows.push_back(json{{"m", m}, {"mu", mu}, {"lambda", cjson(lam[k])}});
    }
    j["rows"] = rows;
    emit(cfg, dump(j));
  }
  return kExitPass;
}

int cmd_ising_spectrum(const RunConfig& cfg) {
  const auto s = make_ising(cfg);
  const std::size_t n = cfg.ising.n;
  const auto spec = ising_analytic(s.get(), active_sign(cfg));
  if (cfg.format == "csv") {
    Csv csv({"block", "branches", "re_lambda", "im_lambda"});
    for (std::size_t k = 0; k < spec.lambda.size(); ++k)
      csv.row(block_label(&spec.blocks[k * n], n), branch_label(&spec.branches[k * n], n),
              spec.lambda[k].real(), spec.lambda[k].imag());
    emit(cfg, csv.str());
  } else {
    json j = header("ising-spectrum");
    json rows = json::array();
    for (std::size_t k = 0; k < spec.lambda.size(); ++k)
      rows.push_back(json{{"block", block_label(&spec.blocks[k * n], n)},
                          {"branches", branch_label(&spec.branches[k * n], n)},
                          {"lambda", cjson(spec.lambda[k])}});
    j["rows"] = rows;
    emit(cfg, dump(j));
  }
  return kExitPass;
}

int cmd_ising_coherence(const RunConfig& cfg) {
  const auto s = make_ising(cfg);
  const auto t = cfg.t.points();
  std::vector<ws_complex> c(t.size());
  check(ws_ising_coherence(s.get(), cfg.spin, t.data(), t.size(), c.data()));
  if (cfg.format == "csv") {
    Csv csv({"t", "re_coh", "im_coh", "abs_coh"});
    for (std::size_t k = 0; k < t.size(); ++k)
      csv.row(t[k], c[k].re, c[k].im, std::abs(from_ws(c[k])));
    emit(cfg, csv.str());
  } else {
    json j = header("ising-coherence");
    j["spin"] = cfg.spin;
    json rows = json::array();
    for (std::size_t k = 0; k < t.size(); ++k)
      rows.push_back(json{{"t", t[k]}, {"coherence", cjson(from_ws(c[k]))}});
    j["rows"] = rows;
    emit(cfg, dump(j));
  }
  return kExitPass;
}

int cmd_ising_evolve(const RunConfig& cfg) {
  const auto s = make_ising(cfg);
  const auto rho0 = initial_state(cfg);
  const auto t = cfg.t.points();
  Csv csv({"t", "row", "col", "re", "im"});
  json steps = json::array();
  for (double tk : t) {
    ws_matrix* out = nullptr;
    check(ws_ising_evolve(s.get(), rho0.get(), tk, &out));
    MatrixPtr rho(out);
    std::size_t rows = 0, cols = 0;
    const auto v = read_matrix(rho.get(), rows, cols);
    cx tr = 0.0;
    for (std::size_t k = 0; k < rows; ++k) tr += v[k + rows * k];
    if (cfg.format == "csv") {
      for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r)
          csv.row(tk, r, c, v[r + rows * c].real(), v[r + rows * c].imag());
    } else {
      json entries = json::array();
      for (const auto& z : v) entries.push_back(cjson(z));
      steps.push_back(json{{"t", tk}, {"trace", cjson(tr)}, {"rho_column_major", entries}});
    }
  }
  if (cfg.format == "csv") {
    emit(cfg, csv.str());
  } else {
    json j = header("ising-evolve");
    j["initial_state"] = cfg.initial_state;
    j["steps"] = steps;
    emit(cfg, dump(j));
  }
  return kExitPass;
}

struct EpFlag {
  std::vector<int> block;
  std::size_t spin;
};

std::vector<EpFlag> ep_flags(const ws_ising* s, std::size_t n) {
  ws_ep_list* raw = nullptr;
  check(ws_ising_detect_eps(s, 1e-9, &raw));
  EpListPtr list(raw);
  std::size_t count = 0;
  check(ws_ep_list_size(list.get(), &count));
  std::vector<EpFlag> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k].block.resize(n);
    check(ws_ep_list_entry(list.get(), k, out[k].block.data(), &out[k].spin));
  }
  return out;
}

// Per-spin eigenvalue shifts between two parameter sets, branches paired to
// minimize the total displacement.
struct ProbeResult {
  double flagged_min = INFINITY;
  double flagged_max = 0.0;
  double unflagged_max = 0.0;
};

ProbeResult probe_shifts(const ws_ising* before, const ws_ising* after, std::size_t n,
                         const std::vector<EpFlag>& flags) {
  ProbeResult r;
  std::vector<int> block(n, -1);
  while (true) {
    for (std::size_t j = 0; j < n; ++j) {
      ws_complex b[2], a[2];
      check(ws_ising_spin_eigenvalue(before, block.data(), j, WS_BRANCH_PLUS, &b[0]));
      check(ws_ising_spin_eigenvalue(before, block.data(), j, WS_BRANCH_MINUS, &b[1]));
      check(ws_ising_spin_eigenvalue(after, block.data(), j, WS_BRANCH_PLUS, &a[0]));
      check(ws_ising_spin_eigenvalue(after, block.data(), j, WS_BRANCH_MINUS, &a[1]));
      const double d00 = std::abs(from_ws(a[0]) - from_ws(b[0]));
      const double d11 = std::abs(from_ws(a[1]) - from_ws(b[1]));
      const double d01 = std::abs(from_ws(a[1]) - from_ws(b[0]));
      const double d10 = std::abs(from_ws(a[0]) - from_ws(b[1]));
      const bool straight = d00 + d11 <= d01 + d10;
      const double s1 = straight ? d00 : d01;
      const double s2 = straight ? d11 : d10;
      const bool flagged = std::any_of(flags.begin(), flags.end(), [&](const EpFlag& f) {
        return f.spin == j && f.block == block;
      });
      if (flagged) {
        r.flagged_min = std::min({r.flagged_min, s1, s2});
        r.flagged_max = std::max({r.flagged_max, s1, s2});
      } else {
        r.unflagged_max = std::max({r.unflagged_max, s1, s2});
      }
    }
    std::size_t k = n;
    while (k > 0 && block[k - 1] == 1) block[--k] = -1;
    if (k == 0) break;
    ++block[k - 1];
  }
  if (flags.empty()) r.flagged_min = 0.0;
  return r;
}

int cmd_ep_scan(const RunConfig& cfg) {
  const auto s = make_ising(cfg);
  const std::size_t n = cfg.ising.n;
  const auto flags = ep_flags(s.get(), n);
  if (cfg.format == "csv") {
    Csv csv({"block", "spin"});
    for (const auto& f : flags) csv.row(block_label(f.block.data(), n), f.spin);
    emit(cfg, csv.str());
    return kExitPass;
  }
  json j = header("ep-scan");
  json list = json::array();
  for (const auto& f : flags) list.push_back(json{{"block", f.block}, {"spin", f.spin}});
  j["flags"] = list;
  j["count"] = flags.size();
  if (cfg.probe_delta > 0.0) {
    std::vector<double> J(n * n), h(n), gm(n), gp(n), gphi(n);
    check(ws_ising_params(s.get(), nullptr, J.data(), h.data(), gm.data(), gp.data(), gphi.data()));
    for (double& g : gp) g += cfg.probe_delta;
    ws_ising* raw = nullptr;
    check(ws_ising_create(n, J.data(), h.data(), gm.data(), gp.data(), gphi.data(), &raw));
    IsingPtr shifted(raw);
    const auto after = ep_flags(shifted.get(), n);
    const ProbeResult pr = probe_shifts(s.get(), shifted.get(), n, flags);
    j["probe"] = json{{"delta_gamma_plus", cfg.probe_delta},
                      {"sqrt_delta", std::sqrt(cfg.probe_delta)},
                      {"flags_after", after.size()},
                      {"flagged_shift_min", pr.flagged_min},
                      {"flagged_shift_max", pr.flagged_max},
                      {"unflagged_shift_max", pr.unflagged_max}};
  }
  emit(cfg, dump(j));
  return kExitPass;
}

// ---------------------------------------------------------------------------
// validate

struct Comparison {
  std::size_t analytic_count = 0;
  std::size_t oracle_count = 0;
  std::size_t matched = 0;
  std::size_t unmatched_analytic = 0;
  std::size_t unmatched_oracle = 0;
  double max_residual = 0.0;
  double max_nearest_distance = 0.0;
};

Comparison compare_spectra(const std::vector<cx>& analytic, const std::vector<cx>& oracle,
                           double tol) {
  std::vector<ws_complex> a, o;
  for (cx z : analytic) a.push_back(to_ws(z));
  for (cx z : oracle) o.push_back(to_ws(z));
  ws_match_report* raw = nullptr;
  check(ws_match_spectra(a.data(), a.size(), o.data(), o.size(), tol, &raw));
  MatchPtr rep(raw);
  Comparison c;
  c.analytic_count = a.size();
  c.oracle_count = o.size();
  check(ws_match_report_summary(rep.get(), &c.matched, &c.unmatched_analytic, &c.unmatched_oracle,
                                &c.max_residual));
  for (cx z : analytic) {
    double best = INFINITY;
    for (cx w : oracle) best = std::min(best, std::abs(z - w));
    c.max_nearest_distance = std::max(c.max_nearest_distance, best);
  }
  return c;
}

Comparison compare_values(const std::vector<cx>& analytic, const std::vector<cx>& oracle) {
  Comparison c;
  c.analytic_count = analytic.size();
  c.oracle_count = oracle.size();
  c.matched = analytic.size();
  for (std::size_t k = 0; k < analytic.size(); ++k)
    c.max_residual = std::max(c.max_residual, std::abs(analytic[k] - oracle[k]));
  c.max_nearest_distance = c.max_residual;
  return c;
}

std::vector<cx> oracle_eigenvalues(const ws_liouvillian* L, bool blocked) {
  std::size_t count = 0;
  ws_status st = ws_liouvillian_eigenvalues(L, blocked ? 1 : 0, nullptr, 0, &count);
  if (st != WS_BUFFER_TOO_SMALL) check(st);
  std::vector<ws_complex> ev(count);
  check(ws_liouvillian_eigenvalues(L, blocked ? 1 : 0, ev.data(), count, &count));
  return to_cx(ev);
}

int cmd_validate(const RunConfig& cfg, bool timing) {
  using clock = std::chrono::steady_clock;
  json phases = json::object();
  auto t_phase = clock::now();
  auto lap = [&](const char* name) {
    const auto now = clock::now();
    phases[name] = std::chrono::duration<double>(now - t_phase).count();
    t_phase = now;
  };

  json checks = json::object();
  Comparison cmp;
  const bool blocked = cfg.oracle == "blocked";
  const std::string& target = cfg.target;
  auto unsupported = [&] {
    throw wscli::ConfigError("config field 'validate.target': '" + target +
                             "' is not available for model " + cfg.model);
  };

  if (cfg.model == "kerr") {
    const ws_kerr_params p = kerr_params(cfg.kerr);
    if (target == "spectrum") {
      const auto analytic = kerr_analytic(cfg, nullptr);
      lap("analytic");
      ws_liouvillian* raw = nullptr;
      check(ws_oracle_kerr(&p, cfg.cutoff, 0, &raw));
      LiouvillianPtr L(raw);
      double sym = 0.0, tr = 0.0;
      check(ws_liouvillian_checks(L.get(), &sym, &tr));
      checks["symmetry_violation"] = sym;
      checks["trace_violation"] = tr;
      lap("build");
      const auto oracle = oracle_eigenvalues(L.get(), blocked);
      lap("diagonalize");
      cmp = compare_spectra(analytic, oracle, cfg.tol);
      lap("match");
    } else if (target == "green") {
      const auto t = cfg.t.points();
      std::vector<ws_complex> a(t.size()), o(t.size());
      check(ws_kerr_green_time(&p, t.data(), t.size(), a.data()));
      lap("analytic");
      check(ws_oracle_kerr_green(&p, cfg.cutoff, t.data(), t.size(), o.data()));
      lap("oracle");
      cmp = compare_values(to_cx(a), to_cx(o));
    } else {
      unsupported();
    }
  } else if (cfg.model == "multimode-kerr") {
    if (target != "spectrum") unsupported();
    const auto mm = make_multimode(cfg);
    const auto analytic = multimode_analytic(cfg, mm.get(), multimode_labels(cfg));
    lap("analytic");
    ws_liouvillian* raw = nullptr;
    check(ws_oracle_multimode(mm.get(), cfg.multimode.cutoffs.data(), 0, &raw));
    LiouvillianPtr L(raw);
    double sym = 0.0, tr = 0.0;
    check(ws_liouvillian_checks(L.get(), &sym, &tr));
    checks["symmetry_violation"] = sym;
    checks["trace_violation"] = tr;
    lap("build");
    const auto oracle = oracle_eigenvalues(L.get(), blocked);
    lap("diagonalize");
    cmp = compare_spectra(analytic, oracle, cfg.tol);
    lap("match");
  } else {
    const auto s = make_ising(cfg);
    ws_liouvillian* raw = nullptr;
    check(ws_oracle_ising(s.get(), 0, &raw));
    LiouvillianPtr L(raw);
    double sym = 0.0, tr = 0.0;
    check(ws_liouvillian_checks(L.get(), &sym, &tr));
    checks["symmetry_violation"] = sym;
    checks["trace_violation"] = tr;
    lap("build");
    const auto t = cfg.t.points();
    if (target == "spectrum") {
      const auto analytic = ising_analytic(s.get(), active_sign(cfg)).lambda;
      lap("analytic");
      const auto oracle = oracle_eigenvalues(L.get(), blocked);
      lap("diagonalize");
      cmp = compare_spectra(analytic, oracle, cfg.tol);
      lap("match");
    } else if (target == "coherence") {
      std::vector<ws_complex> a(t.size());
      check(ws_ising_coherence(s.get(), cfg.spin, t.data(), t.size(), a.data()));
      lap("analytic");
      const auto rho0 = all_x_state(cfg.ising.n);
      const std::size_t d = std::size_t{1} << cfg.ising.n;
      const std::size_t bit = std::size_t{1} << (cfg.ising.n - 1 - cfg.spin);
      std::vector<cx> o;
      for (double tk : t) {
        ws_matrix* out = nullptr;
        check(ws_liouvillian_evolve(L.get(), rho0.get(), tk, &out));
        MatrixPtr rho(out);
        std::size_t rows = 0, cols = 0;
        const auto v = read_matrix(rho.get(), rows, cols);
        // <σ+> = Tr(σ+ ρ) = Σ <..↓..|ρ|..↑..>
        cx acc = 0.0;
        for (std::size_t i = 0; i < d; ++i)
          if (!(i & bit)) acc += v[(i | bit) + d * i];
        o.push_back(acc);
      }
      lap("oracle");
      cmp = compare_values(to_cx(a), o);
    } else if (target == "evolve") {
      const auto rho0 = initial_state(cfg);
      std::vector<cx> a, o;
      for (double tk : t) {
        ws_matrix *ra = nullptr, *ro = nullptr;
        check(ws_ising_evolve(s.get(), rho0.get(), tk, &ra));
        MatrixPtr ma(ra);
        check(ws_liouvillian_evolve(L.get(), rho0.get(), tk, &ro));
        MatrixPtr mo(ro);
        std::size_t rows = 0, cols = 0;
        const auto va = read_matrix(ma.get(), rows, cols);
        const auto vo = read_matrix(mo.get(), rows, cols);
        a.insert(a.end(), va.begin(), va.end());
        o.insert(o.end(), vo.begin(), vo.end());
      }
      lap("evolve");
      cmp = compare_values(a, o);
    } else {
      unsupported();
    }
  }

  const bool pass = cmp.unmatched_analytic == 0 && cmp.max_residual <= cfg.tol;
  json report = header("validate");
  report["config"] = wscli::serialize_config(cfg);
  report["target"] = target;
  report["match_report"] = json{{"analytic_count", cmp.analytic_count},
                                {"oracle_count", cmp.oracle_count},
                                {"matched", cmp.matched},
                                {"unmatched_analytic", cmp.unmatched_analytic},
                                {"unmatched_oracle", cmp.unmatched_oracle},
                                {"max_residual", cmp.max_residual},
                                {"max_nearest_distance", cmp.max_nearest_distance},
                                {"tolerance", cfg.tol}};
  report["checks"] = checks;
  report["pass"] = pass;
  report["environment"] = json{{"version", ws_version()}};
  if (timing) report["timing"] = phases;
  emit(cfg, dump(report));
  return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

struct CommonFlags {
  std::string config;
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cutoff;
  std::optional<double> tol;
  bool dump_config = false;
  bool timing = false;
  std::optional<std::string> model;
  std::optional<std::string> target;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON run configuration");
  sub->add_option("--output", f.output, "output file (default: stdout)");
  sub->add_option("--format", f.format, "csv or json");
  sub->add_option("--seed", f.seed, "seed for random instances");
  sub->add_option("--cutoff", f.cutoff, "Fock cutoff");
  sub->add_option("--tol", f.tol, "validation tolerance");
  sub->add_flag("--dump-config", f.dump_config, "print the resolved configuration and exit");
}

RunConfig resolve(const CommonFlags& f, const std::string& model, const std::string& task) {
  RunConfig cfg;
  json file;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw wscli::ConfigError("cannot open config file '" + f.config + "'");
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw wscli::ConfigError("config file '" + f.config + "' is not valid JSON: " + e.what());
    }
    cfg = wscli::parse_config(file);
  }
  if (!model.empty()) {
    if (file.contains("model") && cfg.model != model)
      throw wscli::ConfigError("config field 'model': '" + cfg.model +
                               "' does not match this subcommand (" + model + ")");
    if (cfg.model != model) {
      // Re-parse so the parameter block is read for the right model.
      json patched = file.is_null() ? json::object() : file;
      patched["model"] = model;
      cfg = wscli::parse_config(patched);
    }
  }
  if (f.model) {
    json patched = file.is_null() ? json::object() : file;
    patched["model"] = *f.model;
    cfg = wscli::parse_config(patched);
  }
  cfg.task = task;
  if (f.output) cfg.output_path = *f.output;
  if (f.format) cfg.format = *f.format;
  if (f.seed) cfg.seed = *f.seed;
  if (f.cutoff) cfg.cutoff = *f.cutoff;
  if (f.tol) cfg.tol = *f.tol;
  if (f.target) cfg.target = *f.target;
  cfg.validate();
  return cfg;
}

int exit_for(ws_status s) {
  switch (s) {
    case WS_INVALID_ARGUMENT:
    case WS_DIMENSION:
    case WS_TRUNCATION:
    case WS_UNSUPPORTED:
    case WS_GUARD:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form Liouvillian spectra with a dense reference solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ws_version()));

  struct Entry {
    const char* name;
    const char* help;
    const char* model;
    const char* task;
    std::function<int(const RunConfig&)> run;
  };
  CommonFlags flags;
  const std::vector<Entry> entries = {
      {"kerr-spectrum", "Kerr eigenvalues and renormalized rates", "kerr", "spectrum",
       cmd_kerr_spectrum},
      {"kerr-green", "Kerr retarded Green's function", "kerr", "green", cmd_kerr_green},
      {"kerr-eigvec", "Kerr right/left eigenoperators for one sector", "kerr", "eigvec",
       cmd_kerr_eigvec},
      {"multimode-spectrum", "cross-Kerr coupled modes", "multimode-kerr", "spectrum",
       cmd_multimode_spectrum},
      {"ising-spectrum", "all 4^n Ising Liouvillian eigenvalues", "ising", "spectrum",
       cmd_ising_spectrum},
      {"ising-coherence", "single-spin coherence from the all-x state", "ising", "coherence",
       cmd_ising_coherence},
      {"ising-evolve", "density matrix evolution", "ising", "evolve", cmd_ising_evolve},
      {"ep-scan", "exceptional point scan with perturbation probe", "ising", "ep-scan",
       cmd_ep_scan},
      {"validate", "compare closed forms against the dense solver", "", "validate",
       [&](const RunConfig& c) { return cmd_validate(c, flags.timing); }},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, flags);
    if (std::string(e.name) == "validate") {
      sub->add_flag("--timing", flags.timing, "include wall-clock timing in the report");
      sub->add_option("--model", flags.model, "kerr, multimode-kerr or ising");
      sub->add_option("--target", flags.target, "spectrum, green, coherence or evolve");
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (!subs[k]->parsed()) continue;
      const RunConfig cfg = resolve(flags, entries[k].model, entries[k].task);
      if (flags.dump_config) {
        std::cout << dump(wscli::serialize_config(cfg));
        return kExitPass;
      }
      return entries[k].run(cfg);
    }
  } catch (const wscli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
