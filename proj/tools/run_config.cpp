#include "run_config.hpp"

#include <cmath>
#include <fstream>

namespace wscli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& path) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(path + key, e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& path) {
  if (!j.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) bad(path + k, "unknown key");
  }
}

KerrBlock read_kerr(const json& j, const std::string& path) {
  check_keys(j, {"omega0", "U", "kappa", "n_th", "kappa_phi"}, path);
  KerrBlock k;
  read(j, "omega0", k.omega0, path);
  read(j, "U", k.U, path);
  read(j, "kappa", k.kappa, path);
  read(j, "n_th", k.n_th, path);
  read(j, "kappa_phi", k.kappa_phi, path);
  return k;
}

json write_kerr(const KerrBlock& k) {
  return json{{"omega0", k.omega0}, {"U", k.U}, {"kappa", k.kappa}, {"n_th", k.n_th},
              {"kappa_phi", k.kappa_phi}};
}

Grid read_grid(const json& j, Grid g, const std::string& path) {
  check_keys(j, {"start", "stop", "step"}, path);
  read(j, "start", g.start, path);
  read(j, "stop", g.stop, path);
  read(j, "step", g.step, path);
  return g;
}

json write_grid(const Grid& g) {
  return json{{"start", g.start}, {"stop", g.stop}, {"step", g.step}};
}

std::vector<double> flatten_square(const json& j, std::size_t n, const std::string& path) {
  std::vector<double> out;
  if (!j.is_array() || j.size() != n) bad(path, "expected " + std::to_string(n) + " rows");
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != n)
      bad(path, "expected " + std::to_string(n) + " columns per row");
    for (const auto& v : row) {
      if (!v.is_number()) bad(path, "expected numbers");
      out.push_back(v.get<double>());
    }
  }
  return out;
}

json square_rows(const std::vector<double>& flat, std::size_t n) {
  json rows = json::array();
  for (std::size_t r = 0; r < n; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < n; ++c) row.push_back(flat[r * n + c]);
    rows.push_back(row);
  }
  return rows;
}

bool one_of(const std::string& v, std::initializer_list<const char*> opts) {
  for (const char* o : opts)
    if (v == o) return true;
  return false;
}

void check_grid(const Grid& g, const std::string& field) {
  if (!std::isfinite(g.start) || !std::isfinite(g.stop) || !std::isfinite(g.step))
    bad(field, "non-finite grid");
  if (!(g.step > 0.0)) bad(field + ".step", "must be > 0");
  if (g.stop < g.start) bad(field, "empty range (stop < start)");
  if ((g.stop - g.start) / g.step > 1e7) bad(field, "more than 1e7 points");
}

}  // namespace

std::vector<double> Grid::points() const {
  const auto count = static_cast<std::size_t>(std::llround((stop - start) / step)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = start + double(k) * step;
  return out;
}

namespace {

void check_kerr_block(const KerrBlock& k, const std::string& where) {
  for (auto [name, v] : {std::pair<const char*, double>{"omega0", k.omega0}, {"U", k.U}})
    if (!std::isfinite(v)) bad(where + name, "must be finite");
  for (auto [name, v] : {std::pair<const char*, double>{"kappa", k.kappa},
                         {"n_th", k.n_th},
                         {"kappa_phi", k.kappa_phi}})
    if (!std::isfinite(v) || v < 0.0) bad(where + name, "must be finite and >= 0");
}

}  // namespace

void RunConfig::validate() const {
  if (!one_of(model, {"kerr", "multimode-kerr", "ising"}))
    bad("model", "must be kerr, multimode-kerr or ising");
  if (!one_of(task, {"spectrum", "green", "eigvec", "coherence", "evolve", "ep-scan", "validate"}))
    bad("task", "unknown task '" + task + "'");
  if (!one_of(format, {"csv", "json"})) bad("output.format", "must be csv or json");
  if (!one_of(domain, {"time", "frequency"})) bad("ranges.domain", "must be time or frequency");
  if (!one_of(initial_state, {"all-x", "random"}))
    bad("ranges.initial_state", "must be all-x or random");
  if (!one_of(target, {"spectrum", "green", "coherence", "evolve"}))
    bad("validate.target", "must be spectrum, green, coherence or evolve");
  if (!one_of(oracle, {"full", "blocked"})) bad("validate.oracle", "must be full or blocked");
  if (!one_of(ising.active_sign, {"trace", "printed"}))
    bad("parameters.active_sign", "must be trace or printed");
  if (m_max < 0) bad("ranges.m_max", "must be >= 0");
  if (mu_max < 0) bad("ranges.mu_max", "must be >= 0");
  if (mu < 0) bad("ranges.mu", "must be >= 0");
  check_grid(t, "ranges.t");
  check_grid(omega, "ranges.omega");
  if (!(tol > 0.0) || !std::isfinite(tol)) bad("tolerances.match", "must be > 0");
  if (!std::isfinite(probe_delta) || probe_delta < 0.0) bad("ranges.probe_delta", "must be >= 0");
  if (cutoff < 2) bad("cutoff", "must be >= 2");
  if (task == "validate" && cutoff * cutoff > 4096 && model == "kerr")
    bad("cutoff", "oracle for cutoff " + std::to_string(cutoff) +
                      " exceeds the 4096x4096 superoperator guard");
  if (model == "ising") {
    if (ising.n == 0) bad("parameters.n", "must be >= 1");
    if (ising.n > 12) bad("parameters.n", "must be <= 12");
    if (spin >= ising.n) bad("ranges.spin", "must be < n");
    if (!ising.random) {
      const std::size_t n = ising.n;
      if (ising.J.size() != n * n) bad("parameters.J", "must be n x n");
      for (const auto* v : {&ising.h, &ising.gamma_minus, &ising.gamma_plus, &ising.gamma_phi})
        if (v->size() != n) bad("parameters", "h and rate arrays must have n entries");
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (ising.J[a * n + b] != ising.J[b * n + a] || (a == b && ising.J[a * n + a] != 0.0))
            bad("parameters.J", "must be symmetric with zero diagonal");
      for (const auto* v : {&ising.gamma_minus, &ising.gamma_plus, &ising.gamma_phi})
        for (double x : *v)
          if (!std::isfinite(x) || x < 0.0) bad("parameters", "rates must be finite and >= 0");
    }
  }
  if (model == "kerr") check_kerr_block(kerr, "parameters.");
  if (model == "multimode-kerr") {
    const std::size_t n = multimode.modes.size();
    for (std::size_t a = 0; a < n; ++a)
      check_kerr_block(multimode.modes[a], "parameters.modes[" + std::to_string(a) + "].");
    if (n == 0) bad("parameters.modes", "at least one mode required");
    if (multimode.cross_kerr.size() != n * n) bad("parameters.cross_kerr", "must be modes x modes");
    if (multimode.cutoffs.size() != n) bad("parameters.cutoffs", "one cutoff per mode");
  }
}

RunConfig parse_config(const json& j) {
  check_keys(j, {"schema_version", "model", "task", "parameters", "ranges", "cutoff", "tolerances",
                 "validate", "output", "seed"},
             "");
  RunConfig c;
  int version = kSchemaVersion;
  read(j, "schema_version", version, "");
  if (version != kSchemaVersion)
    bad("schema_version", "unsupported version " + std::to_string(version));
  read(j, "model", c.model, "");
  read(j, "task", c.task, "");
  read(j, "cutoff", c.cutoff, "");
  read(j, "seed", c.seed, "");

  if (j.contains("parameters")) {
    const json& p = j.at("parameters");
    if (c.model == "kerr") {
      c.kerr = read_kerr(p, "parameters.");
    } else if (c.model == "multimode-kerr") {
      check_keys(p, {"modes", "cross_kerr", "cutoffs"}, "parameters.");
      if (p.contains("modes")) {
        if (!p.at("modes").is_array()) bad("parameters.modes", "expected an array");
        c.multimode.modes.clear();
        for (const auto& m : p.at("modes")) c.multimode.modes.push_back(read_kerr(m, "parameters.modes."));
      }
      const std::size_t n = c.multimode.modes.size();
      if (p.contains("cross_kerr"))
        c.multimode.cross_kerr = flatten_square(p.at("cross_kerr"), n, "parameters.cross_kerr");
      read(p, "cutoffs", c.multimode.cutoffs, "parameters.");
    } else if (c.model == "ising") {
      check_keys(p, {"n", "random", "J", "h", "gamma_minus", "gamma_plus", "gamma_phi",
                     "active_sign"},
                 "parameters.");
      read(p, "n", c.ising.n, "parameters.");
      read(p, "random", c.ising.random, "parameters.");
      read(p, "active_sign", c.ising.active_sign, "parameters.");
      if (p.contains("J")) c.ising.J = flatten_square(p.at("J"), c.ising.n, "parameters.J");
      read(p, "h", c.ising.h, "parameters.");
      read(p, "gamma_minus", c.ising.gamma_minus, "parameters.");
      read(p, "gamma_plus", c.ising.gamma_plus, "parameters.");
      read(p, "gamma_phi", c.ising.gamma_phi, "parameters.");
      if (p.contains("J") && !p.contains("random")) c.ising.random = false;
    } else {
      bad("model", "must be kerr, multimode-kerr or ising");
    }
  }
  if (j.contains("ranges")) {
    const json& r = j.at("ranges");
    check_keys(r, {"m_max", "mu_max", "m", "mu", "spin", "domain", "t", "omega", "probe_delta",
                   "initial_state"},
               "ranges.");
    read(r, "initial_state", c.initial_state, "ranges.");
    read(r, "m_max", c.m_max, "ranges.");
    read(r, "mu_max", c.mu_max, "ranges.");
    read(r, "m", c.m, "ranges.");
    read(r, "mu", c.mu, "ranges.");
    read(r, "spin", c.spin, "ranges.");
    read(r, "domain", c.domain, "ranges.");
    read(r, "probe_delta", c.probe_delta, "ranges.");
    if (r.contains("t")) c.t = read_grid(r.at("t"), c.t, "ranges.t.");
    if (r.contains("omega")) c.omega = read_grid(r.at("omega"), c.omega, "ranges.omega.");
  }
  if (j.contains("tolerances")) {
    check_keys(j.at("tolerances"), {"match"}, "tolerances.");
    read(j.at("tolerances"), "match", c.tol, "tolerances.");
  }
  if (j.contains("validate")) {
    check_keys(j.at("validate"), {"target", "oracle"}, "validate.");
    read(j.at("validate"), "target", c.target, "validate.");
    read(j.at("validate"), "oracle", c.oracle, "validate.");
  }
  if (j.contains("output")) {
    check_keys(j.at("output"), {"path", "format"}, "output.");
    read(j.at("output"), "path", c.output_path, "output.");
    read(j.at("output"), "format", c.format, "output.");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json serialize_config(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = c.model;
  j["task"] = c.task;
  if (c.model == "kerr") {
    j["parameters"] = write_kerr(c.kerr);
  } else if (c.model == "multimode-kerr") {
    json modes = json::array();
    for (const auto& m : c.multimode.modes) modes.push_back(write_kerr(m));
    j["parameters"] = json{{"modes", modes},
                           {"cross_kerr", square_rows(c.multimode.cross_kerr, c.multimode.modes.size())},
                           {"cutoffs", c.multimode.cutoffs}};
  } else {
    json p{{"n", c.ising.n}, {"random", c.ising.random}, {"active_sign", c.ising.active_sign}};
    if (!c.ising.J.empty()) p["J"] = square_rows(c.ising.J, c.ising.n);
    if (!c.ising.h.empty()) p["h"] = c.ising.h;
    if (!c.ising.gamma_minus.empty()) p["gamma_minus"] = c.ising.gamma_minus;
    if (!c.ising.gamma_plus.empty()) p["gamma_plus"] = c.ising.gamma_plus;
    if (!c.ising.gamma_phi.empty()) p["gamma_phi"] = c.ising.gamma_phi;
    j["parameters"] = p;
  }
  j["ranges"] = json{{"m_max", c.m_max},
                     {"mu_max", c.mu_max},
                     {"m", c.m},
                     {"mu", c.mu},
                     {"spin", c.spin},
                     {"domain", c.domain},
                     {"t", write_grid(c.t)},
                     {"omega", write_grid(c.omega)},
                     {"probe_delta", c.probe_delta},
                     {"initial_state", c.initial_state}};
  j["cutoff"] = c.cutoff;
  j["tolerances"] = json{{"match", c.tol}};
  j["validate"] = json{{"target", c.target}, {"oracle", c.oracle}};
  j["output"] = json{{"path", c.output_path}, {"format", c.format}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace wscli
