#pragma once

// Run configuration shared by every subcommand. Stored as JSON:
//
// {
//   "schema_version": 1,
//   "model": "kerr" | "multimode-kerr" | "ising",
//   "task": "spectrum" | "green" | "eigvec" | "coherence" | "evolve" | "ep-scan" | "validate",
//   "parameters": { ...model block... },
//   "ranges": { "m_max", "mu_max", "m", "mu", "spin", "domain", "initial_state",
//               "t": {"start", "stop", "step"}, "omega": {...}, "probe_delta" },
//   "cutoff": 30,
//   "tolerances": { "match": 1e-6 },
//   "validate": { "target": "spectrum", "oracle": "full" },
//   "output": { "path": "", "format": "csv" },
//   "seed": 7
// }

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace wscli {

inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KerrBlock {
  double omega0 = 0.0;
  double U = 1.0;
  double kappa = 1.0;
  double n_th = 0.1;
  double kappa_phi = 0.0;
  bool operator==(const KerrBlock&) const = default;
};

struct Grid {
  double start = 0.0;
  double stop = 10.0;
  double step = 0.1;
  bool operator==(const Grid&) const = default;

  /// start + k*step for k = 0..round((stop-start)/step).
  std::vector<double> points() const;
};

struct IsingBlock {
  std::size_t n = 5;
  bool random = true;  // draw J, h and rates from `seed`
  std::vector<double> J;  // row-major, explicit mode only
  std::vector<double> h, gamma_minus, gamma_plus, gamma_phi;
  std::string active_sign = "trace";  // "trace" | "printed" (negative control)
  bool operator==(const IsingBlock&) const = default;
};

struct MultiModeBlock {
  std::vector<KerrBlock> modes{KerrBlock{0, 1, 1, 0, 0}, KerrBlock{0, 1, 1, 0, 0}};
  std::vector<double> cross_kerr{0.0, 0.5, 0.5, 0.0};  // row-major
  std::vector<std::size_t> cutoffs{8, 8};
  bool operator==(const MultiModeBlock&) const = default;
};

struct RunConfig {
  std::string model = "kerr";
  std::string task = "spectrum";

  KerrBlock kerr;
  MultiModeBlock multimode;
  IsingBlock ising;

  int m_max = 10;
  int mu_max = 15;
  int m = 1;   // single sector for eigvec
  int mu = 0;
  std::size_t spin = 0;
  std::string domain = "time";  // green: "time" | "frequency"
  Grid t{0.0, 10.0, 0.1};
  Grid omega{-5.0, 5.0, 0.05};
  double probe_delta = 0.05;  // ep-scan: added to every γ+; 0 disables
  std::string initial_state = "all-x";  // evolve: "all-x" | "random" (from seed)

  std::size_t cutoff = 30;
  double tol = 1e-6;
  std::string target = "spectrum";  // validate target
  std::string oracle = "full";      // "full" | "blocked"

  std::string output_path;
  std::string format = "csv";
  std::uint64_t seed = 7;

  bool operator==(const RunConfig&) const = default;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Only the block of the active model is written; parse_config restores the
/// others to defaults, so parse(serialize(c)) == c for any parsed config.
nlohmann::json serialize_config(const RunConfig& c);

}  // namespace wscli
