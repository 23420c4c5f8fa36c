// Experiment configuration: a JSON document with common settings plus one
// section per subcommand. Hashing canonicalizes the document (sorted keys,
// compact separators) so the digest is stable under key reordering.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conoma/optimize.hpp"

namespace conoma {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidateSettings {
  int hypoexp_sets = 100;
  int mop_param_sets = 1000;
  std::uint64_t mc_trials = 1000000;
  std::vector<double> diversity_rho_db;  // default 18..30 step 2
  std::uint64_t diversity_trials = 10000000;
};

struct OutageCapacitySettings {
  std::vector<double> rho_db;      // default {8, 15}
  std::vector<double> rate_grid;   // default 0.1..4.0 step 0.05
  std::uint64_t trials = 1000000;
  bool cnpa_optimize_per_rate = true;
  bool include_cnsa_optimal = true;
};

struct Table2Settings {
  std::vector<double> rho_db;      // default 0..21 step 3
  std::vector<double> rates;       // default {1, 2}
};

struct Config {
  int users = 2;
  std::uint64_t seed = 20260810;
  std::uint64_t trials = 500000;
  std::uint32_t chunk = 65536;
  std::vector<double> rates;       // per-user targets, default {1, 1}
  std::vector<double> rho_db;      // mop-curve grid, default 0..21 step 1
  double cn_sa_fixed_p1_sq = 0.8;
  CoeffGrid optimizer_grid;
  std::uint64_t cnsa_trials = 500000;
  bool redraw_g_per_slot = false;
  OutageCapacitySettings outage_capacity;
  Table2Settings table2;
  ValidateSettings validate;

  std::string digest;  // FNV-1a 64 of the canonicalized source document
};

// Loads and validates a config file; throws ConfigError with a readable
// message on any problem (unknown file, bad JSON, empty grids, p_l = 0, ...).
Config load_config(const std::string& path);
Config parse_config(const std::string& json_text);

// FNV-1a 64-bit digest of the canonical (sorted-key, compact) JSON form.
std::string config_digest(const std::string& json_text);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  std::string to_json() const;
};

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace conoma
