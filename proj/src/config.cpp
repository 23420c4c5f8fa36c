#include "conoma/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace conoma {

namespace {

using nlohmann::json;

std::vector<double> parse_grid(const json& node, const char* what) {
  std::vector<double> out;
  if (node.is_array()) {
    for (const auto& v : node) out.push_back(v.get<double>());
  } else if (node.is_object()) {
    const double from = node.at("from").get<double>();
    const double to = node.at("to").get<double>();
    const double step = node.value("step", 1.0);
    if (!(step > 0.0) || to < from)
      throw ConfigError(std::string(what) + ": bad from/to/step grid");
    const int n = static_cast<int>(std::floor((to - from) / step + 0.5));
    for (int i = 0; i <= n; ++i) out.push_back(from + i * step);
  } else {
    throw ConfigError(std::string(what) + ": expected array or {from,to,step}");
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": grid is empty");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1]))
      throw ConfigError(std::string(what) + ": grid must be ascending");
  return out;
}

std::vector<double> default_grid(double from, double to, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((to - from) / step + 0.5));
  for (int i = 0; i <= n; ++i) out.push_back(from + i * step);
  return out;
}

}  // namespace

std::string config_digest(const std::string& json_text) {
  // nlohmann::json keeps object keys sorted, so dump() is canonical.
  const std::string canon = json::parse(json_text).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  Config cfg;
  try {
    cfg.users = doc.value("users", 2);
    cfg.seed = doc.value("seed", std::uint64_t{20260810});
    cfg.trials = doc.value("trials", std::uint64_t{500000});
    cfg.chunk = doc.value("chunk", std::uint32_t{65536});
    cfg.redraw_g_per_slot = doc.value("redraw_g_per_slot", false);
    if (doc.contains("rates")) {
      for (const auto& r : doc.at("rates")) cfg.rates.push_back(r.get<double>());
    } else {
      cfg.rates.assign(static_cast<size_t>(cfg.users), 1.0);
    }
    cfg.rho_db = doc.contains("rho_db") ? parse_grid(doc.at("rho_db"), "rho_db")
                                        : default_grid(0.0, 21.0, 1.0);
    cfg.cn_sa_fixed_p1_sq = doc.value("cn_sa_fixed_p1_sq", 0.8);
    if (doc.contains("optimizer")) {
      const auto& o = doc.at("optimizer");
      cfg.optimizer_grid.step = o.value("grid_step", 0.005);
      cfg.optimizer_grid.lo = o.value("coeff_min", 0.5);
      cfg.optimizer_grid.hi = o.value("coeff_max", 0.995);
      cfg.cnsa_trials = o.value("cnsa_trials", std::uint64_t{500000});
    }
    if (doc.contains("outage_capacity")) {
      const auto& s = doc.at("outage_capacity");
      cfg.outage_capacity.rho_db =
          s.contains("rho_db") ? parse_grid(s.at("rho_db"), "outage_capacity.rho_db")
                               : std::vector<double>{8.0, 15.0};
      if (s.contains("rate_grid")) {
        cfg.outage_capacity.rate_grid =
            parse_grid(s.at("rate_grid"), "outage_capacity.rate_grid");
      } else {
        cfg.outage_capacity.rate_grid = default_grid(0.1, 4.0, 0.05);
      }
      cfg.outage_capacity.trials = s.value("trials", std::uint64_t{1000000});
      cfg.outage_capacity.cnpa_optimize_per_rate =
          s.value("cnpa_optimize_per_rate", true);
      cfg.outage_capacity.include_cnsa_optimal =
          s.value("include_cnsa_optimal", true);
    } else {
      cfg.outage_capacity.rho_db = {8.0, 15.0};
      cfg.outage_capacity.rate_grid = default_grid(0.1, 4.0, 0.05);
    }
    if (doc.contains("table2")) {
      const auto& s = doc.at("table2");
      cfg.table2.rho_db = s.contains("rho_db")
                              ? parse_grid(s.at("rho_db"), "table2.rho_db")
                              : default_grid(0.0, 21.0, 3.0);
      if (s.contains("rates"))
        for (const auto& r : s.at("rates")) cfg.table2.rates.push_back(r.get<double>());
      else
        cfg.table2.rates = {1.0, 2.0};
    } else {
      cfg.table2.rho_db = default_grid(0.0, 21.0, 3.0);
      cfg.table2.rates = {1.0, 2.0};
    }
    if (doc.contains("validate")) {
      const auto& s = doc.at("validate");
      cfg.validate.hypoexp_sets = s.value("hypoexp_sets", 100);
      cfg.validate.mop_param_sets = s.value("mop_param_sets", 1000);
      cfg.validate.mc_trials = s.value("mc_trials", std::uint64_t{1000000});
      cfg.validate.diversity_rho_db =
          s.contains("diversity_rho_db")
              ? parse_grid(s.at("diversity_rho_db"), "validate.diversity_rho_db")
              : default_grid(18.0, 30.0, 2.0);
      cfg.validate.diversity_trials =
          s.value("diversity_trials", std::uint64_t{10000000});
    } else {
      cfg.validate.diversity_rho_db = default_grid(18.0, 30.0, 2.0);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }

  if (cfg.users < 2) throw ConfigError("users must be at least 2");
  if (static_cast<int>(cfg.rates.size()) != cfg.users)
    throw ConfigError("need one rate per user");
  for (double r : cfg.rates)
    if (!(r > 0.0)) throw ConfigError("rates must be positive");
  if (cfg.trials < 1000) throw ConfigError("trials must be at least 1000");
  if (!(cfg.cn_sa_fixed_p1_sq >= 0.5) || !(cfg.cn_sa_fixed_p1_sq < 1.0))
    throw ConfigError("cn_sa_fixed_p1_sq must lie in [0.5, 1); p_l = 1 - p1^2 must stay positive");
  if (!(cfg.optimizer_grid.hi < 1.0))
    throw ConfigError("coeff_max must be below 1; p_l = 0 divides by zero");

  cfg.digest = config_digest(text);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["config_digest"] = config_digest;
  j["seed"] = seed;
  j["tool_version"] = tool_version;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

}  // namespace conoma
