// conoma: experiment runner for the cooperative-NOMA power-allocation study.
//
// Subcommands:
//   mop-curve        MOP vs transmit SNR per scheme (CSV)
//   outage-capacity  non-outage probability vs target rate (CSV)
//   table2           optimal squared power coefficients (CSV)
//   validate         property/oracle suite (JSON report, nonzero exit on fail)
//
// Every command takes --config; CSV commands take --out. --seed and --trials
// override the config. CONOMA_MAX_WORKERS caps the worker count.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "conoma/config.hpp"
#include "conoma/runner.hpp"

namespace {

std::string iso_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool out_required) {
  cmd->add_option("--config", opts.config_path, "config file (JSON)")
      ->required();
  auto* out = cmd->add_option("--out", opts.out_path, "output path");
  if (out_required) out->required();
  cmd->add_option("--seed", [&opts](const CLI::results_t& r) {
    opts.seed = std::stoull(r[0]);
    return true;
  }, "override the config seed");
  cmd->add_option("--trials", [&opts](const CLI::results_t& r) {
    opts.trials = std::stoull(r[0]);
    return true;
  }, "override the config trial count");
}

conoma::Config load_with_overrides(const CommonOpts& opts) {
  conoma::Config cfg = conoma::load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int run_csv_command(
    const char* name, const CommonOpts& opts,
    const std::function<std::string(const conoma::Config&)>& build) {
  try {
    const conoma::Config cfg = load_with_overrides(opts);
    conoma::RunManifest manifest;
    manifest.command = name;
    manifest.config_digest = cfg.digest;
    manifest.seed = cfg.seed;
    manifest.tool_version = conoma::kToolVersion;
    manifest.started_at = iso_now();
    const std::string csv = build(cfg);  // may throw; no file created then
    manifest.finished_at = iso_now();
    manifest.outputs = {opts.out_path};
    write_file(opts.out_path, csv);
    write_file(opts.out_path + ".manifest.json", manifest.to_json());
    std::cerr << name << ": wrote " << opts.out_path << "\n";
    return 0;
  } catch (const conoma::ConfigError& e) {
    std::cerr << name << ": config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << name << ": error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative-NOMA power allocation experiments"};
  app.require_subcommand(1);

  CommonOpts mop_opts, cap_opts, tab_opts, val_opts;
  auto* mop = app.add_subcommand("mop-curve", "MOP vs transmit SNR");
  add_common(mop, mop_opts, true);
  auto* cap = app.add_subcommand("outage-capacity", "non-outage vs rate");
  add_common(cap, cap_opts, true);
  auto* tab = app.add_subcommand("table2", "optimal power coefficients");
  add_common(tab, tab_opts, true);
  auto* val = app.add_subcommand("validate", "run the validation suite");
  add_common(val, val_opts, false);

  CLI11_PARSE(app, argc, argv);

  if (mop->parsed())
    return run_csv_command("mop-curve", mop_opts, [](const conoma::Config& c) {
      return conoma::mop_curve_csv(c);
    });
  if (cap->parsed())
    return run_csv_command("outage-capacity", cap_opts,
                           [](const conoma::Config& c) {
                             return conoma::outage_capacity_csv(c);
                           });
  if (tab->parsed())
    return run_csv_command("table2", tab_opts, [](const conoma::Config& c) {
      return conoma::table2_csv(c);
    });
  if (val->parsed()) {
    try {
      const conoma::Config cfg = load_with_overrides(val_opts);
      conoma::RunManifest manifest;
      manifest.command = "validate";
      manifest.config_digest = cfg.digest;
      manifest.seed = cfg.seed;
      manifest.tool_version = conoma::kToolVersion;
      manifest.started_at = iso_now();
      const conoma::ValidateReport report = conoma::run_validate(cfg);
      manifest.finished_at = iso_now();
      std::cout << report.to_text();
      if (!val_opts.out_path.empty()) {
        write_file(val_opts.out_path, report.to_json());
        write_file(val_opts.out_path + ".manifest.json", manifest.to_json());
        std::cerr << "validate: wrote " << val_opts.out_path << "\n";
      }
      return report.all_pass() ? 0 : 1;
    } catch (const conoma::ConfigError& e) {
      std::cerr << "validate: config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "validate: error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
