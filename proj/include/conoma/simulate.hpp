// Seeded Monte-Carlo engine. Trials are split into fixed-size chunks; each
// chunk draws from an RNG stream derived from (seed, grid-point index, chunk
// index), and chunk results are integer counts, so the aggregate is identical
// for any worker count and any chunk scheduling order.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "conoma/model.hpp"
#include "conoma/rng.hpp"

namespace conoma {

struct ExperimentConfig {
  int k = 2;
  Scheme scheme = Scheme::kProposedCnPa;
  std::optional<PowerAllocation> alloc;  // unused for OMA
  std::vector<double> rho_grid_db;
  RateTargets rates;
  std::uint64_t trials = 500000;
  std::uint64_t seed = 1;
  std::uint32_t chunk = 65536;
  // Sensitivity switch: redraw inter-user gains per cooperative slot instead
  // of holding them for the whole trial. Under this decoding schedule every
  // link is used in exactly one slot, so the two policies coincide; the flag
  // is accepted for config compatibility.
  bool redraw_g_per_slot = false;

  void validate() const;
};

struct OutageStats {
  std::vector<double> per_user_outage;
  std::vector<double> per_user_se;
  double mop = 0.0;
  double mop_se = 0.0;
  std::uint64_t trials = 0;
};

// Number of Monte-Carlo workers: hardware concurrency, capped by the
// CONOMA_MAX_WORKERS environment variable when set.
int effective_worker_count();

// One channel draw: K unit-mean exponential direct gains (sorted ascending)
// plus one unit-mean exponential per relay pair.
NetworkRealization draw_realization(Xoshiro256pp& rng, int k);
void draw_realization_into(Xoshiro256pp& rng, int k, NetworkRealization& out);

// Outage statistics for every rho in the grid. Deterministic for a fixed
// (seed, chunk, trials, grid) across runs and worker counts.
std::vector<std::pair<double, OutageStats>> run_experiment(
    const ExperimentConfig& config, int workers = 0);

// Per-trial outage bitmasks (bit k-1 = user k in outage, top bit unused) for
// one grid point, in trial order. A shorter run's masks are a prefix of a
// longer run's.
std::vector<std::uint32_t> run_point_indicators(const ExperimentConfig& config,
                                                std::size_t rho_index,
                                                int workers = 0);

struct OutageCapacityPoint {
  double rho_db = 0.0;
  double rate = 0.0;
  double non_outage = 0.0;
  double coeff = 0.0;  // allocation actually used (dominant coefficient)
};

// Non-outage probability (1 - MOP) against target rate, one row per
// (rho, rate). All rates at a given rho share realizations, so each curve is
// exactly non-increasing. `alloc_for_rate`, when given, supplies the
// allocation per (rho_linear, rates) -- used for per-rate re-optimized CN-PA;
// otherwise config.alloc is used throughout.
using AllocProvider =
    std::function<PowerAllocation(double rho_linear, const RateTargets&)>;
std::vector<OutageCapacityPoint> outage_capacity_curve(
    const ExperimentConfig& config, const std::vector<double>& rate_grid,
    const AllocProvider& alloc_for_rate = nullptr, int workers = 0);

}  // namespace conoma
