#include "conoma/optimize.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "conoma/rng.hpp"
#include "conoma/simulate.hpp"

namespace conoma {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

std::vector<double> CoeffGrid::points() const {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (!(lo >= 0.5) || !(hi <= 1.0) || !(lo <= hi))
    throw std::invalid_argument("coefficient range must lie in [0.5, 1)");
  std::vector<double> pts;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 0.5));
  for (int i = 0; i <= n; ++i) pts.push_back(lo + i * step);
  return pts;
}

OptimizationResult optimize_cnpa_k2(double rho, const RateTargets& rates,
                                    const CoeffGrid& grid, double tie_eps) {
  const double t0 = now_seconds();
  const std::vector<double> pts = grid.points();
  std::vector<double> mop(pts.size());
  double min_mop = 2.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    mop[i] = mop_closed_form_k2(MopK2Params::two_user(pts[i], rho, rates));
    min_mop = std::min(min_mop, mop[i]);
  }
  std::size_t pick = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (mop[i] <= min_mop + tie_eps) pick = i;

  OptimizationResult r;
  r.scheme = Scheme::kProposedCnPa;
  r.rho_db = 10.0 * std::log10(rho);
  r.rates = rates;
  r.best_coeff = pts[pick];
  r.best_mop = mop[pick];
  r.grid_step = grid.step;
  r.evaluations = pts.size();
  r.feasible = min_mop < 1.0;
  r.wall_time_s = now_seconds() - t0;
  return r;
}

OptimizationResult optimize_cnsa_k2(double rho, const RateTargets& rates,
                                    std::uint64_t trials,
                                    const CoeffGrid& grid, std::uint64_t seed,
                                    std::size_t stream_point, int workers) {
  if (trials < 1000) throw std::invalid_argument("need at least 1000 trials");
  const double t0 = now_seconds();
  const std::vector<double> pts = grid.points();
  const double phi1 = rates.phi[0];
  const double phi2 = rates.phi[1];
  const double inv_rho = 1.0 / rho;
  if (workers <= 0) workers = effective_worker_count();

  constexpr std::uint32_t kChunk = 65536;
  const std::uint64_t n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> counts(pts.size(), 0);
  std::mutex merge_mutex;

  auto body = [&](std::uint64_t c) {
    Xoshiro256pp rng(derive_stream_seed(seed, stream_point, c));
    const std::uint32_t n = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(kChunk, trials - c * kChunk));
    std::vector<std::uint64_t> local(pts.size(), 0);
    for (std::uint32_t t = 0; t < n; ++t) {
      const double e1 = rng.exponential();
      const double e2 = rng.exponential();
      const double g = rng.exponential();
      const double h1 = std::min(e1, e2);
      const double h2 = std::max(e1, e2);
      // Weak-user outage: p_h h1/(p_l h1 + 1/rho) + rho g <= phi1, written
      // multiplication-only; strong-user outage: rho p_l h2 <= phi2.
      const double relay_margin = phi1 - rho * g;
      const double rho_h2 = rho * h2;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const double ph = pts[j];
        const double pl = 1.0 - ph;
        const bool weak_out = relay_margin > 0.0 &&
                              ph * h1 <= (pl * h1 + inv_rho) * relay_margin;
        const bool strong_out = pl * rho_h2 <= phi2;
        if (weak_out || strong_out) ++local[j];
      }
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (std::size_t j = 0; j < pts.size(); ++j) counts[j] += local[j];
  };

  if (workers <= 1 || n_chunks <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) body(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::uint64_t c; (c = next.fetch_add(1)) < n_chunks;) body(c);
      });
    for (auto& th : pool) th.join();
  }

  std::size_t pick = 0;
  for (std::size_t j = 1; j < pts.size(); ++j)
    if (counts[j] < counts[pick]) pick = j;

  OptimizationResult r;
  r.scheme = Scheme::kConventionalCnSa;
  r.rho_db = 10.0 * std::log10(rho);
  r.rates = rates;
  r.best_coeff = pts[pick];
  r.best_mop =
      static_cast<double>(counts[pick]) / static_cast<double>(trials);
  r.grid_step = grid.step;
  r.evaluations = pts.size() * trials;
  r.feasible = counts[pick] < trials;
  r.wall_time_s = now_seconds() - t0;
  return r;
}

RuntimeComparison runtime_comparison(double rho, const RateTargets& rates,
                                     std::uint64_t trials,
                                     std::uint64_t seed) {
  RuntimeComparison cmp;
  cmp.cnpa = optimize_cnpa_k2(rho, rates);
  cmp.closed_form_seconds = cmp.cnpa.wall_time_s;
  RateTargets conv = rates;  // same targets, conventional ordering search
  cmp.cnsa = optimize_cnsa_k2(rho, conv, trials, {}, seed);
  cmp.mc_seconds = cmp.cnsa.wall_time_s;
  return cmp;
}

}  // namespace conoma
