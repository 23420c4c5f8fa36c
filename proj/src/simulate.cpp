#include "conoma/simulate.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace conoma {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct Counts {
  std::vector<std::uint64_t> user;
  std::uint64_t mop = 0;

  explicit Counts(int k) : user(static_cast<size_t>(k), 0) {}
  void merge(const Counts& other) {
    for (std::size_t i = 0; i < user.size(); ++i) user[i] += other.user[i];
    mop += other.mop;
  }
};

void for_each_chunk(std::uint64_t n_chunks, int workers,
                    const std::function<void(std::uint64_t)>& body) {
  if (workers <= 1 || n_chunks <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) body(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t c; (c = next.fetch_add(1)) < n_chunks;) body(c);
    });
  }
  for (auto& t : pool) t.join();
}

void eval_sinr(const ExperimentConfig& cfg, const NetworkRealization& net,
               double rho, std::vector<double>& gamma) {
  switch (cfg.scheme) {
    case Scheme::kProposedCnPa:
      sinr_proposed_into(*cfg.alloc, net, rho, gamma);
      break;
    case Scheme::kConventionalCnSa:
      sinr_conventional_into(*cfg.alloc, net, rho, gamma);
      break;
    case Scheme::kOma:
      sinr_oma_into(net, rho, gamma);
      break;
  }
}

// Runs the trials of one chunk; writes per-trial masks when `record` is
// non-null (offset by the chunk's first trial index).
void process_chunk(const ExperimentConfig& cfg, double rho,
                   const std::vector<double>& thresholds,
                   std::uint64_t stream_seed, std::uint64_t first_trial,
                   std::uint32_t n_trials, Counts& counts,
                   std::uint32_t* record) {
  Xoshiro256pp rng(stream_seed);
  const int k = cfg.k;
  NetworkRealization net;
  net.h_sq_sorted.resize(static_cast<size_t>(k));
  net.g_sq.resize(NetworkRealization::g_index(k, k - 1) + 1);
  std::vector<double> gamma(static_cast<size_t>(k));
  for (std::uint32_t t = 0; t < n_trials; ++t) {
    draw_realization_into(rng, k, net);
    eval_sinr(cfg, net, rho, gamma);
    std::uint32_t mask = 0;
    for (int u = 0; u < k; ++u) {
      if (gamma[static_cast<size_t>(u)] <= thresholds[static_cast<size_t>(u)]) {
        mask |= 1u << u;
        ++counts.user[static_cast<size_t>(u)];
      }
    }
    if (mask != 0) ++counts.mop;
    if (record != nullptr) record[first_trial + t] = mask;
  }
}

Counts run_point(const ExperimentConfig& cfg, std::size_t point_index,
                 double rho, const std::vector<double>& thresholds,
                 int workers, std::uint32_t* record) {
  const std::uint64_t n_chunks = (cfg.trials + cfg.chunk - 1) / cfg.chunk;
  Counts total(cfg.k);
  std::mutex merge_mutex;
  for_each_chunk(n_chunks, workers, [&](std::uint64_t c) {
    Counts part(cfg.k);
    const std::uint64_t first = c * cfg.chunk;
    const std::uint32_t n = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(cfg.chunk, cfg.trials - first));
    process_chunk(cfg, rho, thresholds,
                  derive_stream_seed(cfg.seed, point_index, c), first, n, part,
                  record);
    std::lock_guard<std::mutex> lock(merge_mutex);
    total.merge(part);
  });
  return total;
}

OutageStats to_stats(const Counts& counts, std::uint64_t trials) {
  OutageStats s;
  s.trials = trials;
  const double n = static_cast<double>(trials);
  for (std::uint64_t c : counts.user) {
    const double p = static_cast<double>(c) / n;
    s.per_user_outage.push_back(p);
    s.per_user_se.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  s.mop = static_cast<double>(counts.mop) / n;
  s.mop_se = std::sqrt(s.mop * (1.0 - s.mop) / n);
  return s;
}

std::vector<double> thresholds_for(const ExperimentConfig& cfg,
                                   const RateTargets& rates) {
  std::vector<double> thr;
  for (int u = 1; u <= cfg.k; ++u)
    thr.push_back(rates.threshold(cfg.scheme, cfg.k, u));
  return thr;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (k < 2) throw std::invalid_argument("need at least 2 users");
  if (rho_grid_db.empty()) throw std::invalid_argument("rho grid is empty");
  if (trials < 1000) throw std::invalid_argument("need at least 1000 trials");
  if (chunk == 0) throw std::invalid_argument("chunk must be positive");
  if (static_cast<int>(rates.r.size()) != k)
    throw std::invalid_argument("need one rate per user");
  if (scheme != Scheme::kOma) {
    if (!alloc.has_value())
      throw std::invalid_argument("scheme requires a power allocation");
    if (alloc->user_count() != k)
      throw std::invalid_argument("allocation user count mismatch");
    const bool want_conv = scheme == Scheme::kConventionalCnSa;
    if (alloc->is_conventional() != want_conv)
      throw std::invalid_argument("allocation ordering does not match scheme");
  }
}

int effective_worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("CONOMA_MAX_WORKERS")) {
    const int c = std::atoi(cap);
    if (c >= 1 && c < n) n = c;
  }
  return n;
}

void draw_realization_into(Xoshiro256pp& rng, int k, NetworkRealization& out) {
  auto& h = out.h_sq_sorted;
  for (int i = 0; i < k; ++i) {
    // insertion sort keeps the vector ascending; k is small
    const double x = rng.exponential();
    int j = i;
    while (j > 0 && h[static_cast<size_t>(j) - 1] > x) {
      h[static_cast<size_t>(j)] = h[static_cast<size_t>(j) - 1];
      --j;
    }
    h[static_cast<size_t>(j)] = x;
  }
  for (int i = 2; i <= k; ++i)
    for (int j = 1; j < i; ++j) out.g(i, j) = rng.exponential();
}

NetworkRealization draw_realization(Xoshiro256pp& rng, int k) {
  if (k < 2) throw std::invalid_argument("need at least 2 users");
  NetworkRealization net;
  net.h_sq_sorted.resize(static_cast<size_t>(k));
  net.g_sq.resize(NetworkRealization::g_index(k, k - 1) + 1);
  draw_realization_into(rng, k, net);
  return net;
}

std::vector<std::pair<double, OutageStats>> run_experiment(
    const ExperimentConfig& config, int workers) {
  config.validate();
  if (workers <= 0) workers = effective_worker_count();
  std::vector<std::pair<double, OutageStats>> out;
  const std::vector<double> thr = thresholds_for(config, config.rates);
  for (std::size_t pi = 0; pi < config.rho_grid_db.size(); ++pi) {
    const double rho = db_to_linear(config.rho_grid_db[pi]);
    const Counts counts = run_point(config, pi, rho, thr, workers, nullptr);
    out.emplace_back(config.rho_grid_db[pi], to_stats(counts, config.trials));
  }
  return out;
}

std::vector<std::uint32_t> run_point_indicators(const ExperimentConfig& config,
                                                std::size_t rho_index,
                                                int workers) {
  config.validate();
  if (rho_index >= config.rho_grid_db.size())
    throw std::invalid_argument("rho index out of range");
  if (workers <= 0) workers = effective_worker_count();
  std::vector<std::uint32_t> masks(config.trials, 0);
  const std::vector<double> thr = thresholds_for(config, config.rates);
  const double rho = db_to_linear(config.rho_grid_db[rho_index]);
  run_point(config, rho_index, rho, thr, workers, masks.data());
  return masks;
}

std::vector<OutageCapacityPoint> outage_capacity_curve(
    const ExperimentConfig& config, const std::vector<double>& rate_grid,
    const AllocProvider& alloc_for_rate, int workers) {
  config.validate();
  if (rate_grid.empty()) throw std::invalid_argument("rate grid is empty");
  for (std::size_t i = 1; i < rate_grid.size(); ++i)
    if (!(rate_grid[i] > rate_grid[i - 1]))
      throw std::invalid_argument("rate grid must be ascending");
  if (workers <= 0) workers = effective_worker_count();

  std::vector<OutageCapacityPoint> out;
  for (std::size_t pi = 0; pi < config.rho_grid_db.size(); ++pi) {
    const double rho = db_to_linear(config.rho_grid_db[pi]);

    // Per-rate experiment configs (allocation may be re-optimized per rate).
    std::vector<ExperimentConfig> cfgs;
    std::vector<std::vector<double>> thrs;
    for (double rate : rate_grid) {
      ExperimentConfig c = config;
      c.rates = RateTargets::uniform(config.k, rate);
      if (alloc_for_rate) c.alloc = alloc_for_rate(rho, c.rates);
      thrs.push_back(thresholds_for(c, c.rates));
      cfgs.push_back(std::move(c));
    }

    // All rates share the realization stream of this grid point, so each
    // curve is monotone by construction when the allocation is fixed.
    const std::uint64_t n_chunks = (config.trials + config.chunk - 1) / config.chunk;
    std::vector<std::uint64_t> mop_counts(rate_grid.size(), 0);
    std::mutex merge_mutex;
    for_each_chunk(n_chunks, workers, [&](std::uint64_t c) {
      Xoshiro256pp rng(derive_stream_seed(config.seed, pi, c));
      const std::uint32_t n = static_cast<std::uint32_t>(std::min<std::uint64_t>(
          config.chunk, config.trials - c * config.chunk));
      NetworkRealization net;
      net.h_sq_sorted.resize(static_cast<size_t>(config.k));
      net.g_sq.resize(NetworkRealization::g_index(config.k, config.k - 1) + 1);
      std::vector<double> gamma(static_cast<size_t>(config.k));
      std::vector<std::uint64_t> local(rate_grid.size(), 0);
      const bool fixed_alloc = !alloc_for_rate;
      for (std::uint32_t t = 0; t < n; ++t) {
        draw_realization_into(rng, config.k, net);
        if (fixed_alloc) eval_sinr(cfgs[0], net, rho, gamma);
        for (std::size_t ri = 0; ri < rate_grid.size(); ++ri) {
          if (!fixed_alloc) eval_sinr(cfgs[ri], net, rho, gamma);
          bool outage = false;
          for (int u = 0; u < config.k && !outage; ++u)
            outage = gamma[static_cast<size_t>(u)] <=
                     thrs[ri][static_cast<size_t>(u)];
          if (outage) ++local[ri];
        }
      }
      std::lock_guard<std::mutex> lock(merge_mutex);
      for (std::size_t ri = 0; ri < local.size(); ++ri)
        mop_counts[ri] += local[ri];
    });

    for (std::size_t ri = 0; ri < rate_grid.size(); ++ri) {
      OutageCapacityPoint p;
      p.rho_db = config.rho_grid_db[pi];
      p.rate = rate_grid[ri];
      p.non_outage = 1.0 - static_cast<double>(mop_counts[ri]) /
                               static_cast<double>(config.trials);
      if (cfgs[ri].alloc.has_value()) {
        const auto& a = *cfgs[ri].alloc;
        p.coeff = a.is_conventional() ? a.p_sq(1) : a.p_sq(config.k);
      }
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace conoma
