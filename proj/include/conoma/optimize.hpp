// Power-coefficient search for K = 2: closed-form sweep for the proposed
// ordering (CN-PA), common-random-numbers Monte-Carlo sweep for the
// conventional ordering (CN-SA).

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "conoma/analytic.hpp"
#include "conoma/model.hpp"

namespace conoma {

struct OptimizationResult {
  Scheme scheme = Scheme::kProposedCnPa;
  double rho_db = 0.0;
  RateTargets rates;
  double best_coeff = 0.0;  // p2^2 for CN-PA, p1^2 for CN-SA
  double best_mop = 1.0;
  double grid_step = 0.0;
  std::uint64_t evaluations = 0;
  double wall_time_s = 0.0;
  bool feasible = false;  // false when every grid point yields MOP = 1
};

struct CoeffGrid {
  double lo = 0.5;
  double hi = 0.995;
  double step = 0.005;
  std::vector<double> points() const;
};

// Quasi-ties within this MOP margin break toward the larger coefficient
// (wider power gap, cleaner SIC); the minima flatten to below this level at
// high SNR.
inline constexpr double kCnpaTieEpsilon = 5e-7;

// Sweep of the exact two-user MOP over the coefficient grid.
OptimizationResult optimize_cnpa_k2(double rho, const RateTargets& rates,
                                    const CoeffGrid& grid = {},
                                    double tie_eps = kCnpaTieEpsilon);

// Monte-Carlo sweep for the conventional scheme. All grid points share the
// realization stream (common random numbers); exact count ties break toward
// the smaller coefficient.
OptimizationResult optimize_cnsa_k2(double rho, const RateTargets& rates,
                                    std::uint64_t trials,
                                    const CoeffGrid& grid = {},
                                    std::uint64_t seed = 1,
                                    std::size_t stream_point = 0,
                                    int workers = 0);

struct RuntimeComparison {
  double closed_form_seconds = 0.0;
  double mc_seconds = 0.0;
  OptimizationResult cnpa;
  OptimizationResult cnsa;
};

// Wall-time comparison of the two optimizers on one (rho, rates) cell.
RuntimeComparison runtime_comparison(double rho, const RateTargets& rates,
                                     std::uint64_t trials = 500000,
                                     std::uint64_t seed = 1);

}  // namespace conoma
