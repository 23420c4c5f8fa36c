// Experiment drivers behind the CLI subcommands. Each CSV builder returns the
// complete file content (comment header + data rows); the rows depend only on
// the config and seed, never on wall-clock time or worker count.

#pragma once

#include <string>
#include <vector>

#include "conoma/config.hpp"

namespace conoma {

// MOP vs transmit SNR for CN-PA (optimal), CN-SA (optimal), CN-SA (fixed
// p1^2) and OMA. Columns: rho_db,scheme,coeff,mop_analytic,mop_mc,mop_se,flag.
std::string mop_curve_csv(const Config& cfg, int workers = 0);

// Non-outage probability vs target rate at the configured SNRs.
// Columns: rho_db,scheme,rate,non_outage.
std::string outage_capacity_csv(const Config& cfg, int workers = 0);

// Optimal squared power coefficients per (rate, scheme, rho).
// Columns: rate,scheme,rho_db,optimal_coeff,mop_at_optimum.
std::string table2_csv(const Config& cfg, int workers = 0);

struct ValidateCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct ValidateReport {
  std::vector<ValidateCheck> checks;
  bool all_pass() const;
  std::string to_json() const;
  std::string to_text() const;
};

// Property/oracle suite: hypoexponential CDF vs grid convolution, closed
// forms vs Monte Carlo, the per-user-outage <= MOP bound, subterm symmetry,
// quadrature cross-checks, diversity fits, determinism, optimizer runtimes.
ValidateReport run_validate(const Config& cfg, int workers = 0);

}  // namespace conoma
