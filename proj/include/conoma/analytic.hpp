// Closed-form outage expressions for the proposed power ordering: weak-user
// hypoexponential CDF, order-statistic CDFs of the SINR ratio terms, high-SNR
// asymptotes and diversity-order fitting, and the exact two-user mutual
// outage probability (MOP).

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "conoma/model.hpp"

namespace conoma {

// Parameters of the weakest user's SNR as a sum of independent exponentials:
// X_0 ~ exp(rho*p1^2/K) (min of K direct gains), X_i ~ exp(rho*q_{K-i+1,1}^2).
// Rates are nudged apart when they (nearly) collide so the partial-fraction
// coefficients stay finite; the induced CDF error is below 1e-6.
class HypoExpParams {
 public:
  static HypoExpParams make(int k, double rho, double p1_sq,
                            const std::vector<double>& q_to_weakest);
  static HypoExpParams from_allocation(const PowerAllocation& alloc,
                                       double rho);

  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<double>& coefficients() const { return c_; }

 private:
  std::vector<double> lambdas_;
  std::vector<double> c_;
};

// CDF of the weak user's SNR evaluated at `gamma`; the outage probability is
// this CDF at gamma = phi_1.
double weak_user_outage(const HypoExpParams& params, double gamma);

// Strongest user's outage: order-statistic CDF of the direct-phase SINR
// ratio at threshold phi (1 beyond the interference ceiling).
double strong_user_outage(const std::vector<double>& p_sq, double rho, int k,
                          double phi);

// Omega/zeta data for the ratio terms of user K-n (0 <= n < K-1).
class RatioCdfParams {
 public:
  RatioCdfParams(const PowerAllocation& alloc, int n);

  int n() const { return n_; }
  int user_count() const { return k_; }
  double zeta0() const { return p_own_ / p_interf_; }
  double omega0(double y) const { return y / (p_own_ - y * p_interf_); }
  double zeta_i(int i) const;   // i in 1..n
  double omega_i(int i, double z) const;
  // Strongest user's ceiling and omega (the n = 0 case), used by the
  // high-SNR expression regardless of n.
  double zeta00() const { return strong_own_ / strong_interf_; }
  double omega00(double y) const {
    return y / (strong_own_ - y * strong_interf_);
  }

 private:
  int k_ = 0;
  int n_ = 0;
  double p_own_ = 0.0;
  double p_interf_ = 0.0;
  double strong_own_ = 0.0;
  double strong_interf_ = 0.0;
  std::vector<std::pair<double, double>> q_rows_;  // (q_own, q_interf) per i
};

// CDF of Y_n (direct-phase ratio of user K-n) at y.
double cdf_Yn(const RatioCdfParams& params, double rho, double y);
// CDF of Z_i (relayed-copy ratio, i-th relay slot) at z.
double cdf_Zi(const RatioCdfParams& params, int i, double rho, double z);

// High-SNR upper bound on the weak user's CDF; exact power law of order K.
double asymptotic_weak_cdf(int k, double rho, double p1_sq,
                           const std::vector<double>& q_to_weakest,
                           double gamma);

// High-SNR expression for user K-n (slope reference; requires gamma below
// every interference ceiling, throws std::domain_error otherwise).
double asymptotic_kn_cdf(const RatioCdfParams& params, double rho,
                         double gamma);

// Least-squares diversity order from (rho, outage) samples: -slope of
// log10(outage) vs log10(rho) over the top decade of rho.
double diversity_order_fit(const std::vector<std::pair<double, double>>& curve);

// Two-user MOP parameters. p_h + p_l = 1, 0 < p_l <= p_h.
class MopK2Params {
 public:
  MopK2Params(double p_h, double p_l, double rho, double phi1, double phi2);
  static MopK2Params two_user(double p2_sq, double rho,
                              const RateTargets& rates);

  double p_h() const { return p_h_; }
  double p_l() const { return p_l_; }
  double rho() const { return rho_; }
  double phi1() const { return phi1_; }
  double phi2() const { return phi2_; }

  // Strong user cannot meet phi2 at any gain when phi2 >= p_h/p_l.
  bool strong_user_feasible() const { return phi2_ < p_h_ / p_l_; }
  double beta() const;       // strong-user threshold on |h_2|^2
  double c_raw() const;      // boundary between the alpha>beta / alpha<beta regions
  double c_clamped() const;  // max(c, 0); delta = |g|^2 is nonnegative
  double delta_upper() const;  // min(c_clamped, phi1/rho)

 private:
  double p_h_, p_l_, rho_, phi1_, phi2_;
};

struct MopK2Subterms {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;
  double mog = 0.0;  // MOP conditioned on the relay link alone covering phi1
};

// Exact two-user MOP, clamped to [0, 1]. Returns 1 when the strong user's
// rate is infeasible.
double mop_closed_form_k2(const MopK2Params& params);

// The intermediate probabilities behind the closed form; assembling
// 1 - e^{-phi1/rho} * (1 - mog) - (p1+p2+p3+p4) reproduces the MOP.
MopK2Subterms mop_k2_subterms(const MopK2Params& params);

// True iff every per-user outage is below the MOP plus tolerance.
bool mop_bound_check(double mop, const std::vector<double>& user_outages,
                     double tolerance);

}  // namespace conoma
