#include "conoma/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conoma {

namespace {

constexpr double kLambdaSeparation = 1e-7;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out *= static_cast<double>(n - k + i) / i;
  return out;
}

}  // namespace

HypoExpParams HypoExpParams::make(int k, double rho, double p1_sq,
                                  const std::vector<double>& q_to_weakest) {
  if (k < 2) throw std::invalid_argument("need at least 2 users");
  if (!(rho > 0.0) || !(p1_sq > 0.0))
    throw std::invalid_argument("rho and p1^2 must be positive");
  if (static_cast<int>(q_to_weakest.size()) != k - 1)
    throw std::invalid_argument("need one q coefficient per relay");

  HypoExpParams params;
  params.lambdas_.push_back(rho * p1_sq / k);
  for (double q : q_to_weakest) {
    if (!(q > 0.0)) throw std::invalid_argument("q coefficients must be positive");
    params.lambdas_.push_back(rho * q);
  }

  // Nudge colliding means apart; the partial-fraction form is singular at
  // equal rates.
  auto& lam = params.lambdas_;
  const std::size_t n = lam.size();
  bool collided = true;
  int guard = 0;
  while (collided && guard++ < 64) {
    collided = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (std::abs(lam[i] - lam[j]) <
            kLambdaSeparation * std::max(lam[i], lam[j])) {
          lam[i] *= 1.0 + 2.0 * kLambdaSeparation;
          collided = true;
        }
      }
    }
  }
  if (collided)
    throw std::domain_error("could not separate hypoexponential rates");

  // C_i = prod_{j != i} r_j / (r_j - r_i) with r = 1/lambda. Extended
  // precision keeps the unit-sum identity within 1e-9 even when rates sit at
  // the separation limit and the coefficients grow to ~1e7.
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    long double ci = 1.0L;
    const long double ri = 1.0L / static_cast<long double>(lam[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const long double rj = 1.0L / static_cast<long double>(lam[j]);
      ci *= rj / (rj - ri);
    }
    params.c_.push_back(static_cast<double>(ci));
    sum += ci;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-9)
    throw std::domain_error("partial-fraction coefficients do not sum to 1");
  return params;
}

HypoExpParams HypoExpParams::from_allocation(const PowerAllocation& alloc,
                                             double rho) {
  const int k = alloc.user_count();
  std::vector<double> q;
  for (int i = 1; i <= k - 1; ++i) q.push_back(alloc.q_sq(k - i + 1, 1));
  return make(k, rho, alloc.p_sq(1), q);
}

double weak_user_outage(const HypoExpParams& params, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  if (gamma == 0.0) return 0.0;
  long double acc = 0.0L;
  const auto& lam = params.lambdas();
  const auto& c = params.coefficients();
  for (std::size_t i = 0; i < lam.size(); ++i)
    acc += static_cast<long double>(c[i]) *
           static_cast<long double>(-std::expm1(-gamma / lam[i]));
  return clamp01(static_cast<double>(acc));
}

double strong_user_outage(const std::vector<double>& p_sq, double rho, int k,
                          double phi) {
  if (phi < 0.0) throw std::invalid_argument("phi must be nonnegative");
  if (phi == 0.0) return 0.0;
  double interf = 0.0;
  for (int m = 0; m < k - 1; ++m) interf += p_sq[static_cast<size_t>(m)];
  const double own = p_sq[static_cast<size_t>(k) - 1];
  if (phi * interf >= own) return 1.0;
  const double omega = phi / (own - phi * interf);
  return std::pow(-std::expm1(-omega / rho), k);
}

RatioCdfParams::RatioCdfParams(const PowerAllocation& alloc, int n)
    : k_(alloc.user_count()), n_(n) {
  if (n < 0 || n >= k_ - 1)
    throw std::invalid_argument("n must satisfy 0 <= n < K-1");
  const int user = k_ - n;
  p_own_ = alloc.p_sq(user);
  for (int m = 1; m <= user - 1; ++m) p_interf_ += alloc.p_sq(m);
  strong_own_ = alloc.p_sq(k_);
  for (int m = 1; m <= k_ - 1; ++m) strong_interf_ += alloc.p_sq(m);
  for (int i = 1; i <= n; ++i) {
    const int relay = k_ - i + 1;
    double q_interf = 0.0;
    for (int m = 1; m <= user - 1; ++m) q_interf += alloc.q_sq(relay, m);
    q_rows_.emplace_back(alloc.q_sq(relay, user), q_interf);
  }
}

double RatioCdfParams::zeta_i(int i) const {
  const auto& [own, interf] = q_rows_[static_cast<size_t>(i) - 1];
  return own / interf;
}

double RatioCdfParams::omega_i(int i, double z) const {
  const auto& [own, interf] = q_rows_[static_cast<size_t>(i) - 1];
  return z / (own - z * interf);
}

double cdf_Yn(const RatioCdfParams& params, double rho, double y) {
  if (y <= 0.0) return 0.0;
  if (y >= params.zeta0()) return 1.0;
  const double f = -std::expm1(-params.omega0(y) / rho);
  const double fc = 1.0 - f;
  const int k = params.user_count();
  double acc = 0.0;
  for (int i = 0; i <= params.n(); ++i)
    acc += binomial(k, i) * std::pow(f, k - i) * std::pow(fc, i);
  return clamp01(acc);
}

double cdf_Zi(const RatioCdfParams& params, int i, double rho, double z) {
  if (i < 1 || i > params.n()) throw std::invalid_argument("relay index out of range");
  if (z <= 0.0) return 0.0;
  if (z >= params.zeta_i(i)) return 1.0;
  return -std::expm1(-params.omega_i(i, z) / rho);
}

double asymptotic_weak_cdf(int k, double rho, double p1_sq,
                           const std::vector<double>& q_to_weakest,
                           double gamma) {
  if (static_cast<int>(q_to_weakest.size()) != k - 1)
    throw std::invalid_argument("need one q coefficient per relay");
  if (gamma == 0.0) return 0.0;
  double out = gamma * k / (rho * p1_sq);
  for (double q : q_to_weakest) out *= gamma / (rho * q);
  return out;
}

double asymptotic_kn_cdf(const RatioCdfParams& params, double rho,
                         double gamma) {
  const int k = params.user_count();
  const int n = params.n();
  if (gamma == 0.0) return 0.0;
  if (gamma >= params.zeta00())
    throw std::domain_error("gamma beyond the strong-user ceiling");
  for (int i = 1; i <= n; ++i)
    if (gamma >= params.zeta_i(i))
      throw std::domain_error("gamma beyond a relay-term ceiling");
  double out = binomial(k, n) *
               std::pow(params.omega00(gamma) / rho, k - n) *
               std::pow(1.0 / rho, n);
  for (int i = 1; i <= n; ++i) out *= params.omega_i(i, gamma);
  return out;
}

double diversity_order_fit(
    const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 3)
    throw std::invalid_argument("need at least 3 points");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (i > 0 && !(curve[i].first > curve[i - 1].first))
      throw std::invalid_argument("rho values must be strictly increasing");
    if (!(curve[i].second > 0.0))
      throw std::domain_error(
          "zero outage estimate; need more trials or analytic substitution");
  }
  const double rho_max = curve.back().first;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [rho, f] : curve)
    if (rho >= rho_max / 10.0) pts.emplace_back(std::log10(rho), std::log10(f));
  while (pts.size() < 3) {
    const std::size_t idx = curve.size() - pts.size() - 1;
    pts.insert(pts.begin(), {std::log10(curve[idx].first),
                             std::log10(curve[idx].second)});
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

MopK2Params::MopK2Params(double p_h, double p_l, double rho, double phi1,
                         double phi2)
    : p_h_(p_h), p_l_(p_l), rho_(rho), phi1_(phi1), phi2_(phi2) {
  if (!(p_l > 0.0))
    throw std::invalid_argument("p_l must be positive");
  if (std::abs(p_h + p_l - 1.0) > 1e-12)
    throw std::invalid_argument("p_h + p_l must equal 1");
  if (p_l > p_h) throw std::invalid_argument("requires p_l <= p_h");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (!(phi1 > 0.0) || !(phi2 > 0.0))
    throw std::invalid_argument("thresholds must be positive");
}

MopK2Params MopK2Params::two_user(double p2_sq, double rho,
                                  const RateTargets& rates) {
  return MopK2Params(p2_sq, 1.0 - p2_sq, rho, rates.phi[0], rates.phi[1]);
}

double MopK2Params::beta() const {
  return phi2_ / (rho_ * (p_h_ - phi2_ * p_l_));
}

double MopK2Params::c_raw() const {
  return (phi1_ - phi2_ * p_l_ / (p_h_ - phi2_ * p_l_)) / rho_;
}

double MopK2Params::c_clamped() const { return std::max(c_raw(), 0.0); }

double MopK2Params::delta_upper() const {
  return std::min(c_clamped(), phi1_ / rho_);
}

MopK2Subterms mop_k2_subterms(const MopK2Params& params) {
  if (!params.strong_user_feasible())
    throw std::domain_error("subterms undefined for phi2 >= p_h/p_l");
  const double t1 = params.phi1() / params.rho();
  const double beta = params.beta();
  const double cpos = params.c_clamped();
  const double delta = params.delta_upper();
  const double a1 = 1.0 / params.p_l();
  const double a2 = 2.0 / params.p_l();

  MopK2Subterms out;
  // Exponents are grouped so every argument is <= 0 (delta <= t1, cpos <= t1);
  // the factored form overflows to 0*inf for p_l near 0 at low SNR.
  out.p1 = 0.5 * (std::exp(-a2 * t1) - std::exp(-a2 * (t1 - delta) - delta)) /
           (1.0 - a2);
  out.p2 = out.p1;
  out.p3 = std::exp(-beta) *
               (std::exp(-a1 * (t1 - cpos) - cpos) - std::exp(-t1)) /
               (1.0 - a1) -
           0.5 * std::exp(-2.0 * beta) * (std::exp(-cpos) - std::exp(-t1));
  out.p4 = out.p3;
  const double e = -std::expm1(-beta);  // 1 - exp(-beta)
  out.mog = e * e;
  return out;
}

double mop_closed_form_k2(const MopK2Params& params) {
  if (!params.strong_user_feasible()) return 1.0;
  const MopK2Subterms s = mop_k2_subterms(params);
  const double t1 = params.phi1() / params.rho();
  const double raw =
      1.0 - std::exp(-t1) * (1.0 - s.mog) - (s.p1 + s.p2 + s.p3 + s.p4);
  return clamp01(raw);
}

bool mop_bound_check(double mop, const std::vector<double>& user_outages,
                     double tolerance) {
  for (double p : user_outages)
    if (p > mop + tolerance) return false;
  return true;
}

}  // namespace conoma
