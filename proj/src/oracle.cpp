#include "conoma/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace conoma::oracle {

namespace {

// Trapezoid-rule convolution pass: d_out = density of (sum + exp(lambda)),
// using the exponential-kernel running form
//   I(t+h) = e^{-h/lambda} I(t) + local trapezoid of e^{-(t+h-s)/lambda} d(s).
// O(n) per pass, O(h^2) error, same order as the plain trapezoid double sum.
std::vector<double> convolve_exponential(const std::vector<double>& d,
                                         double h, double lambda) {
  std::vector<double> out(d.size(), 0.0);
  const double decay = std::exp(-h / lambda);
  double acc = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    acc = decay * acc + 0.5 * h * (d[i - 1] * decay + d[i]);
    out[i] = acc / lambda;
  }
  return out;
}

double hypoexp_cdf_on_grid(const std::vector<double>& lambdas, double x,
                           std::size_t n) {
  const double h = x / static_cast<double>(n);
  std::vector<double> d(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    d[i] = std::exp(-(static_cast<double>(i) * h) / lambdas[0]) / lambdas[0];
  for (std::size_t j = 1; j < lambdas.size(); ++j)
    d = convolve_exponential(d, h, lambdas[j]);
  double cdf = 0.5 * (d.front() + d.back());
  for (std::size_t i = 1; i < n; ++i) cdf += d[i];
  return cdf * h;
}

// Adaptive Simpson on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

// Non-outage probability E[ 1{max > b} * weak_ok(min) ] for two iid unit
// exponentials (min, max) and a threshold-style weak-user term; the joint
// density of (min=x, max=y) is 2 e^{-x-y}, x < y. Integrating y out gives
// the 1-D integrand 2 e^{-x} e^{-max(x, b)} weak_ok(x).
double non_outage_quadrature(double strong_threshold,
                             const std::function<double(double)>& weak_ok,
                             std::vector<double> breakpoints) {
  const double b = strong_threshold;
  auto integrand = [&](double x) {
    return 2.0 * std::exp(-x) * std::exp(-std::max(x, b)) * weak_ok(x);
  };
  double upper = std::max(40.0, 4.0 * b);
  for (double p : breakpoints) upper = std::max(upper, 2.0 * p);
  breakpoints.push_back(b);
  breakpoints.push_back(upper);
  std::sort(breakpoints.begin(), breakpoints.end());
  double lo = 0.0;
  double total = 0.0;
  for (double p : breakpoints) {
    if (p <= lo) continue;
    if (p > upper) break;
    total += integrate(integrand, lo, p, 1e-13);
    lo = p;
  }
  // Beyond `upper` both users are clear of their thresholds, so the
  // integrand is weak_ok(inf) * 2 e^{-2x}.
  total += weak_ok(upper * 2.0) * std::exp(-2.0 * upper);
  return total;
}

}  // namespace

double hypoexp_cdf_convolution(const std::vector<double>& lambdas, double x,
                               double tol) {
  if (lambdas.empty()) throw std::invalid_argument("need at least one rate");
  for (double l : lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("means must be positive");
  if (x <= 0.0) return 0.0;
  if (lambdas.size() == 1) return -std::expm1(-x / lambdas[0]);

  std::size_t n = 1u << 12;
  double prev = hypoexp_cdf_on_grid(lambdas, x, n);
  for (n <<= 1; n <= (1u << 19); n <<= 1) {
    const double cur = hypoexp_cdf_on_grid(lambdas, x, n);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

double proposed_mop_quadrature(double p2_sq, double rho, double phi1,
                               double phi2) {
  const double ph = p2_sq;
  const double pl = 1.0 - p2_sq;
  if (phi2 * pl >= ph) return 1.0;
  const double beta = phi2 / (rho * (ph - phi2 * pl));
  const double t1 = phi1 / rho;
  // Weak user clears phi1 iff relay gain exceeds phi1/rho - p_l * h1.
  auto weak_ok = [&](double x) {
    return std::exp(-std::max(t1 - pl * x, 0.0));
  };
  return 1.0 - non_outage_quadrature(beta, weak_ok, {t1 / pl});
}

double conventional_mop_quadrature(double p1_sq, double rho, double phi1,
                                   double phi2) {
  const double ph = p1_sq;
  const double pl = 1.0 - p1_sq;
  const double b = phi2 / (rho * pl);
  auto direct = [&](double x) { return ph * x / (pl * x + 1.0 / rho); };
  auto weak_ok = [&](double x) {
    return std::exp(-std::max(phi1 - direct(x), 0.0) / rho);
  };
  std::vector<double> breaks;
  if (ph > phi1 * pl) breaks.push_back(phi1 / (rho * (ph - phi1 * pl)));
  return 1.0 - non_outage_quadrature(b, weak_ok, std::move(breaks));
}

double sorted_exp_cdf(int k, int j, double x) {
  if (x <= 0.0) return 0.0;
  const double f = -std::expm1(-x);
  const double fc = std::exp(-x);
  double acc = 0.0;
  for (int i = j; i <= k; ++i) {
    double binom = 1.0;
    for (int m = 1; m <= i; ++m)
      binom *= static_cast<double>(k - i + m) / m;
    acc += binom * std::pow(f, i) * std::pow(fc, k - i);
  }
  return acc;
}

}  // namespace conoma::oracle
