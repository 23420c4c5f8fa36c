// Independent numerical oracles used by the validation suite and the tests.
// Everything here recomputes quantities from first principles (grid
// convolution, adaptive quadrature over the order-statistic joint density,
// binomial order-statistic CDFs) without touching the closed forms in
// analytic.hpp, so agreement is a genuine cross-check.

#pragma once

#include <vector>

namespace conoma::oracle {

// CDF at x of a sum of independent exponentials with the given means,
// by trapezoid-grid convolution of the densities with refinement until the
// result is stable to `tol`.
double hypoexp_cdf_convolution(const std::vector<double>& lambdas, double x,
                               double tol = 1e-9);

// Exact two-user mutual outage probability of the proposed scheme by 1-D
// adaptive quadrature over the (min, max, relay) joint density.
double proposed_mop_quadrature(double p2_sq, double rho, double phi1,
                               double phi2);

// Same for the conventional scheme (weak user holds p1^2 = p_h).
double conventional_mop_quadrature(double p1_sq, double rho, double phi1,
                                   double phi2);

// CDF at x of the j-th smallest of k unit-mean exponentials (1-based j).
double sorted_exp_cdf(int k, int j, double x);

}  // namespace conoma::oracle
