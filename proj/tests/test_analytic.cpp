#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "conoma/analytic.hpp"
#include "conoma/oracle.hpp"
#include "conoma/rng.hpp"
#include "conoma/simulate.hpp"

using namespace conoma;

namespace {

OutageStats mc_proposed(double p2_sq, double rho_db, double rate,
                        std::uint64_t trials, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.k = 2;
  cfg.scheme = Scheme::kProposedCnPa;
  cfg.alloc = PowerAllocation::proposed_two_user(p2_sq);
  cfg.rho_grid_db = {rho_db};
  cfg.rates = RateTargets::uniform(2, rate);
  cfg.trials = trials;
  cfg.seed = seed;
  return run_experiment(cfg)[0].second;
}

}  // namespace

TEST_CASE("hypoexponential coefficients sum to one") {
  Xoshiro256pp rng(2024);
  for (int i = 0; i < 200; ++i) {
    const int k = 2 + static_cast<int>(rng.next() % 3);
    const double rho = std::pow(100.0, rng.uniform01());
    const double p1 = 0.05 + 0.45 * rng.uniform01();
    std::vector<double> q;
    for (int j = 0; j < k - 1; ++j) q.push_back(0.1 + 0.9 * rng.uniform01());
    const auto params = HypoExpParams::make(k, rho, p1, q);
    double sum = 0.0;
    for (double c : params.coefficients()) sum += c;
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("weak-user CDF endpoints") {
  const auto params = HypoExpParams::make(2, 10.0, 0.2, {1.0});
  CHECK(weak_user_outage(params, 0.0) == 0.0);
  double lam_max = 0.0;
  for (double l : params.lambdas()) lam_max = std::max(lam_max, l);
  CHECK(weak_user_outage(params, 50.0 * lam_max) > 1.0 - 1e-9);
  CHECK(weak_user_outage(params, 50.0 * lam_max) <= 1.0);
}

TEST_CASE("weak-user CDF against the convolution oracle") {
  // lambda = (1, 10): the evaluation point from the worked example.
  const auto params = HypoExpParams::make(2, 10.0, 0.2, {1.0});
  const double impl = weak_user_outage(params, 2.0);
  const double orac = oracle::hypoexp_cdf_convolution({1.0, 10.0}, 2.0);
  CHECK(std::abs(impl - orac) < 1e-6);
  CHECK(impl == doctest::Approx(0.10533641693964381).epsilon(1e-9));
}

TEST_CASE("near-equal rates go through the perturbation and stay accurate") {
  // q duplicates force lambda collisions; the oracle uses the raw rates.
  const auto params = HypoExpParams::make(3, 10.0, 0.3, {0.5, 0.5});
  const std::vector<double> raw = {10.0 * 0.3 / 3.0, 5.0, 5.0};
  for (double gamma : {2.0, 6.0, 15.0}) {
    const double impl = weak_user_outage(params, gamma);
    const double orac = oracle::hypoexp_cdf_convolution(raw, gamma);
    CHECK(std::abs(impl - orac) < 1e-6);
  }
  // exact triple collision
  const auto p3 = HypoExpParams::make(3, 9.0, 1.0 / 3.0, {1.0, 1.0});
  const double impl = weak_user_outage(p3, 5.0);
  const double orac = oracle::hypoexp_cdf_convolution({1.0, 9.0, 9.0}, 5.0);
  CHECK(std::abs(impl - orac) < 1e-6);
}

TEST_CASE("weak-user outage is monotone in gamma and rho") {
  double prev = -1.0;
  const auto params = HypoExpParams::make(2, 10.0, 0.2, {1.0});
  for (double g = 0.0; g < 30.0; g += 0.5) {
    const double v = weak_user_outage(params, g);
    CHECK(v >= prev);
    prev = v;
  }
  prev = 2.0;
  for (double rho = 1.0; rho < 1e4; rho *= 2.0) {
    const double v =
        weak_user_outage(HypoExpParams::make(2, rho, 0.2, {1.0}), 1.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("strong-user outage branches") {
  const std::vector<double> p = {0.2, 0.8};
  CHECK(strong_user_outage(p, 10.0, 2, 0.0) == 0.0);
  CHECK(strong_user_outage(p, 10.0, 2, 4.0) == 1.0);   // phi == ceiling
  CHECK(strong_user_outage(p, 10.0, 2, 5.0) == 1.0);   // beyond ceiling
  CHECK(strong_user_outage(p, 10.0, 2, 3.9) < 1.0);
}

TEST_CASE("strong-user outage matches Monte Carlo") {
  const auto st = mc_proposed(0.8, 12.0, 1.0, 1000000, 77);
  const double expect =
      strong_user_outage({0.2, 0.8}, std::pow(10.0, 1.2), 2, 1.0);
  CHECK(std::abs(st.per_user_outage[1] - expect) / st.per_user_se[1] < 3.0);
}

TEST_CASE("weak-user outage matches Monte Carlo") {
  const auto st = mc_proposed(0.8, 12.0, 1.0, 1000000, 78);
  const auto params = HypoExpParams::make(2, std::pow(10.0, 1.2), 0.2, {1.0});
  const double expect = weak_user_outage(params, 1.0);
  CHECK(std::abs(st.per_user_outage[0] - expect) / st.per_user_se[0] < 3.0);
}

TEST_CASE("cdf_Yn branches and empirical law") {
  const auto alloc =
      PowerAllocation::proposed({0.1, 0.3, 0.6}, {{1.0}, {0.25, 0.75}});
  const RatioCdfParams params(alloc, 1);
  CHECK(params.zeta0() == doctest::Approx(3.0));
  CHECK(cdf_Yn(params, 10.0, 0.0) == 0.0);
  CHECK(cdf_Yn(params, 10.0, 3.1) == 1.0);

  // Resolve Y_1 = p2 h2/(p1 h2 + 1/rho) with h2 the middle of three sorted
  // exponentials, and compare the empirical CDF.
  Xoshiro256pp rng(1234);
  const double rho = 10.0;
  const int n = 1000000;
  int c03 = 0, c05 = 0, c10 = 0;
  for (int i = 0; i < n; ++i) {
    double a = rng.exponential(), b = rng.exponential(), c = rng.exponential();
    double lo = std::min({a, b, c}), hi = std::max({a, b, c});
    double mid = a + b + c - lo - hi;
    const double y = 0.3 * mid / (0.1 * mid + 1.0 / rho);
    c03 += y <= 0.3;
    c05 += y <= 0.5;
    c10 += y <= 1.0;
  }
  for (auto [count, y] : {std::pair{c03, 0.3}, {c05, 0.5}, {c10, 1.0}}) {
    const double emp = static_cast<double>(count) / n;
    const double se = std::sqrt(emp * (1.0 - emp) / n);
    CHECK(std::abs(emp - cdf_Yn(params, rho, y)) < 3.0 * se);
  }
}

TEST_CASE("cdf_Yn near the ceiling approaches one") {
  const auto alloc = PowerAllocation::proposed_two_user(0.8);
  const RatioCdfParams params(alloc, 0);
  for (double rho : {1.0, 10.0}) {
    const double y = params.zeta0() * (1.0 - 1e-6);
    CHECK(cdf_Yn(params, rho, y) >= 1.0 - 1e-3);
  }
}

TEST_CASE("cdf_Zi branches and empirical law") {
  const auto alloc =
      PowerAllocation::proposed({0.1, 0.3, 0.6}, {{1.0}, {0.25, 0.75}});
  const RatioCdfParams params(alloc, 1);
  CHECK(params.zeta_i(1) == doctest::Approx(3.0));
  CHECK(cdf_Zi(params, 1, 10.0, 0.0) == 0.0);
  CHECK(cdf_Zi(params, 1, 10.0, 3.5) == 1.0);

  Xoshiro256pp rng(555);
  const double rho = 10.0;
  const int n = 1000000;
  int cnt = 0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.exponential();
    cnt += 0.75 * g / (0.25 * g + 1.0 / rho) <= 1.0;
  }
  const double emp = static_cast<double>(cnt) / n;
  const double se = std::sqrt(emp * (1.0 - emp) / n);
  CHECK(std::abs(emp - cdf_Zi(params, 1, rho, 1.0)) < 3.0 * se);
  CHECK_THROWS_AS((void)cdf_Zi(params, 2, rho, 1.0), std::invalid_argument);
}

TEST_CASE("asymptotic weak-user bound") {
  CHECK(asymptotic_weak_cdf(2, 1e3, 0.2, {1.0}, 0.0) == 0.0);
  // K = 2, rho = 1e3, p1^2 = 0.2, q = 1, gamma = 1:
  // (1*2/(1e3*0.2)) * (1/(1e3*1)) = 1e-5
  const double v = asymptotic_weak_cdf(2, 1e3, 0.2, {1.0}, 1.0);
  CHECK(v == doctest::Approx(1e-5).epsilon(1e-12));
  // doubling rho divides by 2^K exactly
  const double half = asymptotic_weak_cdf(2, 2e3, 0.2, {1.0}, 1.0);
  CHECK(half * 4.0 == v);
  const double k3 = asymptotic_weak_cdf(3, 50.0, 0.1, {0.4, 1.0}, 0.7);
  CHECK(asymptotic_weak_cdf(3, 100.0, 0.1, {0.4, 1.0}, 0.7) * 8.0 == k3);
}

TEST_CASE("asymptotic bound dominates the exact weak-user CDF") {
  // 1 - e^{-x} <= x termwise, so the product bound holds at every SNR.
  for (double rho : {10.0, 100.0, 1000.0}) {
    for (double gamma : {0.3, 1.0, 2.0}) {
      const double exact =
          weak_user_outage(HypoExpParams::make(2, rho, 0.2, {1.0}), gamma);
      CHECK(asymptotic_weak_cdf(2, rho, 0.2, {1.0}, gamma) >= exact);
    }
  }
}

TEST_CASE("asymptotic remaining-user expression") {
  const auto alloc2 = PowerAllocation::proposed_two_user(0.8);
  const RatioCdfParams p0(alloc2, 0);
  // n = 0 reduces to (omega00/rho)^K
  const double v = asymptotic_kn_cdf(p0, 1e3, 1.0);
  CHECK(v == doctest::Approx((1.0 / 0.6) * (1.0 / 0.6) / 1e6).epsilon(1e-12));
  CHECK(asymptotic_kn_cdf(p0, 2e3, 1.0) * 4.0 ==
        doctest::Approx(v).epsilon(1e-15));
  CHECK_THROWS_AS((void)asymptotic_kn_cdf(p0, 1e3, 4.5), std::domain_error);

  const auto alloc3 =
      PowerAllocation::proposed({0.1, 0.3, 0.6}, {{1.0}, {0.25, 0.75}});
  const RatioCdfParams p1(alloc3, 1);
  const double w = asymptotic_kn_cdf(p1, 1e3, 0.5);
  CHECK(w > 0.0);
  CHECK(asymptotic_kn_cdf(p1, 2e3, 0.5) * 8.0 ==
        doctest::Approx(w).epsilon(1e-14));
}

TEST_CASE("diversity fit recovers exact power laws") {
  std::vector<std::pair<double, double>> curve;
  for (double rho = 10.0; rho <= 1.1e3; rho *= 1.5)
    curve.emplace_back(rho, 7.3 / (rho * rho));
  CHECK(std::abs(diversity_order_fit(curve) - 2.0) < 1e-9);

  curve.clear();
  for (double rho = 100.0; rho <= 1.1e4; rho *= 2.0)
    curve.emplace_back(rho, asymptotic_weak_cdf(3, rho, 0.1, {0.4, 1.0}, 0.7));
  CHECK(std::abs(diversity_order_fit(curve) - 3.0) < 1e-6);
}

TEST_CASE("diversity fit input validation") {
  std::vector<std::pair<double, double>> two = {{10.0, 0.1}, {20.0, 0.05}};
  CHECK_THROWS_AS((void)diversity_order_fit(two), std::invalid_argument);
  std::vector<std::pair<double, double>> zero = {
      {10.0, 0.1}, {20.0, 0.0}, {40.0, 0.01}};
  CHECK_THROWS_AS((void)diversity_order_fit(zero), std::domain_error);
  std::vector<std::pair<double, double>> unsorted = {
      {10.0, 0.1}, {5.0, 0.2}, {40.0, 0.01}};
  CHECK_THROWS_AS((void)diversity_order_fit(unsorted), std::invalid_argument);
}

TEST_CASE("diversity fit on simulated outage curves") {
  ExperimentConfig cfg;
  cfg.k = 2;
  cfg.scheme = Scheme::kProposedCnPa;
  cfg.alloc = PowerAllocation::proposed_two_user(0.795);
  for (double db = 18.0; db <= 30.0; db += 2.0) cfg.rho_grid_db.push_back(db);
  cfg.rates = RateTargets::uniform(2, 1.0);
  cfg.trials = 10000000;
  cfg.seed = 4242;
  std::vector<std::pair<double, double>> weak, strong;
  for (const auto& [db, st] : run_experiment(cfg)) {
    weak.emplace_back(std::pow(10.0, db / 10.0), st.per_user_outage[0]);
    strong.emplace_back(std::pow(10.0, db / 10.0), st.per_user_outage[1]);
  }
  CHECK(std::abs(diversity_order_fit(weak) - 2.0) < 0.3);
  CHECK(std::abs(diversity_order_fit(strong) - 2.0) < 0.3);
}

TEST_CASE("two-user MOP: infeasible strong rate") {
  // phi2 = 2 exceeds p_h/p_l = 1.5
  const MopK2Params params(0.6, 0.4, 100.0, 2.0, 2.0);
  CHECK(!params.strong_user_feasible());
  CHECK(mop_closed_form_k2(params) == 1.0);
  CHECK_THROWS_AS((void)mop_k2_subterms(params), std::domain_error);
}

TEST_CASE("two-user MOP: vanishing SNR") {
  const auto rates = RateTargets::uniform(2, 1.0);
  CHECK(mop_closed_form_k2(MopK2Params::two_user(0.8, 1e-6, rates)) >
        1.0 - 1e-6);
}

TEST_CASE("two-user MOP: worked value, quadrature, Monte Carlo") {
  const auto rates = RateTargets::uniform(2, 1.0);
  const double rho = std::pow(10.0, 1.2);
  const double cf = mop_closed_form_k2(MopK2Params::two_user(0.795, rho, rates));
  CHECK(cf == doctest::Approx(0.025359555947816914).epsilon(1e-12));
  const double quad = oracle::proposed_mop_quadrature(0.795, rho, 1.0, 1.0);
  CHECK(std::abs(cf - quad) < 1e-9);
  const auto st = mc_proposed(0.795, 12.0, 1.0, 1000000, 4100);
  CHECK(std::abs(cf - st.mop) / st.mop_se < 3.0);
}

TEST_CASE("two-user MOP against quadrature across regimes") {
  const auto rates1 = RateTargets::uniform(2, 1.0);
  const auto rates2 = RateTargets::uniform(2, 2.0);
  for (double db : {0.0, 6.0, 12.0, 21.0, 30.0}) {
    const double rho = std::pow(10.0, db / 10.0);
    for (double p2 : {0.55, 0.6, 0.8, 0.9, 0.995}) {
      for (const auto& rt : {rates1, rates2}) {
        const double cf = mop_closed_form_k2(MopK2Params::two_user(p2, rho, rt));
        const double quad =
            oracle::proposed_mop_quadrature(p2, rho, rt.phi[0], rt.phi[1]);
        CHECK(std::abs(cf - quad) < 1e-9);
      }
    }
  }
}

TEST_CASE("MOP parameter derivations and clamping") {
  const MopK2Params params(0.795, 0.205, 10.0, 1.0, 1.0);
  CHECK(params.strong_user_feasible());
  CHECK(params.beta() > 0.0);
  CHECK(params.delta_upper() >= 0.0);
  CHECK(params.delta_upper() <= params.phi1() / params.rho());
  // c < 0 regime: phi2/(p_h/p_l - phi2) > phi1
  const MopK2Params neg(0.55, 0.45, 10.0, 1.0, 1.0);
  CHECK(neg.c_raw() < 0.0);
  CHECK(neg.c_clamped() == 0.0);
  CHECK(neg.delta_upper() == 0.0);
  CHECK_THROWS_AS(MopK2Params(1.0, 0.0, 10.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(MopK2Params(0.4, 0.6, 10.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(MopK2Params(0.7, 0.2, 10.0, 1.0, 1.0),
                  std::invalid_argument);  // sum != 1
}

TEST_CASE("subterm symmetry and assembly") {
  Xoshiro256pp rng(909);
  int feasible = 0, negative_c = 0;
  for (int i = 0; i < 1000; ++i) {
    const double ph = 0.5 + 0.495 * rng.uniform01();
    const double rho = std::pow(10.0, -0.5 + 2.9 * rng.uniform01());
    const double phi1 = std::exp2(0.25 + 2.75 * rng.uniform01()) - 1.0;
    const double phi2 = std::exp2(0.25 + 2.75 * rng.uniform01()) - 1.0;
    const MopK2Params params(ph, 1.0 - ph, rho, phi1, phi2);
    if (!params.strong_user_feasible()) continue;
    ++feasible;
    negative_c += params.c_raw() < 0.0;
    const auto s = mop_k2_subterms(params);
    CHECK(s.p1 == s.p2);
    CHECK(s.p3 == s.p4);
    const double raw = 1.0 -
                       std::exp(-params.phi1() / params.rho()) * (1.0 - s.mog) -
                       (s.p1 + s.p2 + s.p3 + s.p4);
    CHECK(raw > -1e-9);
    CHECK(raw < 1.0 + 1e-9);
    const double clamped = std::min(1.0, std::max(0.0, raw));
    CHECK(std::abs(clamped - mop_closed_form_k2(params)) < 1e-12);
  }
  CHECK(feasible > 500);
  CHECK(negative_c > 20);  // the c < 0 clamp is exercised
}

TEST_CASE("empty integration region zeroes the first subterms") {
  const MopK2Params neg(0.55, 0.45, 10.0, 1.0, 1.0);  // c < 0, delta = 0
  const auto s = mop_k2_subterms(neg);
  CHECK(s.p1 == 0.0);
  CHECK(s.p2 == 0.0);
}

TEST_CASE("per-user outage never exceeds the MOP (analytic)") {
  const auto rates = RateTargets::uniform(2, 1.0);
  for (double db = 0.0; db <= 21.0; db += 3.0) {
    const double rho = std::pow(10.0, db / 10.0);
    for (double p2 : {0.6, 0.8, 0.9, 0.995}) {
      const auto alloc = PowerAllocation::proposed_two_user(p2);
      const double weak = weak_user_outage(
          HypoExpParams::from_allocation(alloc, rho), rates.phi[0]);
      const double strong = strong_user_outage(alloc.p_sq(), rho, 2, 1.0);
      const double mop =
          mop_closed_form_k2(MopK2Params::two_user(p2, rho, rates));
      CHECK(mop_bound_check(mop, {weak, strong}, 1e-12));
    }
  }
}

TEST_CASE("mop_bound_check basics") {
  CHECK(mop_bound_check(0.3, {0.1, 0.25}, 1e-12));
  CHECK(!mop_bound_check(0.1, {0.2, 0.05}, 1e-12));
}
