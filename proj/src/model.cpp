#include "conoma/model.hpp"

#include <cmath>
#include <stdexcept>

namespace conoma {

namespace {

constexpr double kSumTol = 1e-12;

void check_unit_sum(const std::vector<double>& v, const char* what) {
  double s = 0.0;
  for (double x : v) s += x;
  if (std::abs(s - 1.0) > kSumTol) {
    throw std::invalid_argument(std::string(what) +
                                " coefficients must sum to 1");
  }
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kProposedCnPa: return "cn-pa";
    case Scheme::kConventionalCnSa: return "cn-sa";
    case Scheme::kOma: return "oma";
  }
  return "?";
}

PowerAllocation::PowerAllocation(int k, std::vector<double> p_sq,
                                 std::vector<std::vector<double>> q_sq,
                                 bool conventional)
    : k_(k), p_sq_(std::move(p_sq)), q_sq_(std::move(q_sq)),
      conventional_(conventional) {
  validate();
}

void PowerAllocation::validate() const {
  if (k_ < 2) throw std::invalid_argument("need at least 2 users");
  if (static_cast<int>(p_sq_.size()) != k_)
    throw std::invalid_argument("p_sq size mismatch");
  if (static_cast<int>(q_sq_.size()) != k_ - 1)
    throw std::invalid_argument("q_sq must have one row per relaying user 2..K");
  for (double p : p_sq_) {
    if (!(p > 0.0) || p > 1.0)
      throw std::invalid_argument("squared coefficients must lie in (0, 1]");
  }
  for (int i = 1; i < k_; ++i) {
    const bool ok = conventional_ ? p_sq_[i - 1] >= p_sq_[i]
                                  : p_sq_[i - 1] <= p_sq_[i];
    if (!ok)
      throw std::invalid_argument(conventional_
                                      ? "conventional ordering requires p1^2 >= ... >= pK^2"
                                      : "proposed ordering requires p1^2 <= ... <= pK^2");
  }
  check_unit_sum(p_sq_, "direct-phase");
  for (int j = 2; j <= k_; ++j) {
    const auto& row = q_sq_[static_cast<size_t>(j) - 2];
    if (static_cast<int>(row.size()) != j - 1)
      throw std::invalid_argument("q row for user j must have j-1 entries");
    for (double q : row) {
      if (!(q > 0.0) || q > 1.0)
        throw std::invalid_argument("squared coefficients must lie in (0, 1]");
    }
    // relayed messages follow the same ordering rule as the direct phase
    for (std::size_t m = 1; m < row.size(); ++m) {
      const bool ok = conventional_ ? row[m - 1] >= row[m] : row[m - 1] <= row[m];
      if (!ok)
        throw std::invalid_argument(
            "cooperative-phase coefficients must follow the scheme's ordering");
    }
    check_unit_sum(row, "cooperative-phase");
  }
  if (std::abs(q_sq_[0][0] - 1.0) > kSumTol)
    throw std::invalid_argument("q(2,1) must equal 1");
}

PowerAllocation PowerAllocation::proposed(
    std::vector<double> p_sq, std::vector<std::vector<double>> q_sq) {
  const int k = static_cast<int>(p_sq.size());
  return PowerAllocation(k, std::move(p_sq), std::move(q_sq), false);
}

PowerAllocation PowerAllocation::proposed_two_user(double p2_sq) {
  return proposed({1.0 - p2_sq, p2_sq}, {{1.0}});
}

PowerAllocation PowerAllocation::conventional(
    std::vector<double> p_sq, std::vector<std::vector<double>> q_sq) {
  const int k = static_cast<int>(p_sq.size());
  return PowerAllocation(k, std::move(p_sq), std::move(q_sq), true);
}

PowerAllocation PowerAllocation::conventional_two_user(double p1_sq) {
  return conventional({p1_sq, 1.0 - p1_sq}, {{1.0}});
}

void NetworkRealization::validate() const {
  const int k = user_count();
  if (k < 2) throw std::invalid_argument("need at least 2 users");
  for (int i = 1; i < k; ++i) {
    if (h_sq_sorted[static_cast<size_t>(i) - 1] > h_sq_sorted[static_cast<size_t>(i)])
      throw std::invalid_argument("h_sq_sorted must be non-decreasing");
  }
  for (double h : h_sq_sorted)
    if (h < 0.0) throw std::invalid_argument("gains must be nonnegative");
  if (g_sq.size() != g_index(k, k - 1) + 1)
    throw std::invalid_argument("g_sq size mismatch");
  for (double g : g_sq)
    if (g < 0.0) throw std::invalid_argument("gains must be nonnegative");
}

RateTargets RateTargets::from_rates(std::vector<double> rates) {
  RateTargets t;
  for (double r : rates) {
    if (!(r > 0.0)) throw std::invalid_argument("rates must be positive");
    t.phi.push_back(std::exp2(r) - 1.0);
  }
  t.r = std::move(rates);
  return t;
}

RateTargets RateTargets::uniform(int k, double rate) {
  return from_rates(std::vector<double>(static_cast<size_t>(k), rate));
}

double RateTargets::threshold(Scheme scheme, int k, int user) const {
  const double rate = r[static_cast<size_t>(user) - 1];
  if (scheme == Scheme::kOma) return std::exp2(k * rate) - 1.0;
  return phi[static_cast<size_t>(user) - 1];
}

namespace {

void check_inputs(const PowerAllocation& alloc, const NetworkRealization& net,
                  double rho) {
  if (alloc.user_count() != net.user_count())
    throw std::invalid_argument("allocation/realization user count mismatch");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
}

}  // namespace

SinrVector sinr_proposed(const PowerAllocation& alloc,
                         const NetworkRealization& net, double rho) {
  SinrVector out;
  out.gamma.resize(static_cast<size_t>(alloc.user_count()));
  sinr_proposed_into(alloc, net, rho, out.gamma);
  return out;
}

void sinr_proposed_into(const PowerAllocation& alloc,
                        const NetworkRealization& net, double rho,
                        std::vector<double>& out) {
  check_inputs(alloc, net, rho);
  if (alloc.is_conventional())
    throw std::invalid_argument("proposed engine needs the ascending ordering");
  const int k = alloc.user_count();
  const double inv_rho = 1.0 / rho;

  // Users K-n for 0 <= n < K-1: direct-phase decode plus n relayed copies.
  for (int n = 0; n < k - 1; ++n) {
    const int user = k - n;
    const double h = net.h_sq_sorted[static_cast<size_t>(user) - 1];
    double p_interf = 0.0;
    for (int m = 1; m <= user - 1; ++m) p_interf += alloc.p_sq(m);
    double gamma = h * alloc.p_sq(user) / (h * p_interf + inv_rho);
    for (int i = 1; i <= n; ++i) {
      const int relay = k - i + 1;
      const double g = net.g(relay, user);
      double q_interf = 0.0;
      for (int m = 1; m <= user - 1; ++m) q_interf += alloc.q_sq(relay, m);
      gamma += g * alloc.q_sq(relay, user) / (g * q_interf + inv_rho);
    }
    out[static_cast<size_t>(user) - 1] = gamma;
  }

  // Weakest user: interference-free MRC of K copies, linear in rho.
  double sum = net.h_sq_sorted[0] * alloc.p_sq(1);
  for (int i = 1; i <= k - 1; ++i) {
    const int relay = k - i + 1;
    sum += net.g(relay, 1) * alloc.q_sq(relay, 1);
  }
  out[0] = rho * sum;
}

SinrVector sinr_conventional(const PowerAllocation& alloc,
                             const NetworkRealization& net, double rho) {
  SinrVector out;
  out.gamma.resize(static_cast<size_t>(alloc.user_count()));
  sinr_conventional_into(alloc, net, rho, out.gamma);
  return out;
}

void sinr_conventional_into(const PowerAllocation& alloc,
                            const NetworkRealization& net, double rho,
                            std::vector<double>& out) {
  check_inputs(alloc, net, rho);
  if (!alloc.is_conventional())
    throw std::invalid_argument("conventional engine needs the descending ordering");
  const int k = alloc.user_count();
  const double inv_rho = 1.0 / rho;

  // Mirrored roles: user k decodes its own message treating the lower-power
  // messages (of stronger users) as interference, then MRC-combines the
  // relayed copies; the strongest user SIC-decodes everything first.
  for (int user = 1; user <= k; ++user) {
    const double h = net.h_sq_sorted[static_cast<size_t>(user) - 1];
    double p_interf = 0.0;
    for (int m = user + 1; m <= k; ++m) p_interf += alloc.p_sq(m);
    double gamma = (user == k) ? rho * alloc.p_sq(k) * h
                               : h * alloc.p_sq(user) / (h * p_interf + inv_rho);
    for (int relay = user + 1; relay <= k; ++relay) {
      const double g = net.g(relay, user);
      double q_interf = 0.0;
      for (int m = user + 1; m <= relay - 1; ++m) q_interf += alloc.q_sq(relay, m);
      if (q_interf == 0.0)
        gamma += rho * alloc.q_sq(relay, user) * g;
      else
        gamma += g * alloc.q_sq(relay, user) / (g * q_interf + inv_rho);
    }
    out[static_cast<size_t>(user) - 1] = gamma;
  }
}

SinrVector sinr_oma(const NetworkRealization& net, double rho) {
  SinrVector out;
  out.gamma.resize(net.h_sq_sorted.size());
  sinr_oma_into(net, rho, out.gamma);
  return out;
}

void sinr_oma_into(const NetworkRealization& net, double rho,
                   std::vector<double>& out) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  for (std::size_t i = 0; i < net.h_sq_sorted.size(); ++i)
    out[i] = rho * net.h_sq_sorted[i];
}

DecodeSchedule decode_schedule(int k) {
  if (k < 2) throw std::invalid_argument("need at least 2 users");
  DecodeSchedule sched;
  using Action = DecodeSchedule::Action;

  // Slot 1: base station broadcast; the strongest user decodes its own data
  // (highest power) and SICs the rest, everyone else SICs the strong message.
  DecodeSchedule::Slot bs;
  bs.index = 1;
  bs.broadcaster = 0;
  for (int m = 1; m <= k; ++m) bs.messages.push_back(m);
  bs.user_action.assign(static_cast<size_t>(k), Action::kSicOnly);
  bs.user_action[static_cast<size_t>(k) - 1] = Action::kDecodeOwn;
  sched.slots.push_back(std::move(bs));

  // Cooperative slots n+1: user K-n+1 relays messages 1..K-n; user K-n
  // MRC-decodes its own message, weaker users SIC it out.
  for (int n = 1; n <= k - 1; ++n) {
    DecodeSchedule::Slot s;
    s.index = n + 1;
    s.broadcaster = k - n + 1;
    for (int m = 1; m <= k - n; ++m) s.messages.push_back(m);
    s.user_action.assign(static_cast<size_t>(k), Action::kNone);
    s.user_action[static_cast<size_t>(k - n) - 1] = Action::kMrcDecodeOwn;
    for (int u = 1; u < k - n; ++u)
      s.user_action[static_cast<size_t>(u) - 1] = Action::kSicOnly;
    sched.slots.push_back(std::move(s));
  }
  return sched;
}

}  // namespace conoma
