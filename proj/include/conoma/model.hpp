// Domain types and per-realization SINR engines for the downlink
// cooperative-NOMA schemes (proposed power-ordered CN-PA, conventional CN-SA,
// and OMA), plus the decoding schedule description.
//
// Conventions: users are indexed 1..K by ascending direct-channel power gain
// (user 1 = weakest). All powers and gains are linear. Transmit SNR rho is
// linear; dB conversion happens at the CLI boundary only.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace conoma {

enum class Scheme { kProposedCnPa, kConventionalCnSa, kOma };

std::string to_string(Scheme s);

// Squared power coefficients for the direct phase (p_sq, one per user) and,
// for each relaying user j in 2..K, the cooperative-phase coefficients
// q_sq(j, m) for the j-1 relayed messages m = 1..j-1.
class PowerAllocation {
 public:
  // Proposed ordering: p1^2 <= ... <= pK^2. Each q row sums to 1 and is
  // non-decreasing in m as well (stronger remaining user gets the larger
  // share); q(2,1) == 1 always.
  static PowerAllocation proposed(std::vector<double> p_sq,
                                  std::vector<std::vector<double>> q_sq);
  // Two-user proposed allocation from the strong user's coefficient.
  static PowerAllocation proposed_two_user(double p2_sq);
  // Conventional ordering: p1^2 >= ... >= pK^2 (weak user gets the most
  // power). q rows as above; q(2,1) == 1.
  static PowerAllocation conventional(std::vector<double> p_sq,
                                      std::vector<std::vector<double>> q_sq);
  // Two-user conventional allocation from the weak user's coefficient.
  static PowerAllocation conventional_two_user(double p1_sq);

  int user_count() const { return k_; }
  bool is_conventional() const { return conventional_; }
  const std::vector<double>& p_sq() const { return p_sq_; }
  double p_sq(int user) const { return p_sq_[static_cast<size_t>(user) - 1]; }
  // Cooperative coefficient q_{j,m}^2 for relaying user j sending message m.
  double q_sq(int j, int m) const {
    return q_sq_[static_cast<size_t>(j) - 2][static_cast<size_t>(m) - 1];
  }

 private:
  PowerAllocation(int k, std::vector<double> p_sq,
                  std::vector<std::vector<double>> q_sq, bool conventional);
  void validate() const;

  int k_;
  std::vector<double> p_sq_;
  std::vector<std::vector<double>> q_sq_;
  bool conventional_;
};

// One channel draw: sorted direct gains |h_k|^2 (ascending) and inter-user
// gains |g_{i,j}|^2 for i > j.
struct NetworkRealization {
  std::vector<double> h_sq_sorted;
  std::vector<double> g_sq;  // packed lower triangle, see g_index()

  static std::size_t g_index(int i, int j) {
    // i in 2..K, j in 1..i-1
    return static_cast<std::size_t>((i - 2) * (i - 1) / 2 + (j - 1));
  }
  double g(int i, int j) const { return g_sq[g_index(i, j)]; }
  double& g(int i, int j) { return g_sq[g_index(i, j)]; }

  int user_count() const { return static_cast<int>(h_sq_sorted.size()); }
  void validate() const;
};

struct SinrVector {
  std::vector<double> gamma;  // gamma[k-1] = user k's post-combining SINR
};

// Target rates R_k (bits per channel use) and thresholds phi_k = 2^{R_k}-1.
struct RateTargets {
  std::vector<double> r;
  std::vector<double> phi;

  static RateTargets from_rates(std::vector<double> rates);
  static RateTargets uniform(int k, double rate);
  // Threshold used for outage comparison under `scheme`; OMA pays the 1/K
  // time-sharing prelog, so its threshold is 2^{K R_k} - 1.
  double threshold(Scheme scheme, int k, int user) const;
};

// Eq. forms of the proposed scheme: user K-n (0 <= n < K-1) MRC-combines the
// direct-phase decode with the n relayed copies; user 1 is interference-free.
SinrVector sinr_proposed(const PowerAllocation& alloc,
                         const NetworkRealization& net, double rho);

// Conventional CN-SA. K=2 is exact; for K>2 the same reversed-role pattern is
// applied (weak-to-strong decoding order), which the source material defines
// only by citation -- treat K>2 conventional results as indicative.
SinrVector sinr_conventional(const PowerAllocation& alloc,
                             const NetworkRealization& net, double rho);

// OMA: each user served in its own slot at full power.
SinrVector sinr_oma(const NetworkRealization& net, double rho);

// Allocation-free variants for simulation hot loops; `out` must have K slots.
void sinr_proposed_into(const PowerAllocation& alloc,
                        const NetworkRealization& net, double rho,
                        std::vector<double>& out);
void sinr_conventional_into(const PowerAllocation& alloc,
                            const NetworkRealization& net, double rho,
                            std::vector<double>& out);
void sinr_oma_into(const NetworkRealization& net, double rho,
                   std::vector<double>& out);

// Decoding schedule description (who broadcasts what in each slot, and what
// every user does with it).
struct DecodeSchedule {
  enum class Action { kNone, kDecodeOwn, kSicOnly, kMrcDecodeOwn };
  struct Slot {
    int index = 0;        // 1-based time slot
    int broadcaster = 0;  // 0 = base station, else user index
    std::vector<int> messages;       // message indices in this broadcast
    std::vector<Action> user_action; // user_action[k-1] = user k's action
  };
  std::vector<Slot> slots;
};

DecodeSchedule decode_schedule(int k);

}  // namespace conoma
