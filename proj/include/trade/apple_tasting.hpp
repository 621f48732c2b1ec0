#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "trade/core.hpp"

namespace trade {

// The 2K-action game with K zero-reward "exploring" actions (each reveals
// one bit) and K reward-bearing but silent "exploiting" actions. Scenario 0
// is the unperturbed world; scenario k >= 1 biases bit k and makes
// exploiting action K+k the unique best arm.
struct MatInstance {
  int big_k = 0;
  double eps = 0.0;  // 1/(12 K)
  int scenario = 0;  // 0..K
  double a = 0.0, c_prob = 0.0, c_plat = 0.0, c_spike = 0.0;

  static MatInstance make(int big_k, int scenario);

  // Spike center of strip k, (4K + 2k - 1)/(12K). The first and last
  // centers are evaluated as 1/3 + eps and 1/2 - eps so the tiling
  // identities v_center(1) - eps == 1/3 and v_center(K) + eps == 1/2 hold
  // bitwise; interior centers are the exact quotients.
  double v_center(int k) const;
  // Strip boundary j = 0..K, the exact rational (2K + j)/(6K); edge(0) is
  // exactly 1/3 and edge(K) exactly 1/2 in double arithmetic.
  double strip_edge(int j) const;
};

struct RewardVector {
  std::vector<int> bits;  // length 2K; the top K bits are always 0
  int bit(int j) const { return bits[static_cast<size_t>(j - 1)]; }
};

struct MatCounters {
  std::vector<std::int64_t> n;  // plays of exploring action i in [K]
  std::vector<std::int64_t> m;  // plays of exploiting action K+i
};

// Independent bits; bit j in [K] is Bernoulli(1/2) except bit k, which is
// Bernoulli(1/2 + c_prob*eps) under scenario k >= 1.
RewardVector sample_reward_vector(const MatInstance& inst, Rng& rng);

// 0 for exploring actions; c_plat + (c_spike/c_prob)*(y(i-K) - 1/2) for
// exploiting ones. Actions are 1-based in [2K].
double mat_reward(int i, const RewardVector& y, const MatInstance& inst);

// Exploring actions reveal their bit; exploiting actions are silent.
std::optional<int> mat_feedback(int i, const RewardVector& y);

// Closed-form E^k[rho(i, Y)]: 0 for i <= K; c_plat + c_spike*eps when
// i = K + scenario; c_plat otherwise.
double expected_mat_reward(const MatInstance& inst, int i);

// Region index of a posted pair: k for the exploring strip
// [edge(k-1), edge(k)) x [2/3, 5/6] (strip K closed on the right), K+k for
// the same strip with q < 2/3 (k <= K-1 only), 2K for everything else.
int iota(const PricePair& pp, const MatInstance& inst);

struct FourOutcomeDecomposition {
  std::array<double, 4> mu0{};
  std::array<double, 4> mu1{};
};

// Writes two four-outcome feedback laws as mixtures over a shared pair
// (mu0, mu1) driven by their Bernoulli parameters:
// (1-p0)*mu0 + p0*mu1 = p0_fb and (1-pk)*mu0 + pk*mu1 = pk_fb.
// Throws if a mixture component would be negative (the pair is then not
// representable from one bit plus an independent uniform seed).
FourOutcomeDecomposition decompose_feedback(const std::array<double, 4>& p0_fb,
                                            const std::array<double, 4>& pk_fb,
                                            double p0, double pk);

// Inverse-CDF draw from mu_y on a uniform seed u; returns an outcome in 0..3.
int simulate_feedback(const FourOutcomeDecomposition& dec, int y_bit,
                      double u);

double bernoulli_kl(double p, double q);

// Evaluates the KL of the fair bit against the biased bit at the horizon's
// own (K, eps) and checks it against 4 * c_prob^2 * eps^2. Requires
// T >= 8008.
bool check_useful_inequality(std::int64_t horizon);

enum class MatPolicyKind { UniformExplore, ExploreThenCommit, AlwaysCommit };

struct MatPolicy {
  MatPolicyKind kind = MatPolicyKind::ExploreThenCommit;
  std::int64_t budget = 0;  // per-arm exploring budget (ExploreThenCommit)
};

struct MatEpisodeResult {
  MatCounters counters;
  double regret = 0.0;
};

// Runs the episode with exact expected rewards in the regret accounting (the
// policy itself still only sees sampled bits). Once a policy has committed
// to a silent action the remaining rounds are accounted in bulk.
MatEpisodeResult run_mat_episode(const MatInstance& inst,
                                 const MatPolicy& policy, std::int64_t horizon,
                                 Rng& rng);

}  // namespace trade
