#include "trade/apple_tasting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trade/adversary.hpp"

namespace trade {

MatInstance MatInstance::make(int big_k, int scenario) {
  if (big_k < 1) throw std::invalid_argument("K must be positive");
  if (scenario < 0 || scenario > big_k)
    throw std::invalid_argument("scenario must lie in {0..K}");
  MatInstance inst;
  inst.big_k = big_k;
  inst.eps = 1.0 / (12.0 * big_k);
  inst.scenario = scenario;
  inst.a = kA;
  inst.c_prob = c_prob_const();
  inst.c_plat = c_plat_const();
  inst.c_spike = c_spike_const();
  if (!(0.5 + inst.c_prob * inst.eps < 1.0))
    throw std::logic_error("biased bit probability must stay below 1");
  return inst;
}

double MatInstance::v_center(int k) const {
  if (k < 1 || k > big_k) throw std::out_of_range("strip index");
  // Boundary centers are anchored to the plateau edges so that
  // v_center(1) - eps == 1/3 and v_center(K) + eps == 1/2 hold bitwise
  // (the raw quotient misses by an ulp for many K). At K = 1 no double
  // satisfies both; the left anchor wins.
  if (k == 1) return 1.0 / 3.0 + eps;
  if (k == big_k) return 0.5 - eps;
  return (4.0 * big_k + 2.0 * k - 1.0) / (12.0 * big_k);
}

double MatInstance::strip_edge(int j) const {
  if (j < 0 || j > big_k) throw std::out_of_range("edge index");
  return (2.0 * big_k + j) / (6.0 * big_k);
}

RewardVector sample_reward_vector(const MatInstance& inst, Rng& rng) {
  RewardVector y;
  y.bits.assign(static_cast<size_t>(2 * inst.big_k), 0);
  for (int j = 1; j <= inst.big_k; ++j) {
    double p1 = (inst.scenario >= 1 && j == inst.scenario)
                    ? 0.5 + inst.c_prob * inst.eps
                    : 0.5;
    y.bits[static_cast<size_t>(j - 1)] = rng.bernoulli(p1) ? 1 : 0;
  }
  return y;
}

double mat_reward(int i, const RewardVector& y, const MatInstance& inst) {
  if (i < 1 || i > 2 * inst.big_k) throw std::out_of_range("action index");
  if (i <= inst.big_k) return 0.0;
  return inst.c_plat +
         inst.c_spike / inst.c_prob * (y.bit(i - inst.big_k) - 0.5);
}

std::optional<int> mat_feedback(int i, const RewardVector& y) {
  int big_k = static_cast<int>(y.bits.size()) / 2;
  if (i < 1 || i > 2 * big_k) throw std::out_of_range("action index");
  if (i <= big_k) return y.bit(i);
  return std::nullopt;
}

double expected_mat_reward(const MatInstance& inst, int i) {
  if (i < 1 || i > 2 * inst.big_k) throw std::out_of_range("action index");
  if (i <= inst.big_k) return 0.0;
  int j = i - inst.big_k;
  double p1 = (inst.scenario >= 1 && j == inst.scenario)
                  ? 0.5 + inst.c_prob * inst.eps
                  : 0.5;
  return inst.c_plat + inst.c_spike / inst.c_prob * (p1 - 0.5);
}

namespace {

// Strip of x in [edge(0), edge(K)], or 0 when x lies outside. Half-open
// strips except the last, which is closed on the right; the comparisons
// against the exact edge quotients settle boundary points.
int strip_of(double x, const MatInstance& inst) {
  const int big_k = inst.big_k;
  if (x < inst.strip_edge(0) || x > inst.strip_edge(big_k)) return 0;
  if (x == inst.strip_edge(big_k)) return big_k;
  int k = 1 + static_cast<int>((x - inst.strip_edge(0)) * 6.0 * big_k);
  k = std::clamp(k, 1, big_k);
  while (k > 1 && x < inst.strip_edge(k - 1)) --k;
  while (k < big_k && x >= inst.strip_edge(k)) ++k;
  return k;
}

}  // namespace

int iota(const PricePair& pp, const MatInstance& inst) {
  check_valid(pp);
  const int big_k = inst.big_k;
  int k = strip_of(pp.p, inst);
  if (k == 0) return 2 * big_k;
  if (pp.q >= 2.0 / 3.0 && pp.q <= 5.0 / 6.0) return k;
  if (pp.q < 2.0 / 3.0 && k <= big_k - 1) return k + big_k;
  return 2 * big_k;
}

FourOutcomeDecomposition decompose_feedback(const std::array<double, 4>& p0_fb,
                                            const std::array<double, 4>& pk_fb,
                                            double p0, double pk) {
  if (!(p0 > 0.0 && p0 < 1.0))
    throw std::invalid_argument("p0 must lie in (0,1)");
  if (!(pk >= 0.0 && pk <= 1.0))
    throw std::invalid_argument("pk must lie in [0,1]");
  FourOutcomeDecomposition dec;
  if (p0 == pk) {
    for (int i = 0; i < 4; ++i)
      if (std::abs(p0_fb[static_cast<size_t>(i)] -
                   pk_fb[static_cast<size_t>(i)]) > 1e-12)
        throw std::invalid_argument(
            "equal bit parameters require equal feedback laws");
    dec.mu0 = p0_fb;
    dec.mu1 = p0_fb;
    return dec;
  }
  double denom = pk - p0;
  for (size_t i = 0; i < 4; ++i) {
    dec.mu0[i] = (pk * p0_fb[i] - p0 * pk_fb[i]) / denom;
    dec.mu1[i] = ((1.0 - p0) * pk_fb[i] - (1.0 - pk) * p0_fb[i]) / denom;
    if (dec.mu0[i] < -1e-12 || dec.mu1[i] < -1e-12)
      throw std::domain_error(
          "feedback pair is not representable from one bit plus a uniform "
          "seed (negative mixture component)");
  }
  return dec;
}

int simulate_feedback(const FourOutcomeDecomposition& dec, int y_bit,
                      double u) {
  const auto& mu = y_bit ? dec.mu1 : dec.mu0;
  double acc = 0.0;
  for (size_t i = 0; i < 4; ++i) {
    acc += mu[i];
    if (u < acc) return static_cast<int>(i);
  }
  return 3;
}

double bernoulli_kl(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("Bernoulli parameters must lie in [0,1]");
  auto term = [](double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return std::numeric_limits<double>::infinity();
    return x * std::log(x / y);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

bool check_useful_inequality(std::int64_t horizon) {
  if (horizon < 8008)
    throw std::invalid_argument("inequality check requires T >= 8008");
  auto big_k = static_cast<int>(ceil_root(horizon, 4));
  double eps = 1.0 / (12.0 * big_k);
  double x = c_prob_const() * eps;
  double lhs = 0.5 * (std::log(0.5 / (0.5 - x)) + std::log(0.5 / (0.5 + x)));
  double rhs = 4.0 * c_prob_const() * c_prob_const() * eps * eps;
  return lhs <= rhs;
}

MatEpisodeResult run_mat_episode(const MatInstance& inst,
                                 const MatPolicy& policy, std::int64_t horizon,
                                 Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (policy.kind == MatPolicyKind::ExploreThenCommit && policy.budget < 0)
    throw std::invalid_argument("budget must be nonnegative");
  const int big_k = inst.big_k;
  MatEpisodeResult res;
  res.counters.n.assign(static_cast<size_t>(big_k), 0);
  res.counters.m.assign(static_cast<size_t>(big_k), 0);
  std::vector<std::int64_t> bit_sum(static_cast<size_t>(big_k), 0);
  std::vector<std::int64_t> bit_cnt(static_cast<size_t>(big_k), 0);
  double played_value = 0.0;
  int committed_arm = 0;  // 0 = not committed; else an action in [K+1, 2K]

  for (std::int64_t t = 1; t <= horizon; ++t) {
    int action;
    switch (policy.kind) {
      case MatPolicyKind::UniformExplore:
        action = 1 + static_cast<int>(rng.index(big_k));
        break;
      case MatPolicyKind::AlwaysCommit:
        committed_arm = big_k + 1;
        action = committed_arm;
        break;
      case MatPolicyKind::ExploreThenCommit:
      default:
        if (t <= policy.budget * big_k) {
          action = 1 + static_cast<int>((t - 1) % big_k);
        } else {
          if (committed_arm == 0) {
            int best = 1;
            double best_mean = -1.0;
            for (int j = 1; j <= big_k; ++j) {
              auto cnt = bit_cnt[static_cast<size_t>(j - 1)];
              double mean =
                  cnt > 0 ? static_cast<double>(bit_sum[static_cast<size_t>(
                                j - 1)]) /
                                static_cast<double>(cnt)
                          : -1.0;
              if (mean > best_mean) {
                best_mean = mean;
                best = j;
              }
            }
            committed_arm = big_k + best;
          }
          action = committed_arm;
        }
        break;
    }

    if (action <= big_k) {
      ++res.counters.n[static_cast<size_t>(action - 1)];
      double p1 = (inst.scenario >= 1 && action == inst.scenario)
                      ? 0.5 + inst.c_prob * inst.eps
                      : 0.5;
      int bit = rng.bernoulli(p1) ? 1 : 0;
      bit_sum[static_cast<size_t>(action - 1)] += bit;
      ++bit_cnt[static_cast<size_t>(action - 1)];
    } else {
      if (committed_arm == action) {
        // silent arm, no more information: account the tail in bulk
        std::int64_t rem = horizon - t + 1;
        res.counters.m[static_cast<size_t>(action - big_k - 1)] += rem;
        played_value += static_cast<double>(rem) *
                        expected_mat_reward(inst, action);
        break;
      }
      ++res.counters.m[static_cast<size_t>(action - big_k - 1)];
      played_value += expected_mat_reward(inst, action);
    }
  }

  double opt = inst.scenario >= 1
                   ? expected_mat_reward(inst, big_k + inst.scenario)
                   : inst.c_plat;
  res.regret = static_cast<double>(horizon) * opt - played_value;
  return res;
}

}  // namespace trade
