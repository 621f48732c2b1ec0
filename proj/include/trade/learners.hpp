#pragma once

#include <cstdint>
#include <vector>

#include "trade/core.hpp"
#include "trade/feedback.hpp"

namespace trade {

enum class LearnerKind { Hedge, BlindExp3, Exp3Bandit };

// Full-feedback exponential weights over the diagonal price grid.
struct HedgeParams {
  int k = 0;
  double eta = 0.0;
  // k = floor(sqrt(T)), eta = sqrt(ln k / T).
  static HedgeParams defaults(std::int64_t horizon);
};

struct HedgeState {
  HedgeParams params;
  PriceGrid grid;
  std::vector<double> log_weights;
};

HedgeState hedge_make(const HedgeParams& params);
// Softmax of the log weights (max-subtracted before exponentiation).
std::vector<double> hedge_distribution(const HedgeState& state);
// Samples a grid index from the current distribution; state unchanged.
int hedge_step(const HedgeState& state, Rng& rng);
// log_weights[i] += eta * rewards[i]; rewards must lie in [0,1].
void hedge_update(HedgeState& state, const std::vector<double>& rewards);

// One-bit two-price learner: with probability gamma it explores a uniformly
// random grid price through the unbiased estimator, otherwise it exploits a
// single price drawn from the exponential-weights distribution.
struct BlindExp3Params {
  int k = 0;
  double gamma = 0.0;
  double eta = 0.0;
  // k = floor(T^{1/4}), gamma = (ln T)^{1/3}/T^{1/4},
  // eta = (1/2)(ln T)^{2/3}/T^{3/4}.
  static BlindExp3Params defaults(std::int64_t horizon);
};

struct BlindExp3State {
  BlindExp3Params params;
  PriceGrid grid;
  std::vector<double> log_weights;
};

// Throws unless 2*eta*k/gamma <= 1 and gamma in (0,1].
BlindExp3State blind_exp3_make(const BlindExp3Params& params);

enum class ActionMode { Exploit, Explore };

struct LearnerAction {
  PricePair pp;
  ActionMode mode = ActionMode::Exploit;
  int grid_index = -1;
};

struct StepOutcome {
  LearnerAction action;
  double payoff = 0.0;
};

// One protocol round. Exploration randomness (the estimator's coin and
// uniform price) comes from `estimator_rng` so that it stays independent of
// the learner's own sampling stream.
StepOutcome blind_exp3_step(BlindExp3State& state, const ValuationPair& v,
                            Rng& learner_rng, Rng& estimator_rng,
                            GftDefinition d = GftDefinition::SurplusSplit);

// Bandit baseline: exponential weights with explicit uniform exploration on
// a cube-root-sized grid, fed the importance-weighted realized payoff.
struct Exp3BanditParams {
  int k = 0;
  double gamma = 0.0;
  double eta = 0.0;
  // k = ceil(T^{1/3}), gamma = min(1, sqrt(k ln k / T)), eta = gamma / k.
  static Exp3BanditParams defaults(std::int64_t horizon);
};

struct Exp3BanditState {
  Exp3BanditParams params;
  PriceGrid grid;
  std::vector<double> log_weights;
};

Exp3BanditState exp3_bandit_make(const Exp3BanditParams& params);

StepOutcome exp3_bandit_step(Exp3BanditState& state, const ValuationPair& v,
                             Rng& rng,
                             GftDefinition d = GftDefinition::SurplusSplit);

// Closed-form regret bounds: 2*sqrt(T ln K) + T/(sigma K) for Hedge,
// ln K/eta + (gamma + eta K/gamma + 1/(sigma K)) T for BlindExp3. The bandit
// baseline has no bound evaluator here.
double theoretical_bound(LearnerKind alg, double horizon, int k, double eta,
                         double gamma, double sigma);

// The coarse tuned form (2/sigma + 3 (ln T)^{1/3}) * T^{3/4} that the
// BlindExp3 bound collapses to under default tuning.
double blind_exp3_coarse_bound(double horizon, double sigma);

}  // namespace trade
