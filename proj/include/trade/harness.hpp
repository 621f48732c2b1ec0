#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trade/adversary.hpp"
#include "trade/core.hpp"
#include "trade/learners.hpp"

namespace trade {

// Feedback channel as configured at the harness level; Bandit is the
// synthetic channel of the baseline (the learner observes its own payoff).
enum class ChannelKind { Full, TwoBit, OneBit, Bandit };

enum class OracleMode { ClosedForm, GridHindsight };

struct LearnerConfig {
  LearnerKind alg = LearnerKind::Hedge;
  int k = 0;          // 0: tuned default for the horizon
  double eta = 0.0;   // 0: tuned default
  double gamma = 0.0; // 0: tuned default (BlindExp3 / Exp3Bandit)
};

struct RunConfig {
  AdversarySpec adversary;
  LearnerConfig learner;
  ChannelKind feedback = ChannelKind::Full;
  std::int64_t horizon = 0;
  OracleMode oracle = OracleMode::ClosedForm;
  // 0 picks the default: 10^4 for the closed-form price search,
  // 10*ceil(sqrt(T)) for the hindsight grid.
  int oracle_resolution = 0;
  GftDefinition gft_def = GftDefinition::SurplusSplit;
  bool record_trajectory = true;
  // PerturbedF only: redraw the spike center uniformly among the horizon's
  // candidate centers at the start of each episode (K = ceil(T^{1/4})).
  bool randomize_perturbation = false;
};

struct RoundRow {
  std::int64_t t = 0;
  double p = 0, q = 0, s = 0, b = 0;
  double payoff = 0, cum_payoff = 0, cum_regret = 0;
};

struct RunRecord {
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  double cum_payoff = 0.0;
  double oracle_value = 0.0;
  double regret = 0.0;
  std::vector<RoundRow> rounds;  // empty unless record_trajectory
};

// Plays the protocol loop once. The master seed splits into disjoint
// adversary / learner / estimator streams, so changing the learner never
// perturbs the adversary's draws on the same seed.
RunRecord run_episode(const RunConfig& cfg, std::uint64_t seed);

struct SweepPoint {
  std::int64_t horizon = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  int n_seeds = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  // true when some horizon's mean regret is within one standard error of
  // zero; the log-log fit is meaningless then and is skipped.
  bool degenerate = false;
};

// Runs seeds_per_horizon episodes per horizon on a worker pool and fits
// log(mean regret) against log(T) by least squares. Episode seeds derive
// from (master_seed, global episode index); reduction order is fixed, so
// the result does not depend on the worker count.
SweepResult sweep(const RunConfig& tmpl,
                  const std::vector<std::int64_t>& horizons,
                  int seeds_per_horizon, std::uint64_t master_seed,
                  int workers);

// Serialization; every floating-point field is printed with 17 significant
// digits so parsing it back reproduces the exact doubles.
std::string run_record_csv(const RunRecord& rec);
std::string run_record_json(const RunRecord& rec);
RunRecord run_record_from_json_string(const std::string& text);
std::string sweep_csv(const SweepResult& res);
std::string sweep_json(const SweepResult& res);
void write_file(const std::string& path, const std::string& text);

RunConfig run_config_from_json_string(const std::string& text);

// TRADESIM_WORKERS environment override, else hardware concurrency, else 1.
int default_workers();

}  // namespace trade
