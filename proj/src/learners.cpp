#include "trade/learners.hpp"

#include <algorithm>
#include <cmath>

namespace trade {

namespace {

std::vector<double> softmax_of(const std::vector<double>& log_w) {
  double mx = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> p(log_w.size());
  double sum = 0.0;
  for (size_t i = 0; i < log_w.size(); ++i) {
    p[i] = std::exp(log_w[i] - mx);
    sum += p[i];
  }
  for (auto& x : p) x /= sum;
  return p;
}

}  // namespace

HedgeParams HedgeParams::defaults(std::int64_t horizon) {
  if (horizon < 4) throw std::invalid_argument("horizon too small");
  HedgeParams p;
  p.k = static_cast<int>(std::max<std::int64_t>(2, floor_root(horizon, 2)));
  p.eta = std::sqrt(std::log(static_cast<double>(p.k)) /
                    static_cast<double>(horizon));
  return p;
}

HedgeState hedge_make(const HedgeParams& params) {
  if (params.k < 2 || !(params.eta >= 0.0))
    throw std::invalid_argument("bad hedge parameters");
  HedgeState s;
  s.params = params;
  s.grid = uniform_grid(params.k);
  s.log_weights.assign(static_cast<size_t>(params.k), 0.0);
  return s;
}

std::vector<double> hedge_distribution(const HedgeState& state) {
  return softmax_of(state.log_weights);
}

int hedge_step(const HedgeState& state, Rng& rng) {
  return rng.categorical(softmax_of(state.log_weights));
}

void hedge_update(HedgeState& state, const std::vector<double>& rewards) {
  if (rewards.size() != state.log_weights.size())
    throw std::invalid_argument("reward vector length mismatch");
  for (double r : rewards)
    if (!(r >= 0.0 && r <= 1.0))
      throw std::invalid_argument("reward outside [0,1]");
  for (size_t i = 0; i < rewards.size(); ++i)
    state.log_weights[i] += state.params.eta * rewards[i];
}

BlindExp3Params BlindExp3Params::defaults(std::int64_t horizon) {
  if (horizon < 16) throw std::invalid_argument("horizon too small");
  BlindExp3Params p;
  auto t = static_cast<double>(horizon);
  p.k = static_cast<int>(std::max<std::int64_t>(2, floor_root(horizon, 4)));
  p.gamma = std::cbrt(std::log(t)) / std::pow(t, 0.25);
  p.eta = 0.5 * std::pow(std::log(t), 2.0 / 3.0) / std::pow(t, 0.75);
  return p;
}

BlindExp3State blind_exp3_make(const BlindExp3Params& params) {
  if (params.k < 2 || !(params.gamma > 0.0 && params.gamma <= 1.0) ||
      !(params.eta > 0.0))
    throw std::invalid_argument("bad blind-exp3 parameters");
  if (2.0 * params.eta * params.k / params.gamma > 1.0)
    throw std::invalid_argument("tuning must satisfy 2*eta*K/gamma <= 1");
  BlindExp3State s;
  s.params = params;
  s.grid = uniform_grid(params.k);
  s.log_weights.assign(static_cast<size_t>(params.k), 0.0);
  return s;
}

StepOutcome blind_exp3_step(BlindExp3State& state, const ValuationPair& v,
                            Rng& learner_rng, Rng& estimator_rng,
                            GftDefinition d) {
  check_valid(v);
  const int k = state.params.k;
  StepOutcome out;
  if (learner_rng.bernoulli(state.params.gamma)) {
    int i = static_cast<int>(learner_rng.index(k));
    auto est = estimate_gft(state.grid.points[static_cast<size_t>(i)], v,
                            estimator_rng);
    double r_hat = static_cast<double>(est.bit) * k / state.params.gamma;
    state.log_weights[static_cast<size_t>(i)] += state.params.eta * r_hat;
    out.action = {est.posted, ActionMode::Explore, i};
    out.payoff = gft(est.posted, v, d);
  } else {
    int i = learner_rng.categorical(softmax_of(state.log_weights));
    double p = state.grid.points[static_cast<size_t>(i)];
    out.action = {{p, p}, ActionMode::Exploit, i};
    out.payoff = gft_single(p, v, d);
  }
  return out;
}

Exp3BanditParams Exp3BanditParams::defaults(std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon too small");
  Exp3BanditParams p;
  p.k = static_cast<int>(ceil_root(horizon, 3));
  double kd = p.k;
  p.gamma = std::min(
      1.0, std::sqrt(kd * std::log(std::max(2.0, kd)) /
                     static_cast<double>(horizon)));
  p.eta = p.gamma / kd;
  return p;
}

Exp3BanditState exp3_bandit_make(const Exp3BanditParams& params) {
  if (params.k < 1 || !(params.gamma >= 0.0 && params.gamma <= 1.0) ||
      !(params.eta >= 0.0))
    throw std::invalid_argument("bad bandit parameters");
  Exp3BanditState s;
  s.params = params;
  if (params.k == 1) {
    s.grid.k = 1;
    s.grid.points = {1.0};
  } else {
    s.grid = uniform_grid(params.k);
  }
  s.log_weights.assign(static_cast<size_t>(params.k), 0.0);
  return s;
}

StepOutcome exp3_bandit_step(Exp3BanditState& state, const ValuationPair& v,
                             Rng& rng, GftDefinition d) {
  check_valid(v);
  const int k = state.params.k;
  auto pi = softmax_of(state.log_weights);
  for (auto& x : pi)
    x = (1.0 - state.params.gamma) * x + state.params.gamma / k;
  int i = rng.categorical(pi);
  double p = state.grid.points[static_cast<size_t>(i)];
  StepOutcome out;
  out.action = {{p, p}, ActionMode::Exploit, i};
  out.payoff = gft_single(p, v, d);
  state.log_weights[static_cast<size_t>(i)] +=
      state.params.eta * out.payoff / pi[static_cast<size_t>(i)];
  return out;
}

double theoretical_bound(LearnerKind alg, double horizon, int k, double eta,
                         double gamma, double sigma) {
  if (horizon <= 0 || k < 1 || sigma <= 0)
    throw std::invalid_argument("bad bound parameters");
  double kd = k;
  switch (alg) {
    case LearnerKind::Hedge:
      return 2.0 * std::sqrt(horizon * std::log(kd)) +
             horizon / (sigma * kd);
    case LearnerKind::BlindExp3:
      if (!(eta > 0.0 && gamma > 0.0))
        throw std::invalid_argument("bad bound parameters");
      return std::log(kd) / eta +
             (gamma + eta * kd / gamma + 1.0 / (sigma * kd)) * horizon;
    case LearnerKind::Exp3Bandit:
      throw std::invalid_argument(
          "no closed-form bound evaluator for the bandit baseline");
  }
  throw std::logic_error("unknown learner kind");
}

double blind_exp3_coarse_bound(double horizon, double sigma) {
  if (horizon <= 0 || sigma <= 0)
    throw std::invalid_argument("bad bound parameters");
  return (2.0 / sigma + 3.0 * std::cbrt(std::log(horizon))) *
         std::pow(horizon, 0.75);
}

}  // namespace trade
