#include "trade/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "trade/apple_tasting.hpp"
#include "trade/feedback.hpp"

namespace trade {

namespace {

using json = nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_compat(LearnerKind alg, ChannelKind fb) {
  bool ok = false;
  switch (alg) {
    case LearnerKind::Hedge:
      ok = fb == ChannelKind::Full;
      break;
    case LearnerKind::BlindExp3:
      ok = fb == ChannelKind::OneBit || fb == ChannelKind::TwoBit;
      break;
    case LearnerKind::Exp3Bandit:
      ok = fb == ChannelKind::Bandit;
      break;
  }
  if (!ok)
    throw std::invalid_argument(
        "feedback channel incompatible with the configured learner");
}

AdversarySpec episode_adversary(const RunConfig& cfg, Rng& adv_rng) {
  if (!cfg.randomize_perturbation) return cfg.adversary;
  if (cfg.adversary.variant != AdversaryVariant::PerturbedF)
    throw std::invalid_argument(
        "randomize_perturbation requires a perturbed_f adversary");
  auto big_k = static_cast<int>(ceil_root(cfg.horizon, 4));
  auto inst = MatInstance::make(big_k, 0);
  int k = 1 + static_cast<int>(adv_rng.index(big_k));
  return AdversarySpec::perturbed_f({inst.v_center(k), inst.eps});
}

struct HindsightOracle {
  double value = 0.0;
  double best_price = 0.0;
};

HindsightOracle grid_hindsight(const std::vector<ValuationPair>& vals,
                               int resolution) {
  PriceGrid grid = uniform_grid(resolution);
  std::vector<double> diff(grid.points.size() + 1, 0.0);
  for (const auto& v : vals) {
    if (v.s > v.b) continue;
    auto lo = std::lower_bound(grid.points.begin(), grid.points.end(), v.s);
    auto hi = std::upper_bound(grid.points.begin(), grid.points.end(), v.b);
    if (lo >= hi) continue;
    diff[static_cast<size_t>(lo - grid.points.begin())] += v.b - v.s;
    diff[static_cast<size_t>(hi - grid.points.begin())] -= v.b - v.s;
  }
  HindsightOracle out;
  double acc = 0.0, best = -1.0;
  size_t best_i = 0;
  for (size_t i = 0; i < grid.points.size(); ++i) {
    acc += diff[i];
    if (acc > best) {
      best = acc;
      best_i = i;
    }
  }
  out.value = std::max(0.0, best);
  out.best_price = grid.points[best_i];
  return out;
}

}  // namespace

RunRecord run_episode(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be positive");
  check_compat(cfg.learner.alg, cfg.feedback);

  Rng adv_rng(split_seed(seed, 0));
  Rng learner_rng(split_seed(seed, 1));
  Rng estimator_rng(split_seed(seed, 2));
  AdversarySpec spec = episode_adversary(cfg, adv_rng);

  const std::int64_t horizon = cfg.horizon;
  const bool need_vals =
      cfg.oracle == OracleMode::GridHindsight || cfg.record_trajectory;

  RunRecord rec;
  rec.horizon = horizon;
  rec.seed = seed;
  std::vector<ValuationPair> vals;
  if (need_vals) vals.reserve(static_cast<size_t>(horizon));
  if (cfg.record_trajectory)
    rec.rounds.reserve(static_cast<size_t>(horizon));

  double cum = 0.0;
  auto push_round = [&](std::int64_t t, const PricePair& pp,
                        const ValuationPair& v, double payoff) {
    cum += payoff;
    if (cfg.record_trajectory)
      rec.rounds.push_back({t + 1, pp.p, pp.q, v.s, v.b, payoff, cum, 0.0});
  };

  switch (cfg.learner.alg) {
    case LearnerKind::Hedge: {
      HedgeParams hp = HedgeParams::defaults(horizon);
      if (cfg.learner.k > 0) {
        hp.k = cfg.learner.k;
        hp.eta = std::sqrt(std::log(static_cast<double>(hp.k)) /
                           static_cast<double>(horizon));
      }
      if (cfg.learner.eta > 0) hp.eta = cfg.learner.eta;
      HedgeState st = hedge_make(hp);
      std::vector<double> rewards(st.grid.points.size());
      for (std::int64_t t = 0; t < horizon; ++t) {
        ValuationPair v = sample(spec, adv_rng, t);
        if (need_vals) vals.push_back(v);
        int i = hedge_step(st, learner_rng);
        double p = st.grid.points[static_cast<size_t>(i)];
        PricePair pp{p, p};
        double payoff = gft(pp, v, cfg.gft_def);
        Feedback fb = observe(FeedbackKind::Full, pp, v);
        for (size_t j = 0; j < rewards.size(); ++j)
          rewards[j] = gft_single(st.grid.points[j], fb.valuations,
                                  cfg.gft_def);
        hedge_update(st, rewards);
        push_round(t, pp, v, payoff);
      }
      break;
    }
    case LearnerKind::BlindExp3: {
      BlindExp3Params bp = BlindExp3Params::defaults(horizon);
      if (cfg.learner.k > 0) bp.k = cfg.learner.k;
      if (cfg.learner.gamma > 0) bp.gamma = cfg.learner.gamma;
      if (cfg.learner.eta > 0) bp.eta = cfg.learner.eta;
      BlindExp3State st = blind_exp3_make(bp);
      for (std::int64_t t = 0; t < horizon; ++t) {
        ValuationPair v = sample(spec, adv_rng, t);
        if (need_vals) vals.push_back(v);
        StepOutcome out =
            blind_exp3_step(st, v, learner_rng, estimator_rng, cfg.gft_def);
        push_round(t, out.action.pp, v, out.payoff);
      }
      break;
    }
    case LearnerKind::Exp3Bandit: {
      Exp3BanditParams ep = Exp3BanditParams::defaults(horizon);
      if (cfg.learner.k > 0) ep.k = cfg.learner.k;
      if (cfg.learner.gamma > 0) ep.gamma = cfg.learner.gamma;
      if (cfg.learner.eta > 0) ep.eta = cfg.learner.eta;
      Exp3BanditState st = exp3_bandit_make(ep);
      for (std::int64_t t = 0; t < horizon; ++t) {
        ValuationPair v = sample(spec, adv_rng, t);
        if (need_vals) vals.push_back(v);
        StepOutcome out = exp3_bandit_step(st, v, learner_rng, cfg.gft_def);
        push_round(t, out.action.pp, v, out.payoff);
      }
      break;
    }
  }

  rec.cum_payoff = cum;
  if (cfg.oracle == OracleMode::ClosedForm) {
    if (!spec.iid)
      throw std::invalid_argument(
          "closed-form oracle requires an i.i.d. adversary; use the "
          "hindsight oracle instead");
    int res = cfg.oracle_resolution > 0 ? cfg.oracle_resolution : 10000;
    double per_round = best_fixed_price(spec, res).second;
    rec.oracle_value = per_round * static_cast<double>(horizon);
    if (cfg.record_trajectory)
      for (auto& row : rec.rounds)
        row.cum_regret =
            per_round * static_cast<double>(row.t) - row.cum_payoff;
  } else {
    int res = cfg.oracle_resolution > 0
                  ? cfg.oracle_resolution
                  : 10 * static_cast<int>(ceil_root(horizon, 2));
    HindsightOracle oracle = grid_hindsight(vals, res);
    rec.oracle_value = oracle.value;
    if (cfg.record_trajectory) {
      double run = 0.0;
      for (size_t i = 0; i < rec.rounds.size(); ++i) {
        run += gft_single(oracle.best_price, vals[i], cfg.gft_def);
        rec.rounds[i].cum_regret = run - rec.rounds[i].cum_payoff;
      }
    }
  }
  rec.regret = rec.oracle_value - rec.cum_payoff;
  return rec;
}

SweepResult sweep(const RunConfig& tmpl,
                  const std::vector<std::int64_t>& horizons,
                  int seeds_per_horizon, std::uint64_t master_seed,
                  int workers) {
  if (horizons.size() < 2)
    throw std::invalid_argument("sweep needs at least 2 horizons");
  if (seeds_per_horizon < 1)
    throw std::invalid_argument("sweep needs at least 1 seed per horizon");
  if (workers <= 0) workers = default_workers();

  const size_t n_h = horizons.size();
  const auto n_s = static_cast<size_t>(seeds_per_horizon);
  std::vector<std::vector<double>> regrets(n_h,
                                           std::vector<double>(n_s, 0.0));

  std::atomic<size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto work = [&]() {
    for (;;) {
      size_t idx = cursor.fetch_add(1);
      if (idx >= n_h * n_s) return;
      try {
        RunConfig cfg = tmpl;
        cfg.horizon = horizons[idx / n_s];
        cfg.record_trajectory = false;
        std::uint64_t ep_seed = split_seed(master_seed, idx);
        regrets[idx / n_s][idx % n_s] = run_episode(cfg, ep_seed).regret;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  SweepResult res;
  for (size_t h = 0; h < n_h; ++h) {
    double mean = 0.0;
    for (double r : regrets[h]) mean += r;
    mean /= static_cast<double>(n_s);
    double var = 0.0;
    for (double r : regrets[h]) var += (r - mean) * (r - mean);
    double se = n_s > 1 ? std::sqrt(var / static_cast<double>(n_s - 1)) /
                              std::sqrt(static_cast<double>(n_s))
                        : 0.0;
    res.points.push_back({horizons[h], mean, se, seeds_per_horizon});
    if (mean <= se) res.degenerate = true;
  }
  if (!res.degenerate) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(n_h);
    for (const auto& pt : res.points) {
      double x = std::log(static_cast<double>(pt.horizon));
      double y = std::log(pt.mean_regret);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    res.intercept = (sy - res.slope * sx) / n;
  }
  return res;
}

std::string run_record_csv(const RunRecord& rec) {
  std::string out = "t,p,q,s,b,payoff,cum_payoff,cum_regret\n";
  for (const auto& r : rec.rounds) {
    out += std::to_string(r.t);
    for (double x : {r.p, r.q, r.s, r.b, r.payoff, r.cum_payoff,
                     r.cum_regret}) {
      out += ',';
      out += fmt(x);
    }
    out += '\n';
  }
  return out;
}

std::string run_record_json(const RunRecord& rec) {
  std::string out = "{\n";
  out += "  \"horizon\": " + std::to_string(rec.horizon) + ",\n";
  out += "  \"seed\": " + std::to_string(rec.seed) + ",\n";
  out += "  \"oracle_value\": " + fmt(rec.oracle_value) + ",\n";
  out += "  \"cum_payoff\": " + fmt(rec.cum_payoff) + ",\n";
  out += "  \"regret\": " + fmt(rec.regret) + ",\n";
  out += "  \"rounds\": [";
  for (size_t i = 0; i < rec.rounds.size(); ++i) {
    const auto& r = rec.rounds[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"t\": " + std::to_string(r.t) + ", \"p\": " + fmt(r.p) +
           ", \"q\": " + fmt(r.q) + ", \"s\": " + fmt(r.s) +
           ", \"b\": " + fmt(r.b) + ", \"payoff\": " + fmt(r.payoff) +
           ", \"cum_payoff\": " + fmt(r.cum_payoff) +
           ", \"cum_regret\": " + fmt(r.cum_regret) + "}";
  }
  out += rec.rounds.empty() ? "]\n}" : "\n  ]\n}";
  out += '\n';
  return out;
}

RunRecord run_record_from_json_string(const std::string& text) {
  json j = json::parse(text);
  RunRecord rec;
  rec.horizon = j.at("horizon").get<std::int64_t>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.oracle_value = j.at("oracle_value").get<double>();
  rec.cum_payoff = j.at("cum_payoff").get<double>();
  rec.regret = j.at("regret").get<double>();
  for (const auto& e : j.at("rounds")) {
    RoundRow r;
    r.t = e.at("t").get<std::int64_t>();
    r.p = e.at("p").get<double>();
    r.q = e.at("q").get<double>();
    r.s = e.at("s").get<double>();
    r.b = e.at("b").get<double>();
    r.payoff = e.at("payoff").get<double>();
    r.cum_payoff = e.at("cum_payoff").get<double>();
    r.cum_regret = e.at("cum_regret").get<double>();
    rec.rounds.push_back(r);
  }
  return rec;
}

std::string sweep_csv(const SweepResult& res) {
  std::string out = "T,mean_regret,stderr,n_seeds\n";
  for (const auto& pt : res.points) {
    out += std::to_string(pt.horizon) + ',' + fmt(pt.mean_regret) + ',' +
           fmt(pt.stderr_regret) + ',' + std::to_string(pt.n_seeds) + '\n';
  }
  return out;
}

std::string sweep_json(const SweepResult& res) {
  std::string out = "{\n  \"points\": [";
  for (size_t i = 0; i < res.points.size(); ++i) {
    const auto& pt = res.points[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"T\": " + std::to_string(pt.horizon) +
           ", \"mean_regret\": " + fmt(pt.mean_regret) +
           ", \"stderr\": " + fmt(pt.stderr_regret) +
           ", \"n_seeds\": " + std::to_string(pt.n_seeds) + "}";
  }
  out += res.points.empty() ? "],\n" : "\n  ],\n";
  out += "  \"degenerate\": ";
  out += res.degenerate ? "true" : "false";
  if (!res.degenerate) {
    out += ",\n  \"slope\": " + fmt(res.slope);
    out += ",\n  \"intercept\": " + fmt(res.intercept);
  }
  out += "\n}\n";
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

RunConfig run_config_from_json_string(const std::string& text) {
  json j = json::parse(text);
  RunConfig cfg;
  cfg.adversary = adversary_from_json_string(j.at("adversary").dump());

  std::string alg = "hedge";
  if (j.contains("learner")) {
    const auto& l = j["learner"];
    alg = l.value("alg", alg);
    cfg.learner.k = l.value("k", 0);
    cfg.learner.eta = l.value("eta", 0.0);
    cfg.learner.gamma = l.value("gamma", 0.0);
  }
  if (alg == "hedge") {
    cfg.learner.alg = LearnerKind::Hedge;
    cfg.feedback = ChannelKind::Full;
  } else if (alg == "blind_exp3") {
    cfg.learner.alg = LearnerKind::BlindExp3;
    cfg.feedback = ChannelKind::OneBit;
  } else if (alg == "exp3_bandit") {
    cfg.learner.alg = LearnerKind::Exp3Bandit;
    cfg.feedback = ChannelKind::Bandit;
  } else {
    throw std::invalid_argument("unknown learner alg: " + alg);
  }

  if (j.contains("feedback")) {
    std::string fb = j["feedback"].get<std::string>();
    if (fb == "full")
      cfg.feedback = ChannelKind::Full;
    else if (fb == "two_bit")
      cfg.feedback = ChannelKind::TwoBit;
    else if (fb == "one_bit")
      cfg.feedback = ChannelKind::OneBit;
    else if (fb == "bandit")
      cfg.feedback = ChannelKind::Bandit;
    else
      throw std::invalid_argument("unknown feedback kind: " + fb);
  }

  if (j.contains("T"))
    cfg.horizon = j["T"].get<std::int64_t>();
  else if (j.contains("horizon"))
    cfg.horizon = j["horizon"].get<std::int64_t>();

  std::string oracle = j.value("oracle", std::string("closed_form"));
  if (oracle == "closed_form")
    cfg.oracle = OracleMode::ClosedForm;
  else if (oracle == "grid_hindsight")
    cfg.oracle = OracleMode::GridHindsight;
  else
    throw std::invalid_argument("unknown oracle mode: " + oracle);
  cfg.oracle_resolution = j.value("oracle_resolution", 0);

  std::string g = j.value("gft", std::string("surplus_split"));
  if (g == "surplus_split")
    cfg.gft_def = GftDefinition::SurplusSplit;
  else if (g == "full_surplus")
    cfg.gft_def = GftDefinition::FullSurplus;
  else
    throw std::invalid_argument("unknown gft definition: " + g);

  cfg.record_trajectory = j.value("record_trajectory", true);
  cfg.randomize_perturbation = j.value("randomize_perturbation", false);
  return cfg;
}

int default_workers() {
  if (const char* env = std::getenv("TRADESIM_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace trade
