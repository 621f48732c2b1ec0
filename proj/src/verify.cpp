#include "trade/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "trade/adversary.hpp"
#include "trade/apple_tasting.hpp"
#include "trade/core.hpp"
#include "trade/feedback.hpp"
#include "trade/harness.hpp"
#include "trade/learners.hpp"

namespace trade {

namespace {

constexpr std::uint64_t kVerifySeed = 20250814ULL;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void add(VerifyReport& rep, const std::string& name, bool pass,
         const std::string& detail) {
  rep.checks.push_back({name, pass, detail});
}

bool throws_invalid(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::invalid_argument&) {
    return true;
  } catch (const std::out_of_range&) {
    return true;
  }
  return false;
}

// Draws a price pair uniformly from the upper triangle.
PricePair random_price_pair(Rng& rng) {
  double p = rng.real();
  double q = rng.real(p, 1.0);
  return {p, q};
}

PerturbationParams random_pert(Rng& rng) {
  double eps = rng.real(1e-3, 1.0 / 12.0);
  double v = rng.real(1.0 / 3.0 + eps, 0.5 - eps);
  return {v, eps};
}

void core_suite(VerifyReport& rep) {
  Rng rng(split_seed(kVerifySeed, 10));
  double worst_low = 0.0, worst_high = 0.0, worst_order = 0.0;
  bool ok = true;
  for (int it = 0; it < 100000; ++it) {
    PricePair pp = random_price_pair(rng);
    ValuationPair v{rng.real(), rng.real()};
    double g = gft(pp, v);
    double gf = gft(pp, v, GftDefinition::FullSurplus);
    worst_low = std::min(worst_low, g);
    worst_high = std::max(worst_high, g);
    worst_order = std::min(worst_order, gf - g);
    if (pp.p == pp.q && gf != g) ok = false;
  }
  add(rep, "gft range on random inputs",
      ok && worst_low >= 0.0 && worst_high <= 1.0 && worst_order >= 0.0,
      "min=" + num(worst_low) + " max=" + num(worst_high) +
          " min(full-split)=" + num(worst_order));

  double worst_dom = 0.0;
  for (int ip = 0; ip <= 24; ++ip)
    for (int iq = ip; iq <= 24; ++iq)
      for (int is = 0; is <= 24; ++is)
        for (int ib = 0; ib <= 24; ++ib) {
          ValuationPair v{is / 24.0, ib / 24.0};
          double diag = gft_single(ip / 24.0, v);
          double pair = gft({ip / 24.0, iq / 24.0}, v);
          worst_dom = std::min(worst_dom, diag - pair);
        }
  add(rep, "single price dominates pointwise on a grid", worst_dom >= 0.0,
      "min(diag-pair)=" + num(worst_dom));

  PriceGrid g4 = uniform_grid(4);
  bool grid_ok = g4.points == std::vector<double>{0.25, 0.5, 0.75, 1.0} &&
                 g4.mesh() == 0.25 &&
                 throws_invalid([] { uniform_grid(1); });
  add(rep, "uniform grid construction", grid_ok, "k=4 -> {0.25,...,1}");

  bool rejects = throws_invalid([] { gft({0.6, 0.5}, {0.1, 0.9}); }) &&
                 throws_invalid([] { gft({0.2, 0.5}, {-0.1, 0.9}); }) &&
                 throws_invalid([] { gft_single(1.5, {0.1, 0.9}); });
  add(rep, "invalid inputs rejected", rejects, "p>q and out-of-range throw");
}

void adversaries_suite(VerifyReport& rep) {
  Rng rng(split_seed(kVerifySeed, 20));
  const double plateau = expected_gft_base(0.3);

  std::vector<std::pair<std::string, AdversarySpec>> specs;
  specs.emplace_back("uniform01", AdversarySpec::uniform01());
  specs.emplace_back("blue", AdversarySpec::blue());
  specs.emplace_back("red", AdversarySpec::red());
  specs.emplace_back("base", AdversarySpec::base_f());
  for (int i = 0; i < 3; ++i)
    specs.emplace_back("perturbed#" + std::to_string(i),
                       AdversarySpec::perturbed_f(random_pert(rng)));

  for (const auto& [name, spec] : specs) {
    double mass = total_mass(spec);
    add(rep, "normalization(" + name + ")", std::abs(mass - 1.0) <= 1e-6,
        "|mass-1|=" + num(std::abs(mass - 1.0)));
    auto rep_s = check_smoothness(spec);
    add(rep, "smoothness(" + name + ")", rep_s.ok,
        "sup=" + num(rep_s.sup_density) + " cap=" + num(1.0 / spec.sigma));
    double min_density = 0.0;
    for (int ix = 0; ix <= 200; ++ix)
      for (int iy = 0; iy <= 200; ++iy)
        min_density =
            std::min(min_density, density(spec, ix / 200.0, iy / 200.0));
    add(rep, "nonnegativity(" + name + ")", min_density >= 0.0,
        "min=" + num(min_density));
  }

  double base_mass = total_mass(AdversarySpec::base_f());
  double worst_zero = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto pert = random_pert(rng);
    double d = std::abs(total_mass(AdversarySpec::perturbed_f(pert)) -
                        base_mass);
    worst_zero = std::max(worst_zero, d);
  }
  add(rep, "perturbations carry zero mass", worst_zero <= 1e-9,
      "max |mass diff|=" + num(worst_zero));

  AdversarySpec base = AdversarySpec::base_f();
  double worst_curve = 0.0;
  for (int i = 0; i < 50; ++i) {
    double p = rng.real();
    worst_curve = std::max(
        worst_curve,
        std::abs(expected_gft_base(p) - expected_gft_pair(base, {p, p})));
  }
  add(rep, "closed-form curve matches exact integral", worst_curve <= 1e-8,
      "max diff=" + num(worst_curve));

  std::vector<double> curve(1001);
  for (int i = 0; i <= 1000; ++i) curve[static_cast<size_t>(i)] =
      expected_gft_base(i / 1000.0);
  double worst_lip = 0.0;
  for (int i = 0; i <= 1000; ++i)
    for (int j = i + 1; j <= 1000; ++j) {
      double lhs = std::abs(curve[static_cast<size_t>(i)] -
                            curve[static_cast<size_t>(j)]);
      worst_lip = std::max(worst_lip, lhs - 9.0 * (j - i) / 1000.0);
    }
  add(rep, "expected gain is 9-Lipschitz (sigma=1/9)", worst_lip <= 1e-12,
      "max excess=" + num(worst_lip));

  double global_max = 0.0;
  for (int i = 0; i <= 100000; ++i)
    global_max = std::max(global_max, expected_gft_base(i / 100000.0));
  bool disc_ok = true;
  std::string disc_detail;
  for (int k : {10, 100, 1000}) {
    PriceGrid g = uniform_grid(k);
    double grid_max = 0.0;
    for (double p : g.points)
      grid_max = std::max(grid_max, expected_gft_base(p));
    double gap = global_max - grid_max;
    disc_ok = disc_ok && gap <= 9.0 / k;
    disc_detail += "K=" + std::to_string(k) + ":" + num(gap) + " ";
  }
  add(rep, "grid discretization gap within mesh/sigma", disc_ok, disc_detail);

  double explo = expected_gft_base(0.5) - expected_gft_base(2.0 / 3.0);
  double explo_exact = kA / (2.0 * (1.0 + 8.0 * kA));
  add(rep, "cost of exploration closed form",
      std::abs(explo - explo_exact) <= 1e-9,
      "value=" + num(explo) + " diff=" + num(std::abs(explo - explo_exact)));

  {
    Rng mc(split_seed(kVerifySeed, 21));
    double sum_half = 0.0, sum_two_thirds = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      ValuationPair v = sample(base, mc);
      sum_half += gft_single(0.5, v);
      sum_two_thirds += gft_single(2.0 / 3.0, v);
    }
    double mc_gap = (sum_half - sum_two_thirds) / n;
    add(rep, "cost of exploration by Monte Carlo",
        std::abs(mc_gap - explo_exact) <= 2e-3,
        "mc=" + num(mc_gap) + " exact=" + num(explo_exact));
  }

  {
    double worst = 1e9;
    for (int i = 0; i < 100; ++i) {
      auto pert = random_pert(rng);
      double at_v = expected_gft_perturbed(pert.v, pert);
      for (int j = 0; j < 100; ++j) {
        double p;
        do {
          p = rng.real(1.0 / 6.0, 0.5);
        } while (p >= pert.v - pert.eps && p <= pert.v + pert.eps);
        double margin = (at_v - expected_gft_perturbed(p, pert)) -
                        pert.eps / (864.0 * (1.0 + 8.0 * kA));
        worst = std::min(worst, margin);
      }
    }
    add(rep, "cost of suboptimality at the spike", worst >= -1e-12,
        "min margin above bound=" + num(worst));
  }

  {
    auto pert = PerturbationParams{17.0 / 48.0, 1.0 / 48.0};
    AdversarySpec pspec = AdversarySpec::perturbed_f(pert);
    double worst_same = 0.0;
    int kept = 0;
    while (kept < 1000) {
      PricePair pp = random_price_pair(rng);
      bool in_window = pp.p >= pert.v - pert.eps && pp.p <= pert.v + pert.eps &&
                       pp.q >= 2.0 / 3.0 && pp.q <= 5.0 / 6.0;
      if (in_window) continue;
      ++kept;
      auto fb = feedback_probs(base, pp);
      auto fp = feedback_probs(pspec, pp);
      for (int c = 0; c < 4; ++c)
        worst_same = std::max(worst_same,
                              std::abs(fb[static_cast<size_t>(c)] -
                                       fp[static_cast<size_t>(c)]));
    }
    add(rep, "feedback identical away from the spike", worst_same <= 1e-9,
        "max diff=" + num(worst_same));

    double margin_expect = c_prob_const() * pert.eps * kA / (1.0 + 8.0 * kA);
    double min_center = 1e9;
    double centers_x[2] = {pert.v - 0.5 * pert.eps, pert.v + 0.5 * pert.eps};
    double centers_y[2] = {17.0 / 24.0, 19.0 / 24.0};
    for (double cx : centers_x)
      for (double cy : centers_y) {
        auto fb = feedback_probs(base, {cx, cy});
        auto fp = feedback_probs(pspec, {cx, cy});
        double d = 0.0;
        for (int c = 0; c < 4; ++c)
          d = std::max(d, std::abs(fb[static_cast<size_t>(c)] -
                                   fp[static_cast<size_t>(c)]));
        min_center = std::min(min_center, d);
      }
    add(rep, "feedback separated inside the spike window",
        min_center >= margin_expect - 1e-12,
        "min shift=" + num(min_center) + " expected=" + num(margin_expect));

    double worst_sum = 0.0;
    for (int i = 0; i < 100; ++i) {
      PricePair pp = random_price_pair(rng);
      for (const auto* s : {&base, &pspec}) {
        auto fb = feedback_probs(*s, pp);
        double total = fb[0] + fb[1] + fb[2] + fb[3];
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
      }
    }
    add(rep, "feedback vector sums to one", worst_sum <= 1e-12,
        "max |sum-1|=" + num(worst_sum));
  }

  {
    double diag_max = 0.0;
    for (int i = 1; i <= 200; ++i)
      diag_max = std::max(diag_max,
                          expected_gft_pair(base, {i / 200.0, i / 200.0}));
    double worst = -1e9;
    for (int ip = 1; ip <= 200; ++ip)
      for (int iq = ip; iq <= 200; ++iq)
        worst = std::max(worst, expected_gft_pair(base, {ip / 200.0,
                                                         iq / 200.0}) -
                                    diag_max);
    add(rep, "no price pair beats the diagonal", worst <= 1e-9,
        "max excess over diagonal=" + num(worst));
  }

  {
    auto u = best_fixed_price(AdversarySpec::uniform01(), 1000);
    bool ok_u = std::abs(u.first - 0.5) <= 1e-12 &&
                std::abs(u.second - 0.125) <= 1e-12;
    auto b = best_fixed_price(base, 1000);
    bool ok_b = b.first == 1.0 / 6.0 && std::abs(b.second - plateau) <= 1e-15;
    auto pert = PerturbationParams{17.0 / 48.0, 1.0 / 48.0};
    auto p = best_fixed_price(AdversarySpec::perturbed_f(pert), 1000);
    bool ok_p = p.first == pert.v &&
                std::abs(p.second - (plateau + pert.eps * c_spike_const())) <=
                    1e-15;
    add(rep, "best fixed price closed forms", ok_u && ok_b && ok_p,
        "uniform=(0.5,0.125) base=(1/6,plateau) perturbed=(v,plateau+eps*c)");
  }

  {
    Rng mc(split_seed(kVerifySeed, 22));
    AdversarySpec uni = AdversarySpec::uniform01();
    double mean_s = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) mean_s += sample(uni, mc).s;
    mean_s /= n;
    add(rep, "uniform sampling mean", std::abs(mean_s - 0.5) <= 0.002,
        "mean s=" + num(mean_s));

    Rng mcb(split_seed(kVerifySeed, 23));
    double q2 = 0.0;
    for (int i = 0; i < n; ++i) {
      ValuationPair v = sample(base, mcb);
      if (LB_Q2.contains(v.s, v.b)) q2 += 1.0;
    }
    q2 /= n;
    double q2_exact = kA / (1.0 + 8.0 * kA);
    add(rep, "base sampling hits the corner piece at its mass",
        std::abs(q2 - q2_exact) <= 0.001,
        "empirical=" + num(q2) + " exact=" + num(q2_exact));

    Rng mcc(split_seed(kVerifySeed, 24));
    AdversarySpec blue = AdversarySpec::blue();
    bool all_in = true;
    for (int i = 0; i < 100000; ++i) {
      ValuationPair v = sample(blue, mcc);
      if (!(SP_Q1.contains(v.s, v.b) || SP_Q2.contains(v.s, v.b) ||
            SP_Q3.contains(v.s, v.b)))
        all_in = false;
    }
    add(rep, "blue draws stay inside the blue squares", all_in, "n=1e5");
  }

  {
    bool ok = true;
    for (const auto& [name, spec] : specs) {
      (void)name;
      AdversarySpec back = adversary_from_json_string(to_json_string(spec));
      Rng pr(split_seed(kVerifySeed, 25));
      for (int i = 0; i < 100; ++i) {
        double x = pr.real(), y = pr.real();
        if (density(spec, x, y) != density(back, x, y)) ok = false;
      }
    }
    add(rep, "adversary JSON round-trip", ok, "densities identical");
  }
}

void estimator_suite(VerifyReport& rep) {
  Rng rng(split_seed(kVerifySeed, 30));
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    double p = rng.real();
    ValuationPair v{rng.real(), rng.real()};
    Rng draws(split_seed(kVerifySeed, 3000 + static_cast<std::uint64_t>(trial)));
    double mean = 0.0;
    for (int i = 0; i < 100000; ++i) mean += estimate_gft(p, v, draws).bit;
    mean /= 100000.0;
    worst = std::max(worst, std::abs(mean - gft_single(p, v)));
  }
  add(rep, "one-bit estimator is unbiased", worst <= 0.01,
      "max |mean-gft|=" + num(worst));

  bool budget_ok = true;
  Rng r2(split_seed(kVerifySeed, 31));
  for (int i = 0; i < 100000; ++i) {
    double p = r2.real();
    auto est = estimate_gft(p, {r2.real(), r2.real()}, r2);
    if (!(est.bit == 0 || est.bit == 1)) budget_ok = false;
    if (!(est.posted.p <= est.posted.q)) budget_ok = false;
    if (!(est.posted.p == p || est.posted.q == p)) budget_ok = false;
  }
  add(rep, "estimator posts a valid two-price pair", budget_ok,
      "p_hat <= q_hat and one side equals p");

  Rng r3(split_seed(kVerifySeed, 32));
  bool edge_ok = true;
  for (int i = 0; i < 1000; ++i) {
    auto e0 = estimate_gft(0.0, {0.3, 0.9}, r3);
    if (e0.bit != 0 || e0.posted.p != 0.0) edge_ok = false;
    auto e1 = estimate_gft(1.0, {0.3, 0.9}, r3);
    if (e1.posted.q != 1.0) edge_ok = false;
  }
  add(rep, "degenerate prices use branch probability", edge_ok,
      "p=0 tails only, p=1 heads only");

  Rng r4(split_seed(kVerifySeed, 33));
  double heads = 0.0;
  const double p = 0.3;
  for (int i = 0; i < 100000; ++i)
    if (estimate_gft(p, {0.5, 0.5}, r4).posted.q == p) heads += 1.0;
  heads /= 100000.0;
  add(rep, "estimator branch frequency matches the coin",
      std::abs(heads - p) <= 0.005, "heads=" + num(heads));
}

void learners_suite(VerifyReport& rep) {
  {
    HedgeState st = hedge_make({4, 0.1});
    Rng rng(split_seed(kVerifySeed, 40));
    std::array<int, 4> counts{};
    for (int i = 0; i < 10000; ++i)
      ++counts[static_cast<size_t>(hedge_step(st, rng))];
    bool ok = true;
    for (int c : counts)
      if (std::abs(c / 10000.0 - 0.25) > 0.01) ok = false;
    add(rep, "hedge uniform at initialization", ok,
        "freqs=" + num(counts[0] / 1e4) + "," + num(counts[1] / 1e4) + "," +
            num(counts[2] / 1e4) + "," + num(counts[3] / 1e4));
  }

  {
    HedgeState st = hedge_make({4, 0.1});
    st.log_weights[2] = 20.0;
    Rng rng(split_seed(kVerifySeed, 41));
    int hits = 0;
    for (int i = 0; i < 10000; ++i)
      if (hedge_step(st, rng) == 2) ++hits;
    add(rep, "hedge saturates on a dominant weight", hits >= 9990,
        "freq=" + num(hits / 1e4));
  }

  {
    HedgeState st = hedge_make({5, 0.0});
    for (int r = 0; r < 100; ++r)
      hedge_update(st, {1.0, 0.0, 0.5, 0.25, 0.75});
    auto pi = hedge_distribution(st);
    bool ok = true;
    for (double x : pi)
      if (std::abs(x - 0.2) > 1e-15) ok = false;
    add(rep, "hedge with zero learning rate stays uniform", ok,
        "pi[0]=" + num(pi[0]));
  }

  {
    HedgeState st = hedge_make({3, 0.7});
    auto before = hedge_distribution(st);
    hedge_update(st, {0.4, 0.4, 0.4});
    auto after = hedge_distribution(st);
    bool ok = true;
    for (size_t i = 0; i < 3; ++i)
      if (std::abs(before[i] - after[i]) > 1e-15) ok = false;
    add(rep, "hedge distribution is shift invariant", ok,
        "equal rewards leave pi unchanged");
  }

  {
    HedgeState st = hedge_make({2, std::log(2.0)});
    hedge_update(st, {1.0, 0.0});
    auto pi = hedge_distribution(st);
    bool ok = std::abs(pi[0] - 2.0 / 3.0) <= 1e-12 &&
              std::abs(pi[1] - 1.0 / 3.0) <= 1e-12;
    add(rep, "hedge one-hot update with eta=ln2", ok,
        "pi=(" + num(pi[0]) + "," + num(pi[1]) + ")");
  }

  {
    HedgeState st = hedge_make({6, 0.3});
    double before = hedge_distribution(st)[3];
    std::vector<double> r(6, 0.0);
    r[3] = 1.0;
    hedge_update(st, r);
    double after = hedge_distribution(st)[3];
    add(rep, "hedge weight monotonicity", after > before,
        num(before) + " -> " + num(after));
    bool rejected = throws_invalid([&] { hedge_update(st, {1.0, 2.0}); });
    add(rep, "hedge rejects rewards outside [0,1]", rejected, "throws");
  }

  {
    bool rejected = throws_invalid([] {
      blind_exp3_make({10, 0.1, 0.1});  // 2*eta*K/gamma = 20 > 1
    });
    add(rep, "blind-exp3 enforces the tuning constraint", rejected,
        "2*eta*K/gamma > 1 throws");
  }

  {
    auto params = BlindExp3Params::defaults(100000);
    BlindExp3State st = blind_exp3_make(params);
    Rng lrn(split_seed(kVerifySeed, 42));
    Rng est(split_seed(kVerifySeed, 43));
    Rng adv(split_seed(kVerifySeed, 44));
    AdversarySpec uni = AdversarySpec::uniform01();
    std::int64_t explored = 0;
    double max_increment = 0.0;
    auto prev = st.log_weights;
    for (int t = 0; t < 100000; ++t) {
      ValuationPair v = sample(uni, adv, t);
      StepOutcome out = blind_exp3_step(st, v, lrn, est);
      if (out.action.mode == ActionMode::Explore) {
        ++explored;
        size_t i = static_cast<size_t>(out.action.grid_index);
        max_increment = std::max(max_increment, st.log_weights[i] - prev[i]);
        prev[i] = st.log_weights[i];
      }
    }
    double freq = static_cast<double>(explored) / 100000.0;
    add(rep, "blind-exp3 exploration frequency",
        std::abs(freq - params.gamma) <= 0.005,
        "freq=" + num(freq) + " gamma=" + num(params.gamma));
    double cap = params.eta * params.k / params.gamma;
    add(rep, "blind-exp3 importance weights bounded", max_increment <= cap + 1e-12,
        "max eta*r_hat=" + num(max_increment) + " cap=" + num(cap));
  }

  {
    // gamma = 1: every round explores; the per-round mean of r_hat(i) is an
    // unbiased estimate of the single-price gain at g_i.
    const int k = 4;
    BlindExp3State st = blind_exp3_make({k, 1.0, 1e-6});
    Rng lrn(split_seed(kVerifySeed, 45));
    Rng est(split_seed(kVerifySeed, 46));
    ValuationPair v{0.25, 0.75};
    std::vector<double> sums(static_cast<size_t>(k), 0.0);
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
      auto before = st.log_weights;
      StepOutcome out = blind_exp3_step(st, v, lrn, est);
      size_t i = static_cast<size_t>(out.action.grid_index);
      sums[i] += (st.log_weights[i] - before[i]) / 1e-6;  // r_hat
    }
    double worst = 0.0;
    for (int i = 0; i < k; ++i)
      worst = std::max(worst,
                       std::abs(sums[static_cast<size_t>(i)] / n -
                                gft_single(st.grid.points[static_cast<size_t>(i)], v)));
    add(rep, "blind-exp3 estimates are conditionally unbiased", worst <= 0.01,
        "max |mean r_hat - gft|=" + num(worst));
  }

  {
    Exp3BanditState st = exp3_bandit_make({1, 0.0, 0.0});
    Rng rng(split_seed(kVerifySeed, 47));
    Rng adv(split_seed(kVerifySeed, 48));
    AdversarySpec uni = AdversarySpec::uniform01();
    double payoff = 0.0, benchmark = 0.0;
    for (int t = 0; t < 1000; ++t) {
      ValuationPair v = sample(uni, adv, t);
      StepOutcome out = exp3_bandit_step(st, v, rng);
      payoff += out.payoff;
      benchmark += gft_single(1.0, v);
      if (out.action.pp.p != 1.0) payoff = -1e9;
    }
    add(rep, "bandit baseline with a single arm has zero grid regret",
        payoff == benchmark, "diff=" + num(benchmark - payoff));
  }

  {
    double hb = theoretical_bound(LearnerKind::Hedge, 50000, 223, 0, 0,
                                  1.0 / 9.0);
    bool ok_h = std::abs(hb - 3057.8575793220134) <= 1e-9;
    auto bp = BlindExp3Params::defaults(10000);
    bool ok_b = bp.k == 10 &&
                std::abs(bp.gamma - 0.2096163848621891) <= 1e-12 &&
                std::abs(bp.eta - 0.0021969514401346682) <= 1e-15;
    double cb = blind_exp3_coarse_bound(100000, 1.0 / 9.0);
    bool ok_c = std::abs(cb - 139314.84572860438) <= 1e-6;
    add(rep, "bound evaluators match frozen values", ok_h && ok_b && ok_c,
        "hedge=" + num(hb) + " coarse=" + num(cb));
  }
}

void mat_suite(VerifyReport& rep) {
  {
    double worst = 0.0;
    for (int big_k = 1; big_k <= 16; ++big_k)
      for (int scenario = 0; scenario <= big_k; ++scenario) {
        MatInstance inst = MatInstance::make(big_k, scenario);
        for (int i = 1; i <= 2 * big_k; ++i) {
          double closed = expected_mat_reward(inst, i);
          double direct;
          if (i <= big_k) {
            direct = 0.0;
          } else {
            int j = i - big_k;
            double p1 = (scenario >= 1 && j == scenario)
                            ? 0.5 + inst.c_prob * inst.eps
                            : 0.5;
            RewardVector y1, y0;
            y1.bits.assign(static_cast<size_t>(2 * big_k), 0);
            y0 = y1;
            y1.bits[static_cast<size_t>(j - 1)] = 1;
            direct = p1 * mat_reward(i, y1, inst) +
                     (1.0 - p1) * mat_reward(i, y0, inst);
          }
          worst = std::max(worst, std::abs(closed - direct));
          if (i > big_k && i - big_k == scenario)
            worst = std::max(
                worst, std::abs(closed - (inst.c_plat +
                                          inst.c_spike * inst.eps)));
          if (i > big_k && i - big_k != scenario)
            worst = std::max(worst, std::abs(closed - inst.c_plat));
        }
      }
    add(rep, "expected reward table exhaustive for K<=16", worst <= 1e-12,
        "max diff=" + num(worst));
  }

  {
    Rng rng(split_seed(kVerifySeed, 50));
    AdversarySpec base = AdversarySpec::base_f();
    double worst_mix = 0.0;
    double min_mu = 1e9;
    bool failed = false;
    for (int i = 0; i < 100; ++i) {
      auto pert = random_pert(rng);
      AdversarySpec pspec = AdversarySpec::perturbed_f(pert);
      double px = rng.real(pert.v - pert.eps, pert.v + pert.eps);
      double qy = rng.real(2.0 / 3.0, 5.0 / 6.0);
      auto fb0 = feedback_probs(base, {px, qy});
      auto fbk = feedback_probs(pspec, {px, qy});
      double p0 = 0.5, pk = 0.5 + c_prob_const() * pert.eps;
      try {
        auto dec = decompose_feedback(fb0, fbk, p0, pk);
        for (size_t c = 0; c < 4; ++c) {
          min_mu = std::min({min_mu, dec.mu0[c], dec.mu1[c]});
          double m0 = (1.0 - p0) * dec.mu0[c] + p0 * dec.mu1[c];
          double mk = (1.0 - pk) * dec.mu0[c] + pk * dec.mu1[c];
          worst_mix = std::max({worst_mix, std::abs(m0 - fb0[c]),
                                std::abs(mk - fbk[c])});
        }
      } catch (const std::exception&) {
        failed = true;
      }
    }
    add(rep, "feedback decomposition round-trips", !failed && worst_mix <= 1e-12,
        "max remix error=" + num(worst_mix) + " min mu=" + num(min_mu));
  }

  {
    bool infeasible_detected = false;
    try {
      decompose_feedback({0.9, 0.1, 0.0, 0.0}, {0.0, 0.0, 0.1, 0.9}, 0.4,
                         0.41);
    } catch (const std::domain_error&) {
      infeasible_detected = true;
    }
    add(rep, "infeasible decomposition reports an error", infeasible_detected,
        "negative mixture component throws");
  }

  {
    // one-bit simulation reproduces both feedback laws
    auto pert = PerturbationParams{17.0 / 48.0, 1.0 / 48.0};
    AdversarySpec base = AdversarySpec::base_f();
    AdversarySpec pspec = AdversarySpec::perturbed_f(pert);
    PricePair pp{pert.v - 0.5 * pert.eps, 19.0 / 24.0};
    auto fb0 = feedback_probs(base, pp);
    auto fbk = feedback_probs(pspec, pp);
    double p0 = 0.5, pk = 0.5 + c_prob_const() * pert.eps;
    auto dec = decompose_feedback(fb0, fbk, p0, pk);
    Rng rng(split_seed(kVerifySeed, 51));
    std::array<double, 4> emp{};
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      int y = rng.bernoulli(pk) ? 1 : 0;
      ++emp[static_cast<size_t>(simulate_feedback(dec, y, rng.real()))];
    }
    double worst = 0.0;
    for (size_t c = 0; c < 4; ++c)
      worst = std::max(worst, std::abs(emp[c] / n - fbk[c]));
    add(rep, "simulated one-bit feedback matches the target law",
        worst <= 0.01, "max |emp-target|=" + num(worst));
  }

  {
    bool ok = true;
    std::string detail;
    for (std::int64_t t : {std::int64_t(8008), std::int64_t(10000),
                           std::int64_t(100000), std::int64_t(1000000)}) {
      bool r = check_useful_inequality(t);
      ok = ok && r;
      detail += std::to_string(t) + (r ? ":ok " : ":FAIL ");
    }
    ok = ok && throws_invalid([] { check_useful_inequality(8007); });
    ok = ok && bernoulli_kl(0.5, 0.5) == 0.0;
    add(rep, "KL inequality for the biased bit", ok, detail);
  }

  {
    bool ok = true;
    for (int big_k : {1, 4, 7, 64}) {
      MatInstance inst = MatInstance::make(big_k, 0);
      if (inst.strip_edge(0) != 1.0 / 3.0 || inst.strip_edge(big_k) != 0.5)
        ok = false;
      for (int k = 1; k <= big_k; ++k)
        if (!(inst.strip_edge(k - 1) >= 1.0 / 3.0 &&
              inst.strip_edge(k) <= 0.5))
          ok = false;
    }
    add(rep, "spike centers tile the plateau exactly", ok,
        "edge(0)=1/3 and edge(K)=1/2 bitwise");
  }

  {
    bool ok = true;
    for (int big_k : {4, 7}) {
      MatInstance inst = MatInstance::make(big_k, 0);
      Rng rng(split_seed(kVerifySeed, 52));
      for (int it = 0; it < 1000000 && ok; ++it) {
        PricePair pp = random_price_pair(rng);
        int matches = 0, matched = 0;
        for (int k = 1; k <= big_k; ++k) {
          double lo = inst.strip_edge(k - 1), hi = inst.strip_edge(k);
          bool in_x = k == big_k ? (pp.p >= lo && pp.p <= hi)
                                 : (pp.p >= lo && pp.p < hi);
          if (in_x && pp.q >= 2.0 / 3.0 && pp.q <= 5.0 / 6.0) {
            ++matches;
            matched = k;
          }
          if (k <= big_k - 1 && in_x && pp.q < 2.0 / 3.0) {
            ++matches;
            matched = k + big_k;
          }
        }
        int got = iota(pp, inst);
        if (matches > 1) ok = false;
        if (matches == 1 && got != matched) ok = false;
        if (matches == 0 && got != 2 * big_k) ok = false;
      }
    }
    add(rep, "upper-triangle partition covers each point once", ok,
        "1e6 points, K in {4,7}");
  }

  {
    MatInstance inst = MatInstance::make(3, 1);
    Rng rng(split_seed(kVerifySeed, 53));
    MatPolicy oracle_policy{MatPolicyKind::AlwaysCommit, 0};
    auto res = run_mat_episode(inst, oracle_policy, 10000, rng);
    add(rep, "oracle policy has zero regret", res.regret == 0.0,
        "regret=" + num(res.regret));

    MatPolicy explorer{MatPolicyKind::UniformExplore, 0};
    auto res2 = run_mat_episode(inst, explorer, 10000, rng);
    double expect = 10000.0 * (inst.c_plat + inst.c_spike * inst.eps);
    add(rep, "pure exploration pays the full gap",
        std::abs(res2.regret - expect) <= 1e-12,
        "regret=" + num(res2.regret) + " expected=" + num(expect));

    std::int64_t total = 0;
    for (auto x : res2.counters.n) total += x;
    for (auto x : res2.counters.m) total += x;
    add(rep, "play counters account for every round", total == 10000,
        "sum=" + std::to_string(total));

    RewardVector y = sample_reward_vector(inst, rng);
    bool fb_ok = mat_feedback(1, y).has_value() &&
                 !mat_feedback(inst.big_k + 1, y).has_value() &&
                 y.bits[3] == 0 && y.bits[4] == 0 && y.bits[5] == 0;
    add(rep, "exploring arms reveal bits, exploiting arms stay silent", fb_ok,
        "top bits are zero");
  }

  {
    // counter-shift inequality for explore-then-commit
    const int big_k = 8;
    const std::int64_t horizon = 100000;
    const int seeds = 200;
    MatPolicy etc{MatPolicyKind::ExploreThenCommit, 512};
    std::vector<std::vector<double>> m_mean(
        static_cast<size_t>(big_k + 1),
        std::vector<double>(static_cast<size_t>(big_k), 0.0));
    std::vector<std::vector<double>> m_var(m_mean);
    std::vector<double> n_mean(static_cast<size_t>(big_k), 0.0);
    for (int scenario = 0; scenario <= big_k; ++scenario) {
      MatInstance inst = MatInstance::make(big_k, scenario);
      std::vector<std::vector<double>> samples(
          static_cast<size_t>(big_k), std::vector<double>());
      for (int s = 0; s < seeds; ++s) {
        Rng rng(split_seed(kVerifySeed,
                           540 + static_cast<std::uint64_t>(scenario * 1000 + s)));
        auto res = run_mat_episode(inst, etc, horizon, rng);
        for (int k = 1; k <= big_k; ++k) {
          samples[static_cast<size_t>(k - 1)].push_back(
              static_cast<double>(res.counters.m[static_cast<size_t>(k - 1)]));
          if (scenario == 0)
            n_mean[static_cast<size_t>(k - 1)] +=
                static_cast<double>(res.counters.n[static_cast<size_t>(k - 1)]) /
                seeds;
        }
      }
      for (int k = 1; k <= big_k; ++k) {
        const auto& xs = samples[static_cast<size_t>(k - 1)];
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= (xs.size() - 1);
        m_mean[static_cast<size_t>(scenario)][static_cast<size_t>(k - 1)] = mean;
        m_var[static_cast<size_t>(scenario)][static_cast<size_t>(k - 1)] = var;
      }
    }
    MatInstance inst0 = MatInstance::make(big_k, 0);
    bool ok = true;
    double worst_slack = 1e18;
    for (int k = 1; k <= big_k; ++k) {
      double lhs = std::abs(m_mean[static_cast<size_t>(k)][static_cast<size_t>(k - 1)] -
                            m_mean[0][static_cast<size_t>(k - 1)]);
      double se = std::sqrt(m_var[static_cast<size_t>(k)][static_cast<size_t>(k - 1)] /
                                seeds +
                            m_var[0][static_cast<size_t>(k - 1)] / seeds);
      double bound = inst0.c_prob * inst0.eps * static_cast<double>(horizon) *
                         std::sqrt(2.0 * n_mean[static_cast<size_t>(k - 1)]) +
                     3.0 * se;
      if (lhs > bound) ok = false;
      worst_slack = std::min(worst_slack, bound - lhs);
    }
    add(rep, "commit-count shift bounded by exploration", ok,
        "min slack=" + num(worst_slack));
  }
}

void harness_suite(VerifyReport& rep) {
  {
    RunConfig cfg;
    cfg.adversary = AdversarySpec::base_f();
    cfg.learner.alg = LearnerKind::Hedge;
    cfg.feedback = ChannelKind::Full;
    cfg.horizon = 2000;
    auto a = run_episode(cfg, 99);
    auto b = run_episode(cfg, 99);
    bool same = a.regret == b.regret && a.cum_payoff == b.cum_payoff &&
                a.rounds.size() == b.rounds.size();
    for (size_t i = 0; same && i < a.rounds.size(); ++i)
      same = a.rounds[i].p == b.rounds[i].p &&
             a.rounds[i].s == b.rounds[i].s &&
             a.rounds[i].cum_regret == b.rounds[i].cum_regret;
    add(rep, "identical config and seed reproduce bit-identical runs", same,
        "T=2000");
    bool identity =
        !a.rounds.empty() &&
        a.rounds.back().cum_regret == a.regret &&
        a.regret == a.oracle_value - a.cum_payoff;
    add(rep, "regret accounting identity", identity,
        "regret=" + num(a.regret));
  }

  {
    RunConfig cfg;
    cfg.adversary = AdversarySpec::uniform01();
    cfg.learner.alg = LearnerKind::Hedge;
    cfg.horizon = 20000;
    cfg.oracle = OracleMode::GridHindsight;
    cfg.record_trajectory = false;
    int res = 10 * static_cast<int>(ceil_root(cfg.horizon, 2));
    double closed = 0.125 * static_cast<double>(cfg.horizon);
    const int seeds = 10;
    double mean_h = 0.0;
    std::vector<double> hs;
    for (int s = 0; s < seeds; ++s) {
      auto rec = run_episode(cfg, split_seed(kVerifySeed, 60 + static_cast<std::uint64_t>(s)));
      hs.push_back(rec.oracle_value);
      mean_h += rec.oracle_value / seeds;
    }
    double var = 0.0;
    for (double h : hs) var += (h - mean_h) * (h - mean_h);
    double se = std::sqrt(var / (seeds - 1) / seeds);
    double disc = static_cast<double>(cfg.horizon) / res;  // sigma = 1
    double max_dev = std::sqrt(static_cast<double>(cfg.horizon) *
                               std::log(static_cast<double>(res)) / 2.0);
    bool ok = mean_h >= closed - disc - 3.0 * se &&
              mean_h <= closed + max_dev + 3.0 * se;
    add(rep, "hindsight oracle brackets the closed form", ok,
        "mean=" + num(mean_h) + " closed=" + num(closed) +
            " disc=" + num(disc) + " dev_cap=" + num(max_dev));
  }

  {
    PiecewiseDensity pd;
    pd.smoothness_sigma = 0.01;
    pd.pieces = {{{0.9, 1.0, 0.0, 0.1}, PieceKind::Constant, 100.0}};
    RunConfig cfg;
    cfg.adversary = AdversarySpec::custom(pd);
    cfg.learner.alg = LearnerKind::Hedge;
    cfg.horizon = 2000;
    cfg.oracle = OracleMode::GridHindsight;
    auto rec = run_episode(cfg, 7);
    add(rep, "untradeable adversary yields zero oracle and zero regret",
        rec.oracle_value == 0.0 && rec.regret == 0.0,
        "oracle=" + num(rec.oracle_value) + " regret=" + num(rec.regret));

    RunConfig sw = cfg;
    sw.record_trajectory = false;
    auto res = sweep(sw, {1000, 2000}, 3, kVerifySeed, 1);
    add(rep, "sweep flags degenerate zero-regret fits", res.degenerate,
        "mean[0]=" + num(res.points[0].mean_regret));
  }

  {
    RunConfig cfg;
    cfg.adversary = AdversarySpec::base_f();
    cfg.horizon = 100000;
    cfg.record_trajectory = false;
    RunConfig blind = cfg;
    blind.learner.alg = LearnerKind::BlindExp3;
    blind.feedback = ChannelKind::OneBit;
    RunConfig bandit = cfg;
    bandit.learner.alg = LearnerKind::Exp3Bandit;
    bandit.feedback = ChannelKind::Bandit;
    int wins = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
      std::uint64_t seed = split_seed(kVerifySeed, 70 + static_cast<std::uint64_t>(s));
      double rb = run_episode(blind, seed).regret;
      double rx = run_episode(bandit, seed).regret;
      if (rx <= rb) ++wins;
    }
    double frac = static_cast<double>(wins) / seeds;
    add(rep, "bandit feedback beats one-bit feedback on most paired seeds",
        frac >= 0.7, "fraction=" + num(frac) + " threshold=0.7");
  }

  {
    RunConfig cfg;
    cfg.adversary = AdversarySpec::uniform01();
    cfg.learner.alg = LearnerKind::Hedge;
    cfg.learner.k = 100;
    cfg.horizon = 10000;
    bool ok = true;
    double worst = -1e18;
    for (int s = 0; s < 3; ++s) {
      auto rec = run_episode(cfg, split_seed(kVerifySeed, 80 + static_cast<std::uint64_t>(s)));
      double bound = theoretical_bound(LearnerKind::Hedge, 10000, 100, 0, 0, 1.0);
      worst = std::max(worst, rec.regret - bound);
      if (rec.regret > bound) ok = false;
    }
    add(rep, "hedge regret within its bound on the uniform adversary", ok,
        "max regret-bound=" + num(worst));
  }

  {
    RunConfig cfg;
    cfg.adversary = AdversarySpec::uniform01();
    cfg.learner.alg = LearnerKind::Hedge;
    cfg.horizon = 50;
    auto rec = run_episode(cfg, 5);
    auto back = run_record_from_json_string(run_record_json(rec));
    bool ok = back.regret == rec.regret &&
              back.oracle_value == rec.oracle_value &&
              back.rounds.size() == rec.rounds.size();
    double recompute = 0.0;
    for (const auto& r : back.rounds) recompute += r.payoff;
    ok = ok && recompute == back.cum_payoff &&
         back.oracle_value - back.cum_payoff == back.regret;
    add(rep, "serialized records parse back exactly", ok,
        "17-digit round trip");
  }
}

}  // namespace

bool VerifyReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> verify_suite_names() {
  return {"core", "adversaries", "estimator", "learners", "mat", "harness",
          "all"};
}

VerifyReport verify_suite(const std::string& suite) {
  VerifyReport rep;
  rep.suite = suite;
  bool known = false;
  auto want = [&](const char* name) {
    bool w = suite == name || suite == "all";
    known = known || suite == name;
    return w;
  };
  if (want("core")) core_suite(rep);
  if (want("adversaries")) adversaries_suite(rep);
  if (want("estimator")) estimator_suite(rep);
  if (want("learners")) learners_suite(rep);
  if (want("mat")) mat_suite(rep);
  if (want("harness")) harness_suite(rep);
  if (!known && suite != "all")
    throw std::invalid_argument("unknown verify suite: " + suite);
  return rep;
}

}  // namespace trade
