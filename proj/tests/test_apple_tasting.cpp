#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <trade/adversary.hpp>
#include <trade/apple_tasting.hpp>

#include <cmath>
#include <stdexcept>

using namespace trade;

TEST_CASE("instance construction and validation") {
  auto inst = MatInstance::make(8, 3);
  CHECK(inst.big_k == 8);
  CHECK(inst.eps == 1.0 / 96);
  CHECK(inst.scenario == 3);
  CHECK(inst.a == kA);
  CHECK(inst.c_prob == c_prob_const());
  CHECK(inst.c_plat == c_plat_const());
  CHECK(inst.c_spike == c_spike_const());
  CHECK_THROWS_AS(MatInstance::make(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(MatInstance::make(4, 5), std::invalid_argument);
  CHECK_THROWS_AS(MatInstance::make(4, -1), std::invalid_argument);
}

TEST_CASE("strip edges are exact at both ends") {
  for (int k : {1, 2, 3, 4, 7, 16, 64}) {
    auto inst = MatInstance::make(k, 0);
    CHECK(inst.strip_edge(0) == 1.0 / 3.0);
    CHECK(inst.strip_edge(k) == 0.5);
    for (int j = 1; j <= k; ++j)
      CHECK(inst.strip_edge(j) > inst.strip_edge(j - 1));
  }
}

TEST_CASE("strip centers tile the plateau edge exactly") {
  for (int k = 2; k <= 64; ++k) {
    auto inst = MatInstance::make(k, 0);
    CHECK(inst.v_center(1) - inst.eps == 1.0 / 3.0);
    CHECK(inst.v_center(k) + inst.eps == 0.5);
    for (int j = 2; j < k; ++j)
      CHECK(inst.v_center(j) ==
            (4.0 * k + 2.0 * j - 1.0) / (12.0 * k));
    for (int j = 1; j < k; ++j) CHECK(inst.v_center(j) < inst.v_center(j + 1));
  }
  auto one = MatInstance::make(1, 0);
  CHECK(one.v_center(1) - one.eps == 1.0 / 3.0);
  CHECK_THROWS_AS(one.v_center(2), std::out_of_range);
  CHECK_THROWS_AS(one.v_center(0), std::out_of_range);
}

TEST_CASE("centers sit inside their strips") {
  for (int k : {2, 5, 12}) {
    auto inst = MatInstance::make(k, 0);
    for (int j = 1; j <= k; ++j) {
      CHECK(inst.v_center(j) - inst.eps >= inst.strip_edge(j - 1) - 1e-12);
      CHECK(inst.v_center(j) + inst.eps <= inst.strip_edge(j) + 1e-12);
    }
  }
}

TEST_CASE("reward vector bit frequencies") {
  Rng rng(71);
  auto fair = MatInstance::make(10, 0);
  const int n = 100000;
  std::vector<int> ones(21, 0);
  for (int i = 0; i < n; ++i) {
    auto y = sample_reward_vector(fair, rng);
    REQUIRE(y.bits.size() == 20);
    for (int j = 1; j <= 10; ++j) ones[static_cast<size_t>(j)] += y.bit(j);
    for (int j = 11; j <= 20; ++j) REQUIRE(y.bit(j) == 0);
  }
  for (int j = 1; j <= 10; ++j)
    CHECK(ones[static_cast<size_t>(j)] / double(n) ==
          doctest::Approx(0.5).epsilon(0.015));
}

TEST_CASE("scenario biases exactly one bit") {
  Rng rng(72);
  auto inst = MatInstance::make(10, 3);
  const int n = 100000;
  std::vector<int> ones(11, 0);
  for (int i = 0; i < n; ++i) {
    auto y = sample_reward_vector(inst, rng);
    for (int j = 1; j <= 10; ++j) ones[static_cast<size_t>(j)] += y.bit(j);
  }
  CHECK(ones[3] / double(n) ==
        doctest::Approx(0.5059723097678225).epsilon(0.01));
  for (int j = 1; j <= 10; ++j) {
    if (j == 3) continue;
    CHECK(ones[static_cast<size_t>(j)] / double(n) ==
          doctest::Approx(0.5).epsilon(0.015));
  }
}

TEST_CASE("rewards of exploring actions are zero") {
  auto inst = MatInstance::make(4, 1);
  RewardVector y{{1, 0, 1, 1, 0, 0, 0, 0}};
  for (int i = 1; i <= 4; ++i) CHECK(mat_reward(i, y, inst) == 0.0);
}

TEST_CASE("rewards of exploiting actions follow their bit") {
  auto inst = MatInstance::make(4, 1);
  RewardVector up{{1, 0, 0, 0, 0, 0, 0, 0}};
  CHECK(mat_reward(5, up, inst) ==
        doctest::Approx(0.05591733740928229).epsilon(1e-14));
  RewardVector down{{0, 0, 0, 0, 0, 0, 0, 0}};
  double lo = inst.c_plat - inst.c_spike / (2.0 * inst.c_prob);
  CHECK(mat_reward(5, down, inst) == doctest::Approx(lo).epsilon(1e-14));
  CHECK(mat_reward(5, up, inst) + mat_reward(5, down, inst) ==
        doctest::Approx(2.0 * inst.c_plat).epsilon(1e-13));
  CHECK_THROWS_AS(mat_reward(0, up, inst), std::out_of_range);
  CHECK_THROWS_AS(mat_reward(9, up, inst), std::out_of_range);
}

TEST_CASE("expected rewards peak at the scenario arm") {
  for (int k : {1, 4, 16}) {
    for (int sc = 0; sc <= k; ++sc) {
      auto inst = MatInstance::make(k, sc);
      for (int i = 1; i <= k; ++i) CHECK(expected_mat_reward(inst, i) == 0.0);
      for (int i = k + 1; i <= 2 * k; ++i) {
        double r = expected_mat_reward(inst, i);
        if (sc >= 1 && i == k + sc)
          CHECK(r == doctest::Approx(inst.c_plat + inst.c_spike * inst.eps)
                         .epsilon(1e-13));
        else
          CHECK(r == doctest::Approx(inst.c_plat).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("expected reward matches the empirical mean") {
  Rng rng(73);
  auto inst = MatInstance::make(4, 2);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += mat_reward(6, sample_reward_vector(inst, rng), inst);
  CHECK(sum / n ==
        doctest::Approx(expected_mat_reward(inst, 6)).epsilon(0.01));
}

TEST_CASE("feedback reveals exploring bits and hides exploiting ones") {
  RewardVector y{{1, 0, 1, 0, 0, 0, 0, 0}};
  CHECK(mat_feedback(1, y).value() == 1);
  CHECK(mat_feedback(2, y).value() == 0);
  CHECK(mat_feedback(4, y).value() == 0);
  CHECK_FALSE(mat_feedback(5, y).has_value());
  CHECK_FALSE(mat_feedback(8, y).has_value());
}

TEST_CASE("iota classifies posted pairs") {
  auto inst = MatInstance::make(4, 0);
  CHECK(iota(PricePair{0.34, 0.70}, inst) == 1);
  CHECK(iota(PricePair{0.34, 0.50}, inst) == 5);
  CHECK(iota(PricePair{0.90, 0.95}, inst) == 8);
  // strip K has no diagonal companion; low q maps to the catch-all
  CHECK(iota(PricePair{0.49, 0.50}, inst) == 8);
  // above the exploring band
  CHECK(iota(PricePair{0.34, 0.90}, inst) == 8);
  // left of the strips
  CHECK(iota(PricePair{0.30, 0.70}, inst) == 8);
  // edges: p = 1/2 belongs to strip K, q = 5/6 is included
  CHECK(iota(PricePair{0.5, 0.70}, inst) == 4);
  CHECK(iota(PricePair{0.34, 5.0 / 6}, inst) == 1);
}

TEST_CASE("iota agrees with brute-force region membership") {
  for (int k : {4, 7}) {
    auto inst = MatInstance::make(k, 0);
    Rng rng(74);
    for (int i = 0; i < 100000; ++i) {
      PricePair pp;
      pp.p = rng.real();
      pp.q = rng.real(pp.p, 1.0);
      int got = iota(pp, inst);
      int want = 2 * k;
      if (pp.p >= inst.strip_edge(0) &&
          (pp.p < inst.strip_edge(k) || pp.p == 0.5)) {
        int s = k;
        for (int j = 1; j <= k; ++j)
          if (pp.p >= inst.strip_edge(j - 1) && pp.p < inst.strip_edge(j)) {
            s = j;
            break;
          }
        if (pp.q >= 2.0 / 3 && pp.q <= 5.0 / 6)
          want = s;
        else if (pp.q < 2.0 / 3 && s <= k - 1)
          want = s + k;
      }
      REQUIRE(got == want);
    }
  }
}

TEST_CASE("decomposition round-trips the two laws") {
  std::array<double, 4> p0_fb{0.1, 0.2, 0.3, 0.4};
  std::array<double, 4> pk_fb{0.12, 0.18, 0.32, 0.38};
  double p0 = 0.5, pk = 0.6;
  auto dec = decompose_feedback(p0_fb, pk_fb, p0, pk);
  for (int j = 0; j < 4; ++j) {
    CHECK(dec.mu0[static_cast<size_t>(j)] >= -1e-15);
    CHECK(dec.mu1[static_cast<size_t>(j)] >= -1e-15);
    double r0 = (1 - p0) * dec.mu0[static_cast<size_t>(j)] +
                p0 * dec.mu1[static_cast<size_t>(j)];
    double rk = (1 - pk) * dec.mu0[static_cast<size_t>(j)] +
                pk * dec.mu1[static_cast<size_t>(j)];
    CHECK(r0 == doctest::Approx(p0_fb[static_cast<size_t>(j)]).epsilon(1e-12));
    CHECK(rk == doctest::Approx(pk_fb[static_cast<size_t>(j)]).epsilon(1e-12));
  }
}

TEST_CASE("equal coins require equal laws") {
  std::array<double, 4> fb{0.1, 0.2, 0.3, 0.4};
  auto dec = decompose_feedback(fb, fb, 0.5, 0.5);
  for (int j = 0; j < 4; ++j) {
    CHECK(dec.mu0[static_cast<size_t>(j)] ==
          doctest::Approx(fb[static_cast<size_t>(j)]).epsilon(1e-12));
    CHECK(dec.mu1[static_cast<size_t>(j)] ==
          doctest::Approx(fb[static_cast<size_t>(j)]).epsilon(1e-12));
  }
  std::array<double, 4> other{0.4, 0.3, 0.2, 0.1};
  CHECK_THROWS_AS(decompose_feedback(fb, other, 0.5, 0.5),
                  std::invalid_argument);
}

TEST_CASE("infeasible decompositions are rejected") {
  // a law pair that moves faster than the coin allows
  std::array<double, 4> p0_fb{1.0, 0.0, 0.0, 0.0};
  std::array<double, 4> pk_fb{0.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(decompose_feedback(p0_fb, pk_fb, 0.5, 0.51),
                  std::domain_error);
  CHECK_THROWS_AS(
      decompose_feedback(p0_fb, pk_fb, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("simulate_feedback walks the mixture component") {
  FourOutcomeDecomposition dec;
  dec.mu0 = {0.1, 0.2, 0.3, 0.4};
  dec.mu1 = {0.4, 0.3, 0.2, 0.1};
  CHECK(simulate_feedback(dec, 0, 0.05) == 0);
  CHECK(simulate_feedback(dec, 0, 0.15) == 1);
  CHECK(simulate_feedback(dec, 0, 0.95) == 3);
  CHECK(simulate_feedback(dec, 1, 0.05) == 0);
  CHECK(simulate_feedback(dec, 1, 0.45) == 1);
  CHECK(simulate_feedback(dec, 1, 0.99) == 3);
}

TEST_CASE("bernoulli kl basics") {
  CHECK(bernoulli_kl(0.5, 0.5) == 0.0);
  CHECK(bernoulli_kl(0.3, 0.3) == 0.0);
  CHECK(std::isinf(bernoulli_kl(0.5, 0.0)));
  CHECK(std::isinf(bernoulli_kl(0.5, 1.0)));
  CHECK(bernoulli_kl(0.0, 0.3) > 0.0);
  CHECK(std::isfinite(bernoulli_kl(0.0, 0.3)));
  // Pinsker-type lower bound on a grid
  for (double p : {0.1, 0.3, 0.5, 0.7}) {
    for (double q : {0.2, 0.4, 0.6, 0.8}) {
      CHECK(bernoulli_kl(p, q) >= 2.0 * (p - q) * (p - q) - 1e-12);
      CHECK(bernoulli_kl(p, q) >= 0.0);
    }
  }
}

TEST_CASE("the KL stays useful from the smallest admissible horizon") {
  CHECK(check_useful_inequality(8008));
  CHECK(check_useful_inequality(10000));
  CHECK(check_useful_inequality(100000));
  CHECK(check_useful_inequality(1000000));
  CHECK_THROWS_AS(check_useful_inequality(8007), std::invalid_argument);
}

TEST_CASE("committing to the planted arm has zero regret") {
  // AlwaysCommit plays action K+1, the best arm under scenario 1
  auto inst = MatInstance::make(6, 1);
  Rng rng(75);
  MatPolicy pol{MatPolicyKind::AlwaysCommit, 0};
  auto res = run_mat_episode(inst, pol, 10000, rng);
  CHECK(res.regret == 0.0);
  std::int64_t total = 0;
  for (auto c : res.counters.n) total += c;
  for (auto c : res.counters.m) total += c;
  CHECK(total == 10000);
  CHECK(res.counters.m[0] == 10000);
}

TEST_CASE("committing to a plateau arm pays the spike each round") {
  auto inst = MatInstance::make(6, 2);
  Rng rng(78);
  MatPolicy pol{MatPolicyKind::AlwaysCommit, 0};
  const std::int64_t horizon = 10000;
  auto res = run_mat_episode(inst, pol, horizon, rng);
  CHECK(res.regret == doctest::Approx(static_cast<double>(horizon) *
                                      inst.c_spike * inst.eps)
                          .epsilon(1e-12));
}

TEST_CASE("pure exploration pays the full gap") {
  auto inst = MatInstance::make(5, 3);
  Rng rng(76);
  MatPolicy pol{MatPolicyKind::UniformExplore, 0};
  const std::int64_t horizon = 10000;
  auto res = run_mat_episode(inst, pol, horizon, rng);
  double want = static_cast<double>(horizon) *
                (inst.c_plat + inst.c_spike * inst.eps);
  CHECK(res.regret == doctest::Approx(want).epsilon(1e-12));
  std::int64_t explored = 0;
  for (auto c : res.counters.n) explored += c;
  CHECK(explored == horizon);
  for (auto c : res.counters.m) CHECK(c == 0);
}

TEST_CASE("explore-then-commit spends its budget round-robin") {
  auto inst = MatInstance::make(4, 1);
  Rng rng(77);
  MatPolicy pol{MatPolicyKind::ExploreThenCommit, 50};
  auto res = run_mat_episode(inst, pol, 10000, rng);
  for (auto c : res.counters.n) CHECK(c == 50);
  std::int64_t committed = 0;
  for (auto c : res.counters.m) committed += c;
  CHECK(committed == 10000 - 4 * 50);
  CHECK(res.regret >= 0.0);
}

TEST_CASE("episodes are reproducible") {
  auto inst = MatInstance::make(8, 4);
  MatPolicy pol{MatPolicyKind::ExploreThenCommit, 32};
  Rng a(123), b(123);
  auto ra = run_mat_episode(inst, pol, 5000, a);
  auto rb = run_mat_episode(inst, pol, 5000, b);
  CHECK(ra.regret == rb.regret);
  CHECK(ra.counters.n == rb.counters.n);
  CHECK(ra.counters.m == rb.counters.m);
}

TEST_CASE("a generous budget finds the planted arm") {
  auto inst = MatInstance::make(4, 2);
  MatPolicy pol{MatPolicyKind::ExploreThenCommit, 16384};
  int wins = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(static_cast<std::uint64_t>(900 + seed));
    auto res = run_mat_episode(inst, pol, 200000, rng);
    if (res.counters.m[1] == 200000 - 4 * 16384) ++wins;
  }
  CHECK(wins >= 17);
}
