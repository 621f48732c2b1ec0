#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace trade {

// A seller/buyer valuation pair. No ordering between s and b is required.
struct ValuationPair {
  double s = 0.0;
  double b = 0.0;
};

// A posted price pair restricted to the upper triangle p <= q.
struct PricePair {
  double p = 0.0;
  double q = 0.0;
};

enum class GftDefinition { SurplusSplit, FullSurplus };

inline void check_valid(const ValuationPair& v) {
  if (!(v.s >= 0.0 && v.s <= 1.0) || !(v.b >= 0.0 && v.b <= 1.0))
    throw std::invalid_argument("valuation pair outside [0,1]^2");
}

inline void check_valid(const PricePair& pp) {
  if (!(pp.p >= 0.0 && pp.p <= pp.q && pp.q <= 1.0))
    throw std::invalid_argument("price pair must satisfy 0 <= p <= q <= 1");
}

// Gain from trade. Trade happens iff s <= p <= q <= b (non-strict on every
// boundary). The default definition (b-q)+(p-s) equals (b-s)-(q-p); the
// FullSurplus variant drops the spread penalty and pays b-s.
inline double gft(const PricePair& pp, const ValuationPair& v,
                  GftDefinition d = GftDefinition::SurplusSplit) {
  check_valid(pp);
  check_valid(v);
  if (!(v.s <= pp.p && pp.q <= v.b)) return 0.0;
  if (d == GftDefinition::FullSurplus) return v.b - v.s;
  return (v.b - pp.q) + (pp.p - v.s);
}

inline double gft_single(double p, const ValuationPair& v,
                         GftDefinition d = GftDefinition::SurplusSplit) {
  return gft(PricePair{p, p}, v, d);
}

// The uniform grid {1/k, 2/k, ..., 1}; its mesh (distance from any point of
// [0,1] to the grid, maximized) is 1/k.
struct PriceGrid {
  int k = 0;
  std::vector<double> points;
  double mesh() const { return 1.0 / static_cast<double>(k); }
};

inline PriceGrid uniform_grid(int k) {
  if (k < 2) throw std::invalid_argument("uniform_grid requires k >= 2");
  PriceGrid g;
  g.k = k;
  g.points.resize(static_cast<size_t>(k));
  for (int i = 1; i <= k; ++i)
    g.points[static_cast<size_t>(i - 1)] = static_cast<double>(i) / k;
  return g;
}

// Deterministic RNG used everywhere. Doubles are produced from the top 53
// bits of the mt19937_64 output so that streams are reproducible and do not
// depend on library-specific distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0,1).
  double real() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double real(double lo, double hi) { return lo + (hi - lo) * real(); }

  bool bernoulli(double p) { return real() < p; }

  // Uniform index in {0, ..., n-1}.
  std::int64_t index(std::int64_t n) {
    auto i = static_cast<std::int64_t>(real() * static_cast<double>(n));
    return i >= n ? n - 1 : i;
  }

  // Sample from a probability vector by walking the cumulative sum.
  int categorical(const std::vector<double>& probs) {
    double u = real();
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a substream seed so each episode owns disjoint adversary, learner
// and estimator streams.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ (0xd1342543de82ef95ULL * (stream + 1)));
}

// Integer roots with explicit correction loops; std::pow alone can land one
// off at exact powers.
inline std::int64_t floor_root(std::int64_t n, int degree) {
  if (n < 0) throw std::invalid_argument("negative radicand");
  auto pw = [degree](std::int64_t r) {
    double acc = 1.0;
    for (int i = 0; i < degree; ++i) acc *= static_cast<double>(r);
    return acc;
  };
  auto r = static_cast<std::int64_t>(
      std::floor(std::pow(static_cast<double>(n), 1.0 / degree)));
  while (r > 0 && pw(r) > static_cast<double>(n)) --r;
  while (pw(r + 1) <= static_cast<double>(n)) ++r;
  return r;
}

inline std::int64_t ceil_root(std::int64_t n, int degree) {
  std::int64_t r = floor_root(n, degree);
  double acc = 1.0;
  for (int i = 0; i < degree; ++i) acc *= static_cast<double>(r);
  return acc == static_cast<double>(n) ? r : r + 1;
}

}  // namespace trade
