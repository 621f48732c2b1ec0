#pragma once

#include "trade/core.hpp"

namespace trade {

enum class FeedbackKind { Full, TwoBit, OneBit };

// What the learner gets to see after posting (p, q) against (s, b). Full
// reveals the valuations, TwoBit the two acceptance indicators, OneBit only
// whether the trade happened. Derivable fields are filled in so callers can
// read `traded` under any kind without recomputing.
struct Feedback {
  FeedbackKind kind;
  ValuationPair valuations{0.0, 0.0};  // meaningful for Full only
  int seller_accepts = 0;              // 1{s <= p}
  int buyer_accepts = 0;               // 1{q <= b}
  int traded = 0;                      // seller_accepts AND buyer_accepts
};

inline Feedback observe(FeedbackKind kind, const PricePair& pp,
                        const ValuationPair& v) {
  check_valid(pp);
  check_valid(v);
  Feedback f;
  f.kind = kind;
  int sa = v.s <= pp.p ? 1 : 0;
  int ba = pp.q <= v.b ? 1 : 0;
  switch (kind) {
    case FeedbackKind::Full:
      f.valuations = v;
      [[fallthrough]];
    case FeedbackKind::TwoBit:
      f.seller_accepts = sa;
      f.buyer_accepts = ba;
      [[fallthrough]];
    case FeedbackKind::OneBit:
      f.traded = sa & ba;
  }
  return f;
}

struct GftEstimate {
  int bit;           // unbiased 0/1 estimate of gft_single(p, v)
  PricePair posted;  // the randomized pair actually posted this round
};

// One-bit unbiased estimator of the single-price gains from trade at p:
// with probability p post (U, p), U ~ Unif[0, p]; otherwise post (p, V),
// V ~ Unif[p, 1]. The trade indicator of the posted pair has expectation
// exactly (b - p + p - s) * 1{s <= p <= b}.
inline GftEstimate estimate_gft(double p, const ValuationPair& v, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("price outside [0,1]");
  check_valid(v);
  GftEstimate e;
  if (rng.bernoulli(p)) {
    double u = rng.real(0.0, p);
    e.posted = {u, p};
  } else {
    double w = rng.real(p, 1.0);
    e.posted = {p, w};
  }
  e.bit = (v.s <= e.posted.p && e.posted.q <= v.b) ? 1 : 0;
  return e;
}

}  // namespace trade
