#include "trade/adversary.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

namespace trade {

namespace {

using json = nlohmann::json;

constexpr int kQuadDepth = 12;
constexpr double kQuadTol = 1e-12;
constexpr int kRejectionCap = 1'000'000;

template <class F>
double integrate_y(F&& f, double a, double b) {
  if (b - a <= 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      std::forward<F>(f), a, b, kQuadDepth, kQuadTol);
}

struct Interval {
  double lo, hi;
  bool empty() const { return hi - lo <= 0.0; }
  double len() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

Interval clip(double a0, double a1, double b0, double b1) {
  return {std::max(a0, b0), std::min(a1, b1)};
}

// Antiderivative in x of (5-6(x+y))/(6(y-x)) for fixed y.
double wedge_inner_mass(double xa, double xb, double y) {
  auto g = [y](double x) {
    return x - (5.0 - 12.0 * y) / 6.0 * std::log(y - x);
  };
  return g(xb) - g(xa);
}

// Antiderivative in x of ((p-q) + (y-x)) * (5-6(x+y))/(6(y-x)) for fixed y,
// with d = p - q. Substituting u = y - x turns the integrand into
// d*mu/(6u) + d + mu/6 + u with mu = 5 - 12y.
double wedge_inner_pair(double xa, double xb, double y, double d) {
  double mu = 5.0 - 12.0 * y;
  auto f = [&](double x) {
    double u = y - x;
    return -(d * mu / 6.0 * std::log(u) + (d + mu / 6.0) * u + 0.5 * u * u);
  };
  return f(xb) - f(xa);
}

double piece_scale() { return 36.0 / (1.0 + 8.0 * kA); }

// Mass of one piece inside its own box. The wedge integrates to a/36 times
// its scale; that identity is what the normalization constant a enforces.
double piece_mass(const DensityPiece& pc) {
  if (pc.kind == PieceKind::Constant) return pc.value * pc.box.area();
  return pc.value * (kA / 36.0);
}

PiecewiseDensity base_pieces() {
  double c = piece_scale();
  PiecewiseDensity pd;
  pd.smoothness_sigma = 1.0 / 9.0;
  pd.pieces = {
      {LB_Q1, PieceKind::Q1Analytic, c},
      {LB_Q2, PieceKind::Constant, c * kA},
      {LB_Q3, PieceKind::Constant, 2.0 * c * kA},
      {LB_Q4, PieceKind::Constant, 2.0 * c * kA},
      {LB_Q5, PieceKind::Constant, 2.0 * c * kA},
      {LB_Q6, PieceKind::Constant, c},
  };
  return pd;
}

// The perturbation swaps density between the two rows [2/3,3/4) and
// [3/4,5/6) of the exploring square: left of v the upper row doubles and the
// lower row empties, right of v the roles flip. Zero-density cells are
// simply omitted from the piece list.
PiecewiseDensity perturbed_pieces(const PerturbationParams& pert) {
  check_valid(pert);
  double c = piece_scale();
  PiecewiseDensity pd = base_pieces();
  pd.pieces.pop_back();  // replace LB_Q6 by its split cells
  auto add = [&](double xa, double xb, double ya, double yb, double val) {
    if (xb - xa > 0.0) pd.pieces.push_back({{xa, xb, ya, yb}, PieceKind::Constant, val});
  };
  double v = pert.v, e = pert.eps;
  const double yl = 2.0 / 3.0, ym = 3.0 / 4.0, yh = 5.0 / 6.0;
  add(1.0 / 3.0, v - e, yl, yh, c);
  add(v - e, v, ym, yh, 2.0 * c);
  add(v, v + e, yl, ym, 2.0 * c);
  add(v + e, 0.5, yl, yh, c);
  return pd;
}

const std::array<AxisAlignedBox, 6> kSpSquares = {SP_Q1, SP_Q2, SP_Q3,
                                                  SP_Q4, SP_Q5, SP_Q6};

PiecewiseDensity mixture_pieces(const SquareMixture& m, double sigma) {
  PiecewiseDensity pd;
  pd.smoothness_sigma = sigma;
  for (const auto& [box, w] : m.components)
    pd.pieces.push_back({box, PieceKind::Constant, w / box.area()});
  return pd;
}

SquareMixture color_mixture(SquareColor color) {
  SquareMixture m;
  int base = color == SquareColor::Blue ? 0 : 3;
  for (int i = 0; i < 3; ++i)
    m.components.emplace_back(kSpSquares[static_cast<size_t>(base + i)],
                              1.0 / 3.0);
  return m;
}

ValuationPair sample_constant_box(const AxisAlignedBox& b, Rng& rng) {
  return {rng.real(b.x0, b.x1), rng.real(b.y0, b.y1)};
}

ValuationPair sample_wedge(const AxisAlignedBox& b, Rng& rng) {
  for (int it = 0; it < kRejectionCap; ++it) {
    double x = rng.real(b.x0, b.x1);
    double y = rng.real(b.y0, b.y1);
    if (rng.real() * 2.0 <= q1_analytic_factor(x, y)) return {x, y};
  }
  throw std::runtime_error("rejection sampling cap reached; malformed density");
}

std::string variant_tag(AdversaryVariant v) {
  switch (v) {
    case AdversaryVariant::Uniform01Sq: return "uniform01_sq";
    case AdversaryVariant::Blue: return "blue";
    case AdversaryVariant::Red: return "red";
    case AdversaryVariant::FamilyF: return "family_f";
    case AdversaryVariant::BaseF: return "base_f";
    case AdversaryVariant::PerturbedF: return "perturbed_f";
    case AdversaryVariant::Custom: return "custom";
  }
  throw std::logic_error("unknown variant");
}

}  // namespace

AdversarySpec AdversarySpec::uniform01() {
  AdversarySpec s;
  s.variant = AdversaryVariant::Uniform01Sq;
  s.sigma = 1.0;
  s.pieces.smoothness_sigma = 1.0;
  s.pieces.pieces = {{{0.0, 1.0, 0.0, 1.0}, PieceKind::Constant, 1.0}};
  return s;
}

AdversarySpec AdversarySpec::blue() {
  AdversarySpec s;
  s.variant = AdversaryVariant::Blue;
  s.sigma = 1.0 / 64.0;
  s.pieces = mixture_pieces(color_mixture(SquareColor::Blue), s.sigma);
  return s;
}

AdversarySpec AdversarySpec::red() {
  AdversarySpec s;
  s.variant = AdversaryVariant::Red;
  s.sigma = 1.0 / 64.0;
  s.pieces = mixture_pieces(color_mixture(SquareColor::Red), s.sigma);
  return s;
}

AdversarySpec AdversarySpec::base_f() {
  AdversarySpec s;
  s.variant = AdversaryVariant::BaseF;
  s.sigma = 1.0 / 9.0;
  s.pieces = base_pieces();
  return s;
}

AdversarySpec AdversarySpec::perturbed_f(PerturbationParams pert) {
  AdversarySpec s;
  s.variant = AdversaryVariant::PerturbedF;
  s.sigma = 1.0 / 9.0;
  s.pert = pert;
  s.pieces = perturbed_pieces(pert);
  return s;
}

AdversarySpec AdversarySpec::family_f(SquareColor color,
                                      std::vector<int> indices) {
  int lo = color == SquareColor::Blue ? 1 : 4;
  for (int i : indices)
    if (i < lo || i > lo + 2)
      throw std::invalid_argument("family index outside the color's squares");
  AdversarySpec s;
  s.variant = AdversaryVariant::FamilyF;
  s.sigma = 1.0 / 64.0;
  s.iid = indices.empty();
  s.family_color = color;
  s.family_indices = std::move(indices);
  s.pieces = mixture_pieces(color_mixture(color), s.sigma);
  return s;
}

AdversarySpec AdversarySpec::custom(PiecewiseDensity density) {
  for (const auto& pc : density.pieces) {
    check_valid(pc.box);
    if (pc.value < 0.0)
      throw std::invalid_argument("piece density must be nonnegative");
  }
  AdversarySpec s;
  s.variant = AdversaryVariant::Custom;
  s.sigma = density.smoothness_sigma;
  s.pieces = std::move(density);
  return s;
}

double density(const AdversarySpec& spec, double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::invalid_argument("density point outside [0,1]^2");
  for (const auto& pc : spec.pieces.pieces) {
    if (!pc.box.contains(x, y)) continue;
    if (pc.kind == PieceKind::Constant) return pc.value;
    return pc.value * q1_analytic_factor(x, y);
  }
  return 0.0;
}

ValuationPair sample(const AdversarySpec& spec, Rng& rng, std::int64_t round) {
  if (spec.variant == AdversaryVariant::FamilyF) {
    int id;
    if (spec.family_indices.empty()) {
      int lo = spec.family_color == SquareColor::Blue ? 1 : 4;
      id = lo + static_cast<int>(rng.index(3));
    } else {
      if (round < 0 ||
          round >= static_cast<std::int64_t>(spec.family_indices.size()))
        throw std::out_of_range("family index sequence shorter than horizon");
      id = spec.family_indices[static_cast<size_t>(round)];
    }
    return sample_constant_box(kSpSquares[static_cast<size_t>(id - 1)], rng);
  }

  double u = rng.real();
  double acc = 0.0;
  const auto& pieces = spec.pieces.pieces;
  for (size_t i = 0; i < pieces.size(); ++i) {
    acc += piece_mass(pieces[i]);
    if (u < acc || i + 1 == pieces.size()) {
      if (pieces[i].kind == PieceKind::Constant)
        return sample_constant_box(pieces[i].box, rng);
      return sample_wedge(pieces[i].box, rng);
    }
  }
  throw std::logic_error("empty piece list");
}

double expected_gft_base(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("price outside [0,1]");
  const double s = 1.0 / (6.0 * (1.0 + 8.0 * kA));
  if (p <= 1.0 / 6.0)
    return s * 3.0 * p * (5.0 + 29.0 * kA - 6.0 * (1.0 + 3.0 * kA) * p);
  if (p <= 0.5) return s * (2.0 + 13.0 * kA);
  if (p <= 2.0 / 3.0)
    return s * (-18.0 * kA * p * p + 3.0 * kA * p + 2.0 * (1.0 + 8.0 * kA));
  if (p <= 5.0 / 6.0) return s * (-18.0 * p * p + 15.0 * p + 10.0 * kA);
  return s * 72.0 * kA * p * (1.0 - p);
}

namespace {
double tent(double u, double r, double x) {
  return std::max(0.0, 1.0 - std::abs(x - u) / r);
}
}  // namespace

double expected_gft_perturbed(double p, const PerturbationParams& pert) {
  check_valid(pert);
  const double z = 1.0 + 8.0 * kA;
  return expected_gft_base(p) +
         pert.eps / (864.0 * z) * tent(pert.v, pert.eps, p) +
         pert.eps * pert.eps / (72.0 * z) * tent(0.75, 1.0 / 12.0, p);
}

double expected_gft_pair(const AdversarySpec& spec, const PricePair& pp,
                         GftDefinition d) {
  check_valid(pp);
  const double p = pp.p, q = pp.q;
  double split = 0.0;
  double region_mass = 0.0;
  const bool want_mass = d == GftDefinition::FullSurplus;
  for (const auto& pc : spec.pieces.pieces) {
    Interval xs = clip(pc.box.x0, pc.box.x1, 0.0, p);
    Interval ys = clip(pc.box.y0, pc.box.y1, q, 1.0);
    if (xs.empty() || ys.empty()) continue;
    if (pc.kind == PieceKind::Constant) {
      double m = pc.value * xs.len() * ys.len();
      split += m * ((ys.mid() - q) + (p - xs.mid()));
      region_mass += m;
    } else {
      split += pc.value * integrate_y(
                              [&](double y) {
                                return wedge_inner_pair(xs.lo, xs.hi, y, p - q);
                              },
                              ys.lo, ys.hi);
      if (want_mass)
        region_mass +=
            pc.value * integrate_y(
                           [&](double y) {
                             return wedge_inner_mass(xs.lo, xs.hi, y);
                           },
                           ys.lo, ys.hi);
    }
  }
  if (d == GftDefinition::FullSurplus) return split + (q - p) * region_mass;
  return split;
}

std::pair<double, double> best_fixed_price(const AdversarySpec& spec,
                                           int resolution) {
  if (resolution < 100)
    throw std::invalid_argument("best_fixed_price needs resolution >= 100");
  const double plateau = expected_gft_base(0.3);
  if (spec.variant == AdversaryVariant::BaseF) return {1.0 / 6.0, plateau};
  if (spec.variant == AdversaryVariant::PerturbedF)
    return {spec.pert.v, plateau + spec.pert.eps * c_spike_const()};
  double best_p = 0.0, best_v = -1.0;
  for (int i = 1; i <= resolution; ++i) {
    double g = static_cast<double>(i) / resolution;
    double val = expected_gft_pair(spec, {g, g});
    if (val > best_v) {
      best_v = val;
      best_p = g;
    }
  }
  return {best_p, best_v};
}

std::array<double, 4> feedback_probs(const AdversarySpec& spec,
                                     const PricePair& pp) {
  check_valid(pp);
  const double p = pp.p, q = pp.q;
  return {
      mass_in_box(spec, p, 1.0, 0.0, q),  // (0,0): seller rejects, buyer rejects
      mass_in_box(spec, p, 1.0, q, 1.0),  // (0,1)
      mass_in_box(spec, 0.0, p, 0.0, q),  // (1,0)
      mass_in_box(spec, 0.0, p, q, 1.0),  // (1,1)
  };
}

SmoothnessReport check_smoothness(const AdversarySpec& spec) {
  double sup = 0.0;
  for (const auto& pc : spec.pieces.pieces) {
    double piece_sup =
        pc.kind == PieceKind::Constant ? pc.value : 2.0 * pc.value;
    sup = std::max(sup, piece_sup);
  }
  return {sup <= 1.0 / spec.sigma, sup};
}

double single_price_gap(const AdversarySpec& blue, const AdversarySpec& red,
                        int resolution) {
  if (resolution < 1000)
    throw std::invalid_argument("single_price_gap needs resolution >= 1000");
  std::vector<double> bv(static_cast<size_t>(resolution)),
      rv(static_cast<size_t>(resolution));
  double bb = 0.0, rb = 0.0;
  for (int i = 1; i <= resolution; ++i) {
    double g = static_cast<double>(i) / resolution;
    bv[static_cast<size_t>(i - 1)] = expected_gft_pair(blue, {g, g});
    rv[static_cast<size_t>(i - 1)] = expected_gft_pair(red, {g, g});
    bb = std::max(bb, bv[static_cast<size_t>(i - 1)]);
    rb = std::max(rb, rv[static_cast<size_t>(i - 1)]);
  }
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < bv.size(); ++i)
    gap = std::min(gap, std::max(bb - bv[i], rb - rv[i]));
  return gap;
}

double total_mass(const AdversarySpec& spec) {
  double total = 0.0;
  for (const auto& pc : spec.pieces.pieces) {
    if (pc.kind == PieceKind::Constant) {
      total += pc.value * pc.box.area();
    } else {
      total += pc.value *
               integrate_y(
                   [&](double y) {
                     return wedge_inner_mass(pc.box.x0, pc.box.x1, y);
                   },
                   pc.box.y0, pc.box.y1);
    }
  }
  return total;
}

double mass_in_box(const AdversarySpec& spec, double x0, double x1, double y0,
                   double y1) {
  double total = 0.0;
  for (const auto& pc : spec.pieces.pieces) {
    Interval xs = clip(pc.box.x0, pc.box.x1, x0, x1);
    Interval ys = clip(pc.box.y0, pc.box.y1, y0, y1);
    if (xs.empty() || ys.empty()) continue;
    if (pc.kind == PieceKind::Constant) {
      total += pc.value * xs.len() * ys.len();
    } else {
      total += pc.value * integrate_y(
                              [&](double y) {
                                return wedge_inner_mass(xs.lo, xs.hi, y);
                              },
                              ys.lo, ys.hi);
    }
  }
  return total;
}

std::string to_json_string(const AdversarySpec& spec) {
  json j;
  j["variant"] = variant_tag(spec.variant);
  j["sigma"] = spec.sigma;
  j["iid"] = spec.iid;
  switch (spec.variant) {
    case AdversaryVariant::PerturbedF:
      j["v"] = spec.pert.v;
      j["eps"] = spec.pert.eps;
      break;
    case AdversaryVariant::FamilyF:
      j["color"] = spec.family_color == SquareColor::Blue ? "blue" : "red";
      j["indices"] = spec.family_indices;
      break;
    case AdversaryVariant::Custom: {
      json pieces = json::array();
      for (const auto& pc : spec.pieces.pieces) {
        json e;
        e["box"] = {pc.box.x0, pc.box.x1, pc.box.y0, pc.box.y1};
        e["kind"] =
            pc.kind == PieceKind::Constant ? "constant" : "q1_analytic";
        e["value"] = pc.value;
        pieces.push_back(e);
      }
      j["pieces"] = pieces;
      break;
    }
    default:
      break;
  }
  return j.dump(2);
}

AdversarySpec adversary_from_json_string(const std::string& text) {
  json j = json::parse(text);
  std::string tag = j.at("variant").get<std::string>();
  AdversarySpec s;
  if (tag == "uniform01_sq") {
    s = AdversarySpec::uniform01();
  } else if (tag == "blue") {
    s = AdversarySpec::blue();
  } else if (tag == "red") {
    s = AdversarySpec::red();
  } else if (tag == "base_f") {
    s = AdversarySpec::base_f();
  } else if (tag == "perturbed_f") {
    s = AdversarySpec::perturbed_f(
        {j.at("v").get<double>(), j.at("eps").get<double>()});
  } else if (tag == "family_f") {
    auto color = j.at("color").get<std::string>() == "red" ? SquareColor::Red
                                                           : SquareColor::Blue;
    std::vector<int> idx;
    if (j.contains("indices")) idx = j["indices"].get<std::vector<int>>();
    s = AdversarySpec::family_f(color, std::move(idx));
  } else if (tag == "custom") {
    PiecewiseDensity pd;
    pd.smoothness_sigma = j.at("sigma").get<double>();
    for (const auto& e : j.at("pieces")) {
      auto b = e.at("box");
      DensityPiece pc;
      pc.box = {b.at(0).get<double>(), b.at(1).get<double>(),
                b.at(2).get<double>(), b.at(3).get<double>()};
      pc.kind = e.at("kind").get<std::string>() == "q1_analytic"
                    ? PieceKind::Q1Analytic
                    : PieceKind::Constant;
      pc.value = e.at("value").get<double>();
      pd.pieces.push_back(pc);
    }
    s = AdversarySpec::custom(std::move(pd));
  } else {
    throw std::invalid_argument("unknown adversary variant: " + tag);
  }
  if (j.contains("sigma")) {
    s.sigma = j["sigma"].get<double>();
    s.pieces.smoothness_sigma = s.sigma;
  }
  return s;
}

}  // namespace trade
