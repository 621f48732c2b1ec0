#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trade/core.hpp"

namespace trade {

// Normalization constant of the two-price hard instance. Chosen so the
// analytic wedge piece carries exactly the same mass as the other corner
// pieces; every closed form below is expressed in terms of it.
inline const double kA = 2.0 * std::log(27.0 / 16.0);

inline double c_prob_const() { return 3.0 / (4.0 * kA); }
inline double c_plat_const() { return kA / (2.0 * (1.0 + 8.0 * kA)); }
inline double c_spike_const() { return 1.0 / (864.0 * (1.0 + 8.0 * kA)); }

// Half-open box [x0,x1) x [y0,y1); the upper edges are included when they
// touch the boundary of the unit square so that piece lists partition their
// unions without gaps.
struct AxisAlignedBox {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  bool contains(double x, double y) const {
    bool in_x = x >= x0 && (x < x1 || (x1 == 1.0 && x == 1.0));
    bool in_y = y >= y0 && (y < y1 || (y1 == 1.0 && y == 1.0));
    return in_x && in_y;
  }
  double area() const { return (x1 - x0) * (y1 - y0); }
};

inline void check_valid(const AxisAlignedBox& b) {
  if (!(b.x0 >= 0 && b.x0 < b.x1 && b.x1 <= 1 && b.y0 >= 0 && b.y0 < b.y1 &&
        b.y1 <= 1))
    throw std::invalid_argument("box must be nondegenerate inside [0,1]^2");
}

// Constant pieces have a flat density c. The Q1Analytic piece carries the
// factor (5-6(y+x))/(6(y-x)) scaled by 36/(1+8a); its `value` field stores
// that scale. The factor's supremum over its box is 2, at the corner
// (1/6, 1/3).
enum class PieceKind { Constant, Q1Analytic };

struct DensityPiece {
  AxisAlignedBox box;
  PieceKind kind = PieceKind::Constant;
  double value = 0.0;
};

struct PiecewiseDensity {
  std::vector<DensityPiece> pieces;
  double smoothness_sigma = 1.0;
};

inline double q1_analytic_factor(double x, double y) {
  return (5.0 - 6.0 * (y + x)) / (6.0 * (y - x));
}

// Spike parameters (v, eps) of the perturbed instance; membership in the
// admissible set requires eps in (0, 1/12] and 1/3 + eps <= v <= 1/2 - eps.
struct PerturbationParams {
  double v = 0.0;
  double eps = 0.0;
};

inline void check_valid(const PerturbationParams& pp) {
  // 1e-12 slack: candidate centers are rounded rational quotients that sit
  // exactly on the admissible boundary in real arithmetic.
  if (!(pp.eps > 0 && pp.eps <= 1.0 / 12.0 &&
        pp.v >= 1.0 / 3.0 + pp.eps - 1e-12 &&
        pp.v <= 0.5 - pp.eps + 1e-12))
    throw std::invalid_argument("perturbation (v, eps) outside admissible set");
}

struct SquareMixture {
  std::vector<std::pair<AxisAlignedBox, double>> components;  // (box, weight)
};

// Six squares of the single-price hard instance (side 1/8 each). SP_Q1..Q3
// are the blue squares, SP_Q4..Q6 the red squares.
inline const AxisAlignedBox SP_Q1{0.0, 1.0 / 8, 3.0 / 8, 4.0 / 8};
inline const AxisAlignedBox SP_Q2{2.0 / 8, 3.0 / 8, 7.0 / 8, 1.0};
inline const AxisAlignedBox SP_Q3{4.0 / 8, 5.0 / 8, 5.0 / 8, 6.0 / 8};
inline const AxisAlignedBox SP_Q4{4.0 / 8, 5.0 / 8, 7.0 / 8, 1.0};
inline const AxisAlignedBox SP_Q5{0.0, 1.0 / 8, 5.0 / 8, 6.0 / 8};
inline const AxisAlignedBox SP_Q6{2.0 / 8, 3.0 / 8, 3.0 / 8, 4.0 / 8};

// Six support boxes of the two-price hard instance. LB_Q1 holds the analytic
// wedge, LB_Q6 is the exploring square that the perturbations live in.
inline const AxisAlignedBox LB_Q1{0.0, 1.0 / 6, 1.0 / 3, 1.0 / 2};
inline const AxisAlignedBox LB_Q2{0.0, 1.0 / 6, 1.0 / 2, 2.0 / 3};
inline const AxisAlignedBox LB_Q3{0.0, 1.0 / 6, 5.0 / 6, 1.0};
inline const AxisAlignedBox LB_Q4{5.0 / 6, 1.0, 5.0 / 6, 1.0};
inline const AxisAlignedBox LB_Q5{5.0 / 6, 1.0, 0.0, 1.0 / 6};
inline const AxisAlignedBox LB_Q6{1.0 / 3, 1.0 / 2, 2.0 / 3, 5.0 / 6};

enum class AdversaryVariant {
  Uniform01Sq,
  Blue,
  Red,
  FamilyF,
  BaseF,
  PerturbedF,
  Custom,
};

enum class SquareColor { Blue, Red };

// Immutable description of a smooth adversary. `pieces` always holds the
// stationary per-round density (for FamilyF that is the color mixture; the
// realized per-round law additionally depends on the index sequence).
struct AdversarySpec {
  AdversaryVariant variant = AdversaryVariant::Uniform01Sq;
  double sigma = 1.0;
  bool iid = true;
  PerturbationParams pert;                // PerturbedF only
  SquareColor family_color = SquareColor::Blue;  // FamilyF only
  std::vector<int> family_indices;        // FamilyF; empty = uniform per round
  PiecewiseDensity pieces;

  static AdversarySpec uniform01();
  static AdversarySpec blue();
  static AdversarySpec red();
  static AdversarySpec base_f();
  static AdversarySpec perturbed_f(PerturbationParams pert);
  static AdversarySpec family_f(SquareColor color, std::vector<int> indices);
  static AdversarySpec custom(PiecewiseDensity density);
};

// Exact pointwise density (zero off-support). For FamilyF this is the
// stationary color mixture.
double density(const AdversarySpec& spec, double x, double y);

// Draw one valuation pair. Constant pieces: pick a piece by mass, then
// uniform inside its box. The analytic wedge uses rejection sampling against
// the envelope constant 2. FamilyF consults its index sequence at `round`
// (or draws a square uniformly when the sequence is empty).
ValuationPair sample(const AdversarySpec& spec, Rng& rng,
                     std::int64_t round = 0);

// Closed-form expected gain from trade of a single price under the base
// instance, a five-piece polynomial in p.
double expected_gft_base(double p);

// Base curve plus the two tent bumps of the perturbed instance.
double expected_gft_perturbed(double p, const PerturbationParams& pert);

// Exact expected gain from trade of a posted pair under the adversary's
// stationary density (piecewise closed forms; 1-D quadrature over the
// analytic wedge).
double expected_gft_pair(const AdversarySpec& spec, const PricePair& pp,
                         GftDefinition d = GftDefinition::SurplusSplit);

// Best fixed single price and its expected gain from trade. Closed forms
// for BaseF/PerturbedF; exact grid search over `resolution` prices
// otherwise. Ties break toward the smallest price.
std::pair<double, double> best_fixed_price(const AdversarySpec& spec,
                                           int resolution);

// Exact law of the two acceptance bits (1{S<=p}, 1{q<=B}) as a probability
// vector over {(0,0),(0,1),(1,0),(1,1)} in that order.
std::array<double, 4> feedback_probs(const AdversarySpec& spec,
                                     const PricePair& pp);

struct SmoothnessReport {
  bool ok = false;
  double sup_density = 0.0;
};

// Analytic supremum of the density over all pieces, compared against the
// declared 1/sigma cap.
SmoothnessReport check_smoothness(const AdversarySpec& spec);

// Minimum over a price grid of the worst-case (over the two colors)
// fixed-price suboptimality gap. Strictly positive gap means no single price
// serves both colors.
double single_price_gap(const AdversarySpec& blue, const AdversarySpec& red,
                        int resolution);

// Numeric total mass (quadrature over all pieces); used by the verification
// suite's normalization check.
double total_mass(const AdversarySpec& spec);

// Mass of the stationary density inside [x0,x1] x [y0,y1].
double mass_in_box(const AdversarySpec& spec, double x0, double x1, double y0,
                   double y1);

// JSON (de)serialization of adversary specs; see README for the schema.
std::string to_json_string(const AdversarySpec& spec);
AdversarySpec adversary_from_json_string(const std::string& text);

}  // namespace trade
