#pragma once

// Named exponent families: Brownian intersections, RW/SAW copolymer stars,
// percolation crossings, O(N)/Potts watermelons, SLE multi-line exponents
// and geometric dimensions.

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "kpzlab/algebra.hpp"

namespace kpz {

// --- model selectors ----------------------------------------------------

struct ByCentralCharge {
    double c;
    std::optional<Phase> phase;
};
struct BySusceptibility {
    double gamma;
    std::optional<Phase> phase;
};
struct ByCoupling {
    double g;
};
struct ByKappa {
    double kappa;
};
struct ByLoopFugacity {
    double n;
    Phase phase;
};
enum class PottsBranch { Critical, Tricritical };
struct ByPotts {
    double q;
    PottsBranch branch = PottsBranch::Critical;
};

using ModelSpec = std::variant<ByCentralCharge, BySusceptibility, ByCoupling, ByKappa, ByLoopFugacity, ByPotts>;

ModelPoint model_point(const ModelSpec& spec);

// --- stars ----------------------------------------------------------------

struct Packet {
    int n_brownian = 0;
    int m_saw = 0;
};

struct StarSpec {
    int strands = 0;
    std::vector<Packet> packets;
    Locus locus = Locus::Bulk;
    int pinched_pairs = 0;
};

struct GeometryDims {
    double d_hull;
    double d_ep;
    double d_sc;
};

enum class Sides { One, Two };

/// Bulk: zeta_L = (4L^2 - 1)/24.  Boundary: U(L) = L(1 + 2L)/3, the
/// normalization in which the single-walk boundary exponent is 1.
double brownian_zeta(double L, Locus locus);

/// Packets of transparent walks, mutually avoiding between packets.  Same
/// normalization as brownian_zeta, so all-ones packets reduce to it.
double packet_zeta(std::span<const int> packet_counts, Locus locus);

/// c = 0 star of RW/SAW packets.  Strands count as extra SAW legs.
double copolymer_star(const StarSpec& star);

/// Bichromatic l-path crossing exponent of percolation.
double perc_crossing(int l, Locus locus);

/// L-leg watermelon weight.  Planar frame uses the kappa formulas; the
/// quantum-gravity frame uses the phase of `model`, with the dual attached.
Weight watermelon(const ModelPoint& model, int L, Locus locus, Frame frame);

GeometryDims geometry_dims(const ModelPoint& model);

/// x~(L ^ n) or x(L ^ n); `subtracted` removes the L-leg watermelon.
double sle_star_moment(double kappa, int L, double n, Locus locus, bool subtracted);

double sle_disconnection(double kappa, int L, Sides sides, Locus locus);

/// Full exponent of n1 ^ L ^ n2 (not subtracted).
double sle_double_sided(double kappa, int L, double n1, double n2, Locus locus);

/// Coefficient of ln R in the winding variance of k strands with j pinched
/// pairs: kappa / k(j)^2.
double winding_variance_coeff(double kappa, int k, int j);

/// Constant-phase-angle exponent D(2)/D(0).
double cpa_beta(double c);

}  // namespace kpz
