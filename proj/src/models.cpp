#include "kpzlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>

#include "kpzlab/errors.hpp"
#include "kpzlab/spectra.hpp"

namespace kpz {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double gamma_c0 = -0.5;  // c = 0

ModelPoint from_kappa(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw RangeError("kappa must be positive and finite");
    ModelPoint m;
    m.kappa = kappa;
    m.g = 4.0 / kappa;
    m.phase = kappa <= 4.0 ? Phase::Dilute : Phase::Dense;
    m.gamma = kappa <= 4.0 ? 1.0 - 4.0 / kappa : 1.0 - kappa / 4.0;
    m.gamma_dual = -m.gamma / (1.0 - m.gamma);
    double k4 = kappa / 4.0 - 1.0;
    m.c = 1.0 - 24.0 * k4 * k4 / kappa;
    if (m.g >= 0.0 && m.g <= 2.0) {
        double n = -2.0 * std::cos(pi * m.g);
        if (std::abs(n) < 1e-12) n = 0.0;
        m.n_loop = n;
        if (n >= 0.0) m.q_potts = n * n;
    }
    return m;
}

Phase require_phase(const std::optional<Phase>& phase, const char* what) {
    if (!phase)
        throw AmbiguityError(std::string(what) + " alone matches a dilute and a dense model; give a phase");
    return *phase;
}

ModelPoint from_gamma(double gamma, Phase phase) {
    if (!(gamma <= 0.0)) throw RangeError("gamma must be <= 0");
    return from_kappa(phase == Phase::Dilute ? 4.0 / (1.0 - gamma) : 4.0 * (1.0 - gamma));
}

ModelPoint from_n(double n, Phase phase) {
    if (!(n >= -2.0 && n <= 2.0)) throw RangeError("loop fugacity N must lie in [-2, 2]");
    double a = std::acos(-0.5 * n) / pi;
    return from_kappa(4.0 / (phase == Phase::Dense ? a : 2.0 - a));
}

}  // namespace

ModelPoint model_point(const ModelSpec& spec) {
    return std::visit(
        [](const auto& s) -> ModelPoint {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ByKappa>) {
                return from_kappa(s.kappa);
            } else if constexpr (std::is_same_v<T, ByCoupling>) {
                if (!(s.g > 0.0)) throw RangeError("g must be positive");
                return from_kappa(4.0 / s.g);
            } else if constexpr (std::is_same_v<T, ByCentralCharge>) {
                if (!(s.c <= 1.0)) throw RangeError("c must be <= 1");
                Phase ph = require_phase(s.phase, "central charge");
                return from_gamma(gamma_of_c(s.c, Branch::Negative), ph);
            } else if constexpr (std::is_same_v<T, BySusceptibility>) {
                Phase ph = require_phase(s.phase, "gamma");
                return from_gamma(s.gamma, ph);
            } else if constexpr (std::is_same_v<T, ByLoopFugacity>) {
                return from_n(s.n, s.phase);
            } else {
                if (!(s.q >= 0.0 && s.q <= 4.0)) throw RangeError("Potts Q must lie in [0, 4]");
                return from_n(std::sqrt(s.q), s.branch == PottsBranch::Critical ? Phase::Dense : Phase::Dilute);
            }
        },
        spec);
}

double brownian_zeta(double L, Locus locus) {
    if (!(L >= 0.0)) throw DomainError("L must be >= 0");
    return locus == Locus::Bulk ? v_map(gamma_c0, L) : kpz_map(gamma_c0, L);
}

double packet_zeta(std::span<const int> packet_counts, Locus locus) {
    double x = 0.0;
    for (int n : packet_counts) {
        if (n < 0) throw DomainError("packet counts must be >= 0");
        x += kpz_inverse(gamma_c0, n);
    }
    return locus == Locus::Bulk ? v_map(gamma_c0, x) : kpz_map(gamma_c0, x);
}

double copolymer_star(const StarSpec& star) {
    if (star.strands < 0) throw ConfigError("strand count must be >= 0");
    if (star.pinched_pairs != 0) throw ConfigError("pinched pairs need kappa > 4; copolymer stars are c = 0 dilute");
    double x = star.strands * kpz_inverse(gamma_c0, 5.0 / 8.0);
    for (const auto& p : star.packets) {
        if (p.n_brownian < 0 || p.m_saw < 0) throw ConfigError("packet counts must be >= 0");
        x += kpz_inverse(gamma_c0, p.n_brownian + 5.0 / 8.0 * p.m_saw);
    }
    return star.locus == Locus::Bulk ? v_map(gamma_c0, x) : kpz_map(gamma_c0, x);
}

double perc_crossing(int l, Locus locus) {
    if (l < 1) throw DomainError("crossing count must be >= 1");
    return locus == Locus::Bulk ? 2.0 * v_map(gamma_c0, 0.5 * l) : kpz_map(gamma_c0, 0.5 * l);
}

Weight watermelon(const ModelPoint& model, int L, Locus locus, Frame frame) {
    if (L < 1) throw DomainError("watermelon needs L >= 1");
    double k = model.kappa;
    Weight w;
    w.frame = frame;
    w.locus = locus;
    if (frame == Frame::Planar) {
        w.value = locus == Locus::Boundary ? L * (2.0 * L + 4.0 - k) / (2.0 * k)
                                           : (4.0 * L * L - (4.0 - k) * (4.0 - k)) / (8.0 * k);
        return w;
    }
    double g = model.gamma;
    if (model.phase == Phase::Dilute)
        w.value = locus == Locus::Boundary ? 0.5 * L * (1.0 - g) : 0.25 * L * (1.0 - g) + 0.5 * g;
    else
        w.value = locus == Locus::Boundary ? g + 0.5 * L : 0.25 * L + 0.5 * g;
    w.dual = dual_weight(g, w.value).delta_dual;
    return w;
}

GeometryDims geometry_dims(const ModelPoint& model) {
    double g = model.g;
    double dh = std::min(2.0, 1.0 + 0.5 / g);
    double dep = g >= 1.0 ? dh : 1.0 + 0.5 * g;
    return {dh, dep, 1.0 + 0.5 / g - 1.5 * g};
}

namespace {

double moment_image(double kappa, double n) {
    try {
        return sle_kpz_inverse(kappa, n);
    } catch (const DomainError&) {
        throw MomentOutOfRange("moment order " + std::to_string(n) + " below n* for kappa " + std::to_string(kappa));
    }
}

double watermelon_kappa(double kappa, int L, Locus locus) {
    if (locus == Locus::Boundary) return L * (2.0 * L + 4.0 - kappa) / (2.0 * kappa);
    return (4.0 * L * L - (4.0 - kappa) * (4.0 - kappa)) / (8.0 * kappa);
}

}  // namespace

double sle_star_moment(double kappa, int L, double n, Locus locus, bool subtracted) {
    if (L < 1) throw DomainError("L must be >= 1");
    double arg = 2.0 * L / kappa + moment_image(kappa, n);
    double x = locus == Locus::Boundary ? sle_kpz(kappa, arg) : sle_bulk(kappa, arg);
    return subtracted ? x - watermelon_kappa(kappa, L, locus) : x;
}

double sle_disconnection(double kappa, int L, Sides sides, Locus locus) {
    if (L < 1) throw DomainError("L must be >= 1");
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    if (kappa <= 4.0) return 0.0;
    double u = 1.0 - 4.0 / kappa;
    if (sides == Sides::One)
        return locus == Locus::Boundary ? L * u : 0.5 * (L - 1) * u + (kappa - 4.0) / 8.0;
    return locus == Locus::Boundary ? 0.5 * (4.0 * L + kappa - 4.0) * u : 0.5 * (2.0 * L + kappa - 4.0) * u;
}

double sle_double_sided(double kappa, int L, double n1, double n2, Locus locus) {
    if (L < 1) throw DomainError("L must be >= 1");
    double arg = moment_image(kappa, n1) + 2.0 * L / kappa + moment_image(kappa, n2);
    return locus == Locus::Boundary ? sle_kpz(kappa, arg) : sle_bulk(kappa, arg);
}

double winding_variance_coeff(double kappa, int k, int j) {
    if (k < 1 || j < 0 || 2 * j > k) throw RangeError("need k >= 1 and 0 <= 2j <= k");
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    double kj = k + (kappa > 4.0 ? j * (0.5 * kappa - 2.0) : 0.0);
    return kappa / (kj * kj);
}

double cpa_beta(double c) { return mf_dimension(c, 2.0) / mf_dimension(c, 0.0); }

}  // namespace kpz
