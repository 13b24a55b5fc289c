#include "kpzlab/algebra.hpp"

#include <cmath>
#include <string>

#include "kpzlab/errors.hpp"

namespace kpz {

namespace {

// Radicands that are negative only through rounding are clamped to zero.
double checked_radicand(double r, double scale, const char* what) {
    if (r >= 0.0) return r;
    if (r > -1e-13 * (1.0 + std::abs(scale))) return 0.0;
    throw DomainError(std::string(what) + ": negative radicand " + std::to_string(r));
}

void require_gamma(double gamma) {
    if (!(gamma < 1.0)) throw DomainError("gamma must be < 1");
}

void require_kappa(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
}

}  // namespace

const char* to_string(Phase p) { return p == Phase::Dilute ? "dilute" : "dense"; }
const char* to_string(Frame f) { return f == Frame::Planar ? "planar" : "quantum_gravity"; }
const char* to_string(Locus l) { return l == Locus::Bulk ? "bulk" : "boundary"; }

double c_of_gamma(double gamma) {
    require_gamma(gamma);
    return 1.0 - 6.0 * gamma * gamma / (1.0 - gamma);
}

double gamma_of_c(double c, Branch branch) {
    if (!(c <= 1.0)) throw DomainError("central charge must be <= 1");
    // roots of 6 gamma^2 + (1-c) gamma - (1-c) = 0
    double s = std::sqrt((1.0 - c) * (25.0 - c));
    return branch == Branch::Negative ? ((c - 1.0) - s) / 12.0 : ((c - 1.0) + s) / 12.0;
}

double kpz_map(double gamma, double delta) {
    require_gamma(gamma);
    return delta * (delta - gamma) / (1.0 - gamma);
}

double kpz_inverse(double gamma, double x) {
    require_gamma(gamma);
    double r = checked_radicand(4.0 * (1.0 - gamma) * x + gamma * gamma, gamma * gamma, "kpz_inverse");
    double s = std::sqrt(r);
    if (gamma < 0.0) {
        double den = s - gamma;
        return den > 0.0 ? 2.0 * (1.0 - gamma) * x / den : 0.0;
    }
    return 0.5 * (s + gamma);
}

double v_map(double gamma, double x) {
    require_gamma(gamma);
    return (x * x - gamma * gamma) / (4.0 * (1.0 - gamma));
}

double v_inverse(double gamma, double x) {
    require_gamma(gamma);
    return std::sqrt(checked_radicand(4.0 * (1.0 - gamma) * x + gamma * gamma, gamma * gamma, "v_inverse"));
}

double bulk_from_boundary_qg(double gamma, double delta_boundary) {
    return 2.0 * v_map(gamma, delta_boundary);
}

DualWeight dual_weight(double gamma, double delta) {
    require_gamma(gamma);
    return {-gamma / (1.0 - gamma), (delta - gamma) / (1.0 - gamma)};
}

double kac_weight(double gamma, KacIndex idx) {
    require_gamma(gamma);
    double a = (1.0 - gamma) * idx.p - idx.q;
    return (a * a - gamma * gamma) / (4.0 * (1.0 - gamma));
}

PhaseData phase_data(double gamma, Phase phase) {
    require_gamma(gamma);
    if (phase == Phase::Dilute) return {0.0, 1.0};
    return {gamma, 1.0 / (1.0 - gamma)};
}

double sle_kpz(double kappa, double delta) {
    require_kappa(kappa);
    return 0.25 * delta * (kappa * delta + 4.0 - kappa);
}

double sle_kpz_inverse(double kappa, double x) {
    require_kappa(kappa);
    double k4 = kappa - 4.0;
    double s = std::sqrt(checked_radicand(16.0 * kappa * x + k4 * k4, k4 * k4, "sle_kpz_inverse"));
    if (kappa < 4.0) {
        double den = s - k4;
        return den > 0.0 ? 8.0 * x / den : 0.0;
    }
    return (s + k4) / (2.0 * kappa);
}

double sle_v(double kappa, double delta) {
    require_kappa(kappa);
    double k4 = kappa - 4.0;
    return (kappa * kappa * delta * delta - k4 * k4) / (16.0 * kappa);
}

double sle_bulk(double kappa, double delta) { return 2.0 * sle_v(kappa, delta); }

double sle_kac_weight(double kappa, KacIndex idx) {
    require_kappa(kappa);
    double a = 4.0 * idx.p - kappa * idx.q;
    double k4 = kappa - 4.0;
    return (a * a - k4 * k4) / (16.0 * kappa);
}

double sle_kac_qg_weight(double kappa, KacIndex idx) {
    require_kappa(kappa);
    return (std::abs(4.0 * idx.p - kappa * idx.q) + kappa - 4.0) / (2.0 * kappa);
}

namespace {
double summed_images(double kappa, std::span<const double> dims) {
    double sum = 0.0;
    for (double x : dims) sum += sle_kpz_inverse(kappa, x);
    return sum;
}
}  // namespace

double fuse_boundary(double kappa, std::span<const double> boundary_dims) {
    return sle_kpz(kappa, summed_images(kappa, boundary_dims));
}

double fuse_bulk(double kappa, std::span<const double> boundary_dims) {
    return sle_bulk(kappa, summed_images(kappa, boundary_dims));
}

double sde_exponent(double kappa, double xa, double xb, Locus locus) {
    double ua = sle_kpz_inverse(kappa, xa);
    double ub = sle_kpz_inverse(kappa, xb);
    if (locus == Locus::Boundary) return 0.5 * kappa * ua * ub;
    double k4 = kappa - 4.0;
    return 0.25 * kappa * ua * ub + k4 * k4 / (8.0 * kappa);
}

}  // namespace kpz
