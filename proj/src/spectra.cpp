#include "kpzlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kpzlab/algebra.hpp"
#include "kpzlab/errors.hpp"

namespace kpz {

namespace {

constexpr double pi = std::numbers::pi;

void require_c(double c) {
    if (!(c <= 1.0)) throw DomainError("central charge must be <= 1, got " + std::to_string(c));
}

// sqrt((24n + 1 - c)/(25 - c)), the common radical of the harmonic spectra.
double radical(double c, double n) {
    require_c(c);
    double num = 24.0 * n + 1.0 - c;
    if (num < 0.0) {
        if (num > -1e-13) num = 0.0;
        else throw MomentOutOfRange("moment order " + std::to_string(n) + " below n* = " + std::to_string(moment_floor(c)));
    }
    return std::sqrt(num / (25.0 - c));
}

}  // namespace

double moment_floor(double c) { return -(1.0 - c) / 24.0; }

double spectrum_b(double c) { return (25.0 - c) / 12.0; }

double mf_tau(double c, double n) {
    double r = radical(c, n);
    // (25-c)/24 (r - 1) written through r^2 - 1 = 24 (n-1)/(25-c) so that
    // tau(1) = 0 exactly.
    return 0.5 * (n - 1.0) + (n - 1.0) / (r + 1.0);
}

double mf_dimension(double c, double n) { return 0.5 + 1.0 / (radical(c, n) + 1.0); }

double mf_alpha(double c, double n) {
    double r = radical(c, n);
    if (r == 0.0) throw MomentOutOfRange("alpha diverges at n*");
    return 0.5 + 0.5 / r;
}

double mf_spectrum(double c, double alpha) { return mixed_spectrum(c, alpha, 0.0); }

double mixed_spectrum(double c, double alpha, double lambda) {
    require_c(c);
    double l2 = lambda * lambda;
    double den = 2.0 * alpha - 1.0 - l2;
    if (!(den > 0.0)) throw DomainError("alpha must exceed (1 + lambda^2)/2");
    double b = spectrum_b(c);
    return alpha + b - b * alpha * alpha / den;
}

double mixed_tau(double c, double n, double p) {
    double t = mf_tau(c, n);
    double den = t + spectrum_b(c);
    if (!(den > 0.0)) throw DomainError("tau(n) + b must be positive");
    return t - 0.25 * p * p / den;
}

double ep_dimension(double c, double lambda) {
    require_c(c);
    double s = std::sqrt(1.0 - c);
    double d = 1.5 - s * (std::sqrt(25.0 - c) - s) / 24.0;
    double l2 = lambda * lambda;
    return (1.0 + l2) * d - spectrum_b(c) * l2;
}

double wedge_spectrum(double c, double theta, double lambda) {
    require_c(c);
    double l2 = lambda * lambda;
    if (!(theta > 0.0) || !(theta < 2.0 * pi / (1.0 + l2)))
        throw DomainError("wedge angle outside (0, 2 pi/(1 + lambda^2))");
    double b = spectrum_b(c);
    return pi / theta + b - 0.5 * b * pi * (1.0 / theta + 1.0 / (2.0 * pi / (1.0 + l2) - theta));
}

namespace {

struct PolyParams {
    double gamma;
    double b;
    double a2;  // a''
};

PolyParams poly_params(double c, int m, PolyKind kind) {
    require_c(c);
    if (m < 1) throw DomainError("poly spectrum needs m >= 1");
    double gamma = gamma_of_c(c, Branch::Negative);
    double a2 = 0.5 * m;
    if (kind != PolyKind::Generic) {
        if (c != 0.0) throw DomainError("BrownianCut and SAWStar spectra are defined at c = 0 only");
        a2 = kind == PolyKind::BrownianCut ? 0.75 * m : 0.5 * m;
    }
    return {gamma, spectrum_b(c), a2};
}

// f = b - A^2/(2(1-gamma)) (1/(1+lambda^2) - sum 1/(2 alpha))^{-1} - (b-2)/2 sum alpha
double poly_formula(const PolyParams& pp, double A, std::span<const double> alphas, double lambda) {
    double inv = 0.0, sum = 0.0;
    for (double a : alphas) {
        if (!(a > 0.0)) throw DomainError("poly spectrum needs positive alphas");
        inv += 0.5 / a;
        sum += a;
    }
    double den = 1.0 / (1.0 + lambda * lambda) - inv;
    if (!(den > 0.0)) throw DomainError("poly spectrum argument outside its domain");
    return pp.b - A * A / (2.0 * (1.0 - pp.gamma)) / den - 0.5 * (pp.b - 2.0) * sum;
}

}  // namespace

double poly_spectrum(double c, std::span<const double> alphas, double lambda, PolyKind kind) {
    auto pp = poly_params(c, static_cast<int>(alphas.size()), kind);
    return poly_formula(pp, pp.a2, alphas, lambda);
}

double poly_marginal(double c, int m, std::span<const double> alphas, double lambda, PolyKind kind) {
    int p = static_cast<int>(alphas.size());
    if (p < 1 || p > m) throw DomainError("poly marginal needs 1 <= p <= m");
    auto pp = poly_params(c, m, kind);
    // Each dropped arm sits at n = 0, where its V^{-1} image is |gamma|.
    double A = pp.a2 - 0.5 * (m - p) * pp.gamma;
    return poly_formula(pp, A, alphas, lambda);
}

TypicalSingularities typical_singularities(double c, int m) {
    require_c(c);
    if (m < 1) throw DomainError("m must be >= 1");
    double gamma = gamma_of_c(c, Branch::Negative);
    if (!(gamma < 0.0)) throw DomainError("typical singularity diverges at c = 1");
    double alpha = 0.5 * m * (1.0 - 1.0 / gamma);
    double d = (2.0 - gamma) * (2.0 - gamma) / (2.0 * (1.0 - gamma)) - (1.0 - gamma) * m * m / 8.0;
    return {alpha, pi / alpha, d};
}

RareSites rare_site_exponent(double c) {
    require_c(c);
    double ns = moment_floor(c);
    return {ns, 1.0 + ns};
}

double alpha_density(double c, double alpha, double R) {
    require_c(c);
    if (!(alpha > 0.5)) throw DomainError("alpha must exceed 1/2");
    if (!(R > 1.0)) throw DomainError("R must exceed 1");
    double w = alpha - 0.5;
    double t = std::sqrt(1.0 - c) * std::sqrt(w) - std::sqrt(25.0 - c) / (2.0 * std::sqrt(w));
    return std::exp(-std::log(R) * t * t / 24.0);
}

Curve tau_curve(double c, int points, double lo, double hi) {
    if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("bad tau grid");
    double ns = moment_floor(c);
    Curve out;
    out.samples.reserve(points);
    double ratio = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        double n = ns + lo * std::exp(ratio * i);
        out.samples.push_back({n, mf_tau(c, n), mf_alpha(c, n)});
    }
    return out;
}

namespace {

// First-derivative weights at x[0] for the stencil x[0..k) (Fornberg).
void derivative_weights(const double* x, int k, double x0, double* w) {
    double c[5][5] = {};
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < k; ++i) {
        int mn = std::min(i, 1);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int s = mn; s >= 1; --s) c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int s = mn; s >= 1; --s) c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    for (int i = 0; i < k; ++i) w[i] = c[i][1];
}

}  // namespace

Curve legendre_numeric(const Curve& tau_curve) {
    const auto& s = tau_curve.samples;
    const int n = static_cast<int>(s.size());
    if (n < 9) throw InsufficientDataError("legendre_numeric needs at least 9 samples");
    for (int i = 1; i < n; ++i)
        if (!(s[i].x > s[i - 1].x)) throw DomainError("curve abscissas must be strictly increasing");

    std::vector<double> slope(n);
    for (int i = 0; i < n; ++i) {
        int start = std::clamp(i - 2, 0, n - 5);
        double xs[5], w[5];
        for (int k = 0; k < 5; ++k) xs[k] = s[start + k].x;
        derivative_weights(xs, 5, s[i].x, w);
        double d = 0.0;
        for (int k = 0; k < 5; ++k) d += w[k] * s[start + k].value;
        slope[i] = d;
    }

    double scale = 0.0;
    for (double v : slope) scale = std::max(scale, std::abs(v));
    double tol = 1e-9 * std::max(1.0, scale);
    double dir = slope[n - 1] - slope[0];
    for (int i = 1; i < n; ++i) {
        double step = slope[i] - slope[i - 1];
        if (step * dir < 0.0 && std::abs(step) > tol)
            throw ConvexityError("slopes not monotone near x = " + std::to_string(s[i].x));
    }

    Curve out;
    out.samples.reserve(n);
    for (int i = 0; i < n; ++i) out.samples.push_back({slope[i], slope[i] * s[i].x - s[i].value, s[i].x});
    std::stable_sort(out.samples.begin(), out.samples.end(),
                     [](const CurveSample& a, const CurveSample& b) { return a.x < b.x; });
    std::vector<CurveSample> merged;
    for (const auto& p : out.samples) {
        if (!merged.empty() && std::abs(p.x - merged.back().x) <= 1e-12 * std::max(1.0, std::abs(p.x))) continue;
        merged.push_back(p);
    }
    out.samples = std::move(merged);
    return out;
}

}  // namespace kpz
