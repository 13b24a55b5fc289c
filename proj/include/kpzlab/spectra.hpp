#pragma once

// Multifractal spectra of harmonic measure for a conformally invariant
// boundary of central charge c.

#include <optional>
#include <span>
#include <vector>

namespace kpz {

struct SpectrumPoint {
    double alpha;
    double f;
    std::optional<double> lambda;
    double theta;  // pi / alpha
};

struct MomentOrder {
    double n;
    double p = 0.0;
};

struct CurveSample {
    double x;
    double value;
    double derivative;
};

/// Ordered samples, abscissas strictly increasing.
struct Curve {
    std::vector<CurveSample> samples;
};

enum class PolyKind { Generic, BrownianCut, SAWStar };

struct TypicalSingularities {
    double alpha_hat;
    double theta_hat;
    double d_m;
};

struct RareSites {
    double n_star;
    double tau_star;
};

/// n* = -(1-c)/24, the lowest admissible moment order.
double moment_floor(double c);

/// b = (25-c)/12.
double spectrum_b(double c);

double mf_tau(double c, double n);
double mf_dimension(double c, double n);
double mf_alpha(double c, double n);
double mf_spectrum(double c, double alpha);

double mixed_spectrum(double c, double alpha, double lambda);
double mixed_tau(double c, double n, double p);

double ep_dimension(double c, double lambda = 0.0);

double wedge_spectrum(double c, double theta, double lambda = 0.0);

/// f_m(alpha_1..alpha_m; lambda), m = alphas.size().
double poly_spectrum(double c, std::span<const double> alphas, double lambda = 0.0,
                     PolyKind kind = PolyKind::Generic);

/// Closed form of the m-arm spectrum maximized over its trailing m - p
/// arguments; `alphas` holds the p retained ones.
double poly_marginal(double c, int m, std::span<const double> alphas, double lambda = 0.0,
                     PolyKind kind = PolyKind::Generic);

TypicalSingularities typical_singularities(double c, int m);

/// Numeric Legendre transform of a sampled tau(n): returns (alpha, f, n)
/// samples sorted by alpha.
Curve legendre_numeric(const Curve& tau_curve);

/// tau(n) on the default grid: 257 points geometric in n - n* over [1e-4, 1e3].
Curve tau_curve(double c, int points = 257, double lo = 1e-4, double hi = 1e3);

RareSites rare_site_exponent(double c);

double alpha_density(double c, double alpha, double R);

}  // namespace kpz
