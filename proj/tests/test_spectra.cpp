#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kpzlab/algebra.hpp"
#include "kpzlab/errors.hpp"
#include "kpzlab/spectra.hpp"

using namespace kpz;
using std::numbers::pi;

namespace {
bool close(double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

const double charges[] = {-2.0, 0.0, 0.5, 1.0};

// maximize a concave function of one variable on (lo, hi) by golden section
template <class F>
double golden_max(F f, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi, x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 200; ++i) {
        if (f1 < f2) {
            a = x1, x1 = x2, f1 = f2, x2 = a + r * (b - a), f2 = f(x2);
        } else {
            b = x2, x2 = x1, f2 = f1, x1 = b - r * (b - a), f1 = f(x1);
        }
    }
    return f(0.5 * (a + b));
}
}  // namespace

TEST_CASE("tau, D and alpha") {
    CHECK(mf_tau(0, 1) == 0.0);
    CHECK(close(mf_tau(0, 2), 11.0 / 12.0));
    CHECK(close(mf_tau(1, 4), 2.5));
    CHECK(close(mf_dimension(0, 0), 4.0 / 3.0));
    CHECK(close(mf_dimension(0, -1.0 / 24), 1.5));
    CHECK(std::abs(mf_dimension(0.5, 1e14) - 0.5) < 1e-6);
    CHECK(close(mf_alpha(0, 1), 1.0));
    CHECK(close(mf_alpha(0, 0), 3.0));
    CHECK(close(mf_alpha(1, 0.25), 1.5));
    CHECK_THROWS_AS(mf_tau(0, -0.05), MomentOutOfRange);
    CHECK_THROWS_AS(mf_alpha(0, -0.05), MomentOutOfRange);

    for (double c : charges) {
        CHECK(mf_dimension(c, 1) == 1.0);
        CHECK(mf_tau(c, 1) == 0.0);
        // the closed form against the paper's radical form
        for (double n : {-0.02, 0.0, 0.3, 2.0, 9.0}) {
            if (n < moment_floor(c)) continue;
            double r = std::sqrt((24 * n + 1 - c) / (25 - c));
            CHECK(close(mf_tau(c, n), 0.5 * (n - 1) + (25 - c) / 24 * (r - 1)));
            double D = mf_dimension(c, n);
            CHECK(D > 0.5);
            CHECK(D <= 1.5 + 1e-15);
            if (n != 1) CHECK(close(D, mf_tau(c, n) / (n - 1)));
            if (n > moment_floor(c)) CHECK(close(3 - 2 * D, 1 / mf_alpha(c, n)));
        }
        // convex in n, alpha decreasing
        double prev = mf_alpha(c, moment_floor(c) + 1e-3);
        for (int i = 1; i < 50; ++i) {
            double n = moment_floor(c) + 1e-3 + 0.2 * i;
            double a = mf_alpha(c, n);
            CHECK(a < prev);
            prev = a;
            double h = 1e-3;
            CHECK(mf_tau(c, n + h) + mf_tau(c, n - h) - 2 * mf_tau(c, n) <= 1e-14);
        }
    }
}

TEST_CASE("f(alpha)") {
    for (double c : charges) CHECK(close(mf_spectrum(c, 1), 1.0));
    CHECK(close(mf_spectrum(0, 3), 4.0 / 3.0));
    CHECK_THROWS_AS(mf_spectrum(0, 0.5), DomainError);
    // Ising: sup = 11/8
    CHECK(close(golden_max([](double a) { return mf_spectrum(0.5, a); }, 0.51, 50), 11.0 / 8.0, 1e-10));
    for (double c : charges) {
        if (c < 1) CHECK(close(golden_max([c](double a) { return mf_spectrum(c, a); }, 0.51, 1e3), ep_dimension(c), 1e-9));
        // paper's original form
        for (double a : {0.6, 1.0, 2.0, 7.0})
            CHECK(close(mf_spectrum(c, a), (25 - c) / 48 * (3 - 1 / (2 * a - 1)) - (1 - c) / 24 * a));
    }
}

TEST_CASE("Legendre duality, invariance symmetry") {
    for (double c : charges)
        for (double n : {-0.03, 0.0, 0.25, 1.0, 2.0, 5.0, 9.0}) {
            if (!(n > moment_floor(c))) continue;
            double a = mf_alpha(c, n);
            CHECK(close(a * n - mf_tau(c, n), mf_spectrum(c, a), 1e-10));
        }
    for (double c : charges)
        for (double a : {0.55, 0.8, 1.0, 1.7, 3.0, 12.0}) {
            double ap = 0.5 + 0.25 / (a - 0.5);  // (2a-1)(2a'-1) = 1
            CHECK(close(mf_spectrum(c, a) - a, mf_spectrum(c, ap) - ap, 1e-9));
        }
    // D(n) + D(n') = 2 for the orders of paired alphas
    for (double c : charges)
        for (double n : {0.0, 0.5, 2.0, 4.0}) {
            if (!(n > moment_floor(c))) continue;
            double a = mf_alpha(c, n);
            double ap = 0.5 + 0.25 / (a - 0.5);
            // invert alpha(n') = ap
            double r = 0.5 / (ap - 0.5);
            double np = (r * r * (25 - c) - 1 + c) / 24;
            CHECK(close(mf_dimension(c, n) + mf_dimension(c, np), 2.0, 1e-9));
        }
}

TEST_CASE("asymptote of f/alpha") {
    // at alpha = 1e6 the 1/alpha correction is still 1.6e-6; 1e7 is inside 1e-6
    for (double c : charges) {
        double a = 1e7;
        CHECK(std::abs(mf_spectrum(c, a) / a - moment_floor(c)) < 1e-6);
    }
}

TEST_CASE("mixed spectra") {
    CHECK(close(mixed_spectrum(0, 3, 0), 4.0 / 3.0));
    for (double c : charges) {
        for (double n : {0.0, 1.0, 3.0}) CHECK(mixed_tau(c, n, 0) == mf_tau(c, n));
        for (double a : {0.7, 1.0, 3.0, 20.0}) {
            CHECK(mixed_spectrum(c, a, 0) == mf_spectrum(c, a));
            for (double l : {0.1, 0.5, 1.0, 2.0}) {
                double s = 1 + l * l;
                double a2 = a * s;  // keep inside the domain
                CHECK(close(mixed_spectrum(c, a2, l), s * mf_spectrum(c, a2 / s) - spectrum_b(c) * l * l, 1e-10));
            }
        }
    }
    for (double l : {0.0, 0.5, 1.0})
        CHECK(std::abs(mixed_spectrum(1, 1e9, l) - (1.5 - 0.5 * l * l)) < 1e-6);
    CHECK_THROWS_AS(mixed_spectrum(0, 0.9, 1.0), DomainError);

    // sup over lambda at lambda = 0
    for (double c : charges)
        for (double a : {1.0, 3.0, 8.0}) {
            double f0 = mixed_spectrum(c, a, 0);
            for (int i = 1; i <= 20; ++i) {
                double l = 0.05 * i;
                if (2 * a - 1 - l * l > 0) CHECK(mixed_spectrum(c, a, l) < f0);
            }
        }
}

TEST_CASE("EP dimension parabola") {
    CHECK(close(ep_dimension(0), 4.0 / 3.0));
    CHECK(close(ep_dimension(1), 1.5));
    CHECK(close(ep_dimension(0, 1), 7.0 / 12.0));
    for (double c : charges) {
        double b = spectrum_b(c);
        for (double l : {0.0, 0.3, 1.0, 1.7}) {
            CHECK(close(ep_dimension(c, l), (1 + l * l) * ep_dimension(c) - b * l * l));
            CHECK(ep_dimension(c, l) <= ep_dimension(c));
            // sup over alpha of the mixed spectrum
            if (c < 1) {
                double s = 1 + l * l;
                double sup = golden_max([&](double a) { return mixed_spectrum(c, a, l); }, 0.5 * s + 1e-9, 1e4);
                CHECK(close(sup, ep_dimension(c, l), 1e-8));
            }
        }
    }
}

TEST_CASE("wedge spectrum") {
    for (double c : charges) CHECK(close(wedge_spectrum(c, pi), 1.0));
    CHECK(close(wedge_spectrum(0, pi / 3), 4.0 / 3.0));
    CHECK(std::abs(wedge_spectrum(1, 1e-9) - 1.5) < 1e-6);
    for (double c : charges)
        for (double l : {0.0, 0.4, 1.0})
            for (double th : {0.2, 1.0, 2.0}) {
                if (!(th < 2 * pi / (1 + l * l))) continue;
                if (!(pi / th > 0.5 * (1 + l * l))) continue;
                CHECK(close(wedge_spectrum(c, th, l), mixed_spectrum(c, pi / th, l), 1e-10));
                // paper's lambda = 0 form
                if (l == 0.0)
                    CHECK(close(wedge_spectrum(c, th), pi / th - (25 - c) / 12 * (pi - th) * (pi - th) / (th * (2 * pi - th)), 1e-10));
            }
    CHECK_THROWS_AS(wedge_spectrum(0, 7.0), DomainError);
    CHECK_THROWS_AS(wedge_spectrum(0, 0.0), DomainError);
}

TEST_CASE("poly spectra") {
    // permutation symmetry
    std::vector<double> a{1.2, 3.0, 5.0}, b{5.0, 1.2, 3.0};
    for (double c : {-2.0, 0.0, 0.5}) CHECK(poly_spectrum(c, a) == doctest::Approx(poly_spectrum(c, b)).epsilon(1e-14));

    // the rotating form with k^2/(8(1-gamma)) written out
    for (double c : {-2.0, 0.0, 0.5})
        for (double l : {0.0, 0.6}) {
            double g = gamma_of_c(c, Branch::Negative), bb = spectrum_b(c);
            double inv = 0, sum = 0;
            for (double x : a) inv += 0.5 / x, sum += x;
            double expect = bb - 9.0 / (8 * (1 - g)) / (1 / (1 + l * l) - inv) - 0.5 * (bb - 2) * sum;
            CHECK(close(poly_spectrum(c, a, l), expect, 1e-12));
        }

    // generalized scaling law for m = 2
    for (double c : {-2.0, 0.0, 0.5})
        for (double l : {0.3, 1.0})
            for (double a1 : {2.0, 4.0})
                for (double a2 : {3.0, 6.0}) {
                    double s = 1 + l * l;
                    std::vector<double> al{a1 * s, a2 * s}, bar{a1, a2};
                    CHECK(close(poly_spectrum(c, al, l), s * poly_spectrum(c, bar, 0) - spectrum_b(c) * l * l, 1e-10));
                }

    // sup over the second argument of f_2 is the harmonic spectrum (at c = 1
    // it is only approached as the second alpha goes to infinity)
    for (double c : {-2.0, 0.0, 0.5})
        for (double a : {0.7, 1.0, 3.0, 8.0}) {
            std::vector<double> one{a};
            CHECK(close(poly_marginal(c, 2, one), mf_spectrum(c, a), 1e-12));
            double lo = 0.5 / (1 - 0.5 / a) + 1e-9;
            double sup = golden_max([&](double x) { std::vector<double> v{a, x}; return poly_spectrum(c, v); }, lo, 1e5);
            CHECK(close(sup, mf_spectrum(c, a), 1e-8));
        }

    // numeric marginalization against the closed form for m = 3
    for (auto kind : {PolyKind::Generic, PolyKind::SAWStar, PolyKind::BrownianCut})
        for (double a1 : {2.0, 5.0}) {
            double c = 0.0;
            std::vector<double> one{a1};
            double lo = 0.5 / (1 - 0.5 / a1) + 1e-6;
            // sup over (x, y), y innermost
            auto inner = [&](double x) {
                double lo_y = 0.5 / (1 - 0.5 / a1 - 0.5 / x) + 1e-9;
                return golden_max([&](double y) { std::vector<double> v{a1, x, y}; return poly_spectrum(c, v, 0, kind); }, lo_y, 1e5);
            };
            double sup = golden_max(inner, lo + 1e-3, 1e5);
            CHECK(close(sup, poly_marginal(c, 3, one, 0, kind), 1e-7));
        }

    // Brownian cut points, c = 0
    for (double a : {0.8, 1.0, 2.5, 6.0}) {
        std::vector<double> one{a};
        double expect = 2 - 45.0 / 48 - (49.0 / 48) / (2 * a - 1) - a / 24;
        CHECK(close(poly_marginal(0, 2, one, 0, PolyKind::BrownianCut), expect, 1e-12));
    }
    // SAW star with a'' = 1 at m = 2
    std::vector<double> two{2.0, 3.0};
    double saw = poly_spectrum(0, two, 0, PolyKind::SAWStar);
    CHECK(close(saw, 25.0 / 12 - (1.0 / 3) / (1 - 0.25 - 1.0 / 6) - (1.0 / 24) * 5, 1e-12));
    CHECK_THROWS_AS(poly_spectrum(0.5, two, 0, PolyKind::SAWStar), DomainError);
    std::vector<double> bad{0.6, 0.6};
    CHECK_THROWS_AS(poly_spectrum(0, bad), DomainError);
}

TEST_CASE("typical singularities") {
    auto t = typical_singularities(0, 2);
    CHECK(close(t.d_m, 4.0 / 3.0));
    CHECK(close(t.alpha_hat, 3.0));
    CHECK(close(t.theta_hat * t.alpha_hat, pi));
    CHECK(close(typical_singularities(0, 1).d_m, 25.0 / 12 - 3.0 / 16));
    CHECK_THROWS_AS(typical_singularities(1, 2), DomainError);
    for (double c : {-2.0, 0.0, 0.5})
        for (int m = 1; m <= 4; ++m) {
            auto ts = typical_singularities(c, m);
            std::vector<double> al(m, ts.alpha_hat);
            CHECK(close(poly_spectrum(c, al), ts.d_m, 1e-12));
            // stationary: nudging one arm lowers f
            al[0] *= 1.01;
            CHECK(poly_spectrum(c, al) < ts.d_m);
        }
}

TEST_CASE("rare sites and densities") {
    CHECK(close(rare_site_exponent(0).tau_star, 23.0 / 24));
    CHECK(close(rare_site_exponent(1).tau_star, 1.0));
    CHECK(close(rare_site_exponent(-2).tau_star, 21.0 / 24));
    CHECK(close(rare_site_exponent(0).n_star, -1.0 / 24));

    for (double c : {-2.0, 0.0, 0.5}) {
        double ah = mf_alpha(c, 0);
        CHECK(close(alpha_density(c, ah, 1e3), 1.0));
        for (double a : {0.6, 1.0, 10.0}) CHECK(alpha_density(c, a, 1e3) < 1.0);
    }
    CHECK(close(mf_alpha(0, 0), 3.0));
    double w = 0.5;
    double expect = std::exp(-std::pow(std::sqrt(w) - 5 / (2 * std::sqrt(w)), 2));
    CHECK(close(alpha_density(0, 1, std::exp(24.0)), expect));
    CHECK_THROWS_AS(alpha_density(0, 0.5, 10), DomainError);
    CHECK_THROWS_AS(alpha_density(0, 1, 1), DomainError);
}

TEST_CASE("numeric Legendre transform") {
    for (double c : charges) {
        auto out = legendre_numeric(tau_curve(c));
        int checked = 0;
        for (const auto& s : out.samples) {
            if (s.x < 0.6 || s.x > 10) continue;
            CHECK(std::abs(s.value - mf_spectrum(c, s.x)) < 1e-6);
            ++checked;
        }
        CHECK(checked > 50);
        for (size_t i = 1; i < out.samples.size(); ++i) CHECK(out.samples[i].x > out.samples[i - 1].x);
    }
    // a straight line: every slope is 1 and f = 1
    Curve line;
    for (int i = 0; i < 20; ++i) line.samples.push_back({0.1 * i, 0.1 * i - 1, 1});
    auto out = legendre_numeric(line);
    REQUIRE(out.samples.size() == 1);
    CHECK(close(out.samples[0].x, 1.0, 1e-12));
    CHECK(close(out.samples[0].value, 1.0, 1e-12));

    Curve wiggly;
    for (int i = 0; i < 20; ++i) wiggly.samples.push_back({0.1 * i, std::sin(3.0 * i * 0.1), 0});
    CHECK_THROWS_AS(legendre_numeric(wiggly), ConvexityError);
    Curve short_curve;
    for (int i = 0; i < 5; ++i) short_curve.samples.push_back({double(i), double(i * i), 0});
    CHECK_THROWS_AS(legendre_numeric(short_curve), InsufficientDataError);
}
