#include <cmath>
#include <vector>

#include "doctest.h"
#include "kpzlab/algebra.hpp"
#include "kpzlab/errors.hpp"
#include "kpzlab/models.hpp"

using namespace kpz;

namespace {
bool close(double a, double b, double rel = 1e-12) {
    return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}
}  // namespace

TEST_CASE("central charge and susceptibility") {
    CHECK(close(c_of_gamma(-0.5), 0.0));
    CHECK(c_of_gamma(0.0) == 1.0);
    CHECK(close(c_of_gamma(-1.0), -2.0));
    CHECK_THROWS_AS(c_of_gamma(1.0), DomainError);

    CHECK(close(gamma_of_c(0.0, Branch::Negative), -0.5));
    CHECK(close(gamma_of_c(0.0, Branch::Positive), 1.0 / 3.0));
    CHECK(gamma_of_c(1.0, Branch::Negative) == 0.0);
    CHECK(gamma_of_c(1.0, Branch::Positive) == 0.0);
    CHECK_THROWS_AS(gamma_of_c(1.5, Branch::Negative), DomainError);

    for (double c : {-5.0, -2.0, 0.0, 0.5, 0.7, 1.0}) {
        double g = gamma_of_c(c, Branch::Negative), gp = gamma_of_c(c, Branch::Positive);
        CHECK(g <= 0.0);
        CHECK(gp >= 0.0);
        CHECK(close((1 - g) * (1 - gp), 1.0));
        CHECK(close(c_of_gamma(g), c));
        CHECK(close(c_of_gamma(gp), c));
    }
}

TEST_CASE("kpz map and inverse") {
    CHECK(close(kpz_map(-0.5, 0.75), 5.0 / 8.0));
    CHECK(kpz_map(-0.5, 0.0) == 0.0);
    CHECK(close(kpz_map(-0.5, 1.5), 2.0));

    CHECK(close(kpz_inverse(-0.5, 1.0), 1.0));
    CHECK(close(kpz_inverse(-0.5, 3.0), (std::sqrt(73.0) - 1.0) / 4.0));
    CHECK(kpz_inverse(-0.5, 0.0) == 0.0);
    CHECK_THROWS_AS(kpz_inverse(-0.5, -1.0), DomainError);

    CHECK(close(bulk_from_boundary_qg(-0.5, 1.5), 2.0 / 3.0));
    CHECK(close(bulk_from_boundary_qg(-0.5, 0.5), 0.0));
    CHECK(close(bulk_from_boundary_qg(-0.5, 2.0), 1.25));
}

TEST_CASE("round trips of both parametrizations") {
    for (double g : {-2.0, -1.0, -0.5, -0.25, 0.0})
        for (int i = 0; i <= 1000; ++i) {
            double x = 0.01 * i;
            double back = kpz_map(g, kpz_inverse(g, x));
            CHECK(std::abs(back - x) <= 1e-12 * std::max(x, 1e-300) + 1e-300);
        }
    for (double k : {2.0, 8.0 / 3.0, 3.0, 4.0, 6.0, 8.0})
        for (int i = 0; i <= 1000; ++i) {
            double x = 0.01 * i;
            double back = sle_kpz(k, sle_kpz_inverse(k, x));
            CHECK(std::abs(back - x) <= 1e-12 * std::max(x, 1.0));
        }
}

TEST_CASE("shift relation between U and V inverses") {
    for (double g : {-2.0, -0.5, 0.0})
        for (double x : {0.0, 0.3, 1.0, 7.5})
            CHECK(close(kpz_inverse(g, x), 0.5 * v_inverse(g, x) + 0.5 * g));
}

TEST_CASE("sle maps agree with gamma maps") {
    for (double k : {1.0, 2.0, 8.0 / 3.0, 3.0, 4.0})
        for (double d : {0.0, 0.4, 1.0, 2.5}) CHECK(close(sle_kpz(k, d), kpz_map(1.0 - 4.0 / k, d)));
    // for kappa >= 4 the SLE map is U at the dual root gamma' = 1 - 4/kappa
    for (double k : {4.0, 6.0, 8.0, 12.0})
        for (double d : {0.0, 0.4, 1.0, 2.5}) CHECK(close(sle_kpz(k, d), kpz_map(1.0 - 4.0 / k, d)));

    CHECK(close(sle_kpz_inverse(6.0, 0.0), 1.0 / 3.0));
    for (double k : {1.0, 2.0, 4.0}) CHECK(sle_kpz_inverse(k, 0.0) == 0.0);
    CHECK(close(sle_kpz(8.0 / 3.0, 2.0), 10.0 / 3.0));

    CHECK(close(sle_bulk(8.0 / 3.0, 2.0), 1.25));
    for (double k : {2.0, 6.0, 8.0}) {
        CHECK(std::abs(sle_bulk(k, (k - 4.0) / k)) < 1e-15);
        CHECK(std::abs(sle_bulk(k, -(k - 4.0) / k)) < 1e-15);
    }
    CHECK(close(sle_bulk(6.0, 2.0 / 3.0), 0.25));
    for (double k : {2.0, 6.0})
        for (double d : {0.2, 1.3}) CHECK(close(sle_v(k, d), sle_kpz(k, 0.5 * (d + 1.0 - 4.0 / k))));
}

TEST_CASE("dual weights") {
    auto d = dual_weight(-0.5, -0.5);
    CHECK(close(d.gamma_dual, 1.0 / 3.0));
    CHECK(d.delta_dual == 0.0);
    d = dual_weight(-0.5, 1.0);
    CHECK(close(d.delta_dual, 1.0));
    d = dual_weight(-0.5, 1.5);
    CHECK(close(d.delta_dual, 4.0 / 3.0));
    CHECK(close(1.5 * d.delta_dual, kpz_map(-0.5, 1.5)));

    for (double g : {-2.0, -1.0, -0.5, -0.1})
        for (double delta : {-0.3, 0.0, 0.7, 2.0}) {
            auto once = dual_weight(g, delta);
            auto twice = dual_weight(once.gamma_dual, once.delta_dual);
            CHECK(close(twice.gamma_dual, g));
            CHECK(close(twice.delta_dual, delta));
            CHECK(close(kpz_map(g, delta), delta * once.delta_dual));
            CHECK(close(kpz_map(g, delta), kpz_map(once.gamma_dual, once.delta_dual)));
        }
}

TEST_CASE("Kac weights") {
    CHECK(close(kac_weight(-0.5, {1, 4}), 1.0));
    CHECK(close(kac_weight(-0.5, {1, 4}), brownian_zeta(1.0, Locus::Boundary)));
    for (double g : {-1.0, -0.5, 0.0}) CHECK(std::abs(kac_weight(g, {1, 1})) < 1e-15);
    CHECK(close(kac_weight(-0.5, {0, 2}), 5.0 / 8.0));

    for (double g : {-2.0, -0.5, -0.25}) {
        double gp = dual_weight(g, 0.0).gamma_dual;
        for (int p = 1; p <= 6; ++p)
            for (int q = 1; q <= 6; ++q)
                CHECK(close(kac_weight(gp, {double(p), double(q)}), kac_weight(g, {double(q), double(p)})));
    }
    for (double k : {2.0, 8.0 / 3.0, 6.0})
        for (int p = 1; p <= 4; ++p)
            for (int q = 0; q <= 3; ++q) {
                KacIndex idx{double(p), double(q)};
                CHECK(close(sle_kpz(k, sle_kac_qg_weight(k, idx)), sle_kac_weight(k, idx)));
            }
}

TEST_CASE("fusion") {
    std::vector<double> ones{1.0, 1.0};
    CHECK(close(fuse_boundary(8.0 / 3.0, ones), 10.0 / 3.0));
    CHECK(close(fuse_bulk(8.0 / 3.0, ones), 1.25));
    std::vector<double> three{1.0, 1.0, 1.0};
    CHECK(close(fuse_bulk(8.0 / 3.0, three), 35.0 / 12.0));
    for (double k : {2.0, 6.0}) {
        std::vector<double> single{0.7};
        CHECK(close(fuse_boundary(k, single), 0.7));
    }
    std::vector<double> zeros2{0.0, 0.0}, zeros3{0.0, 0.0, 0.0};
    CHECK(close(fuse_boundary(6.0, zeros2), 1.0 / 3.0));
    CHECK(close(fuse_bulk(6.0, zeros3), 2.0 / 3.0));

    std::vector<double> a{0.3, 1.2, 2.0}, b{2.0, 0.3, 1.2};
    CHECK(fuse_boundary(6.0, a) == fuse_boundary(6.0, b));
}

TEST_CASE("additivity frame") {
    // dilute: quantum boundary weights add; dense: their duals add
    double g = -0.5;  // c = 0
    for (double x1 : {0.25, 1.0, 2.0})
        for (double x2 : {0.5, 5.0 / 8.0, 3.0}) {
            std::vector<double> xs{x1, x2};
            double direct = kpz_map(g, kpz_inverse(g, x1) + kpz_inverse(g, x2));
            CHECK(close(fuse_boundary(8.0 / 3.0, xs), direct));

            double gp = dual_weight(g, 0.0).gamma_dual;
            // dense weights Delta_i with duals Delta'_i; the fused Delta has dual sum Delta'_1 + Delta'_2
            double d1 = g + (1 - g) * kpz_inverse(gp, x1), d2 = g + (1 - g) * kpz_inverse(gp, x2);
            CHECK(close(kpz_map(g, d1), x1));
            double dual_sum = dual_weight(g, d1).delta_dual + dual_weight(g, d2).delta_dual;
            double fused = g + (1 - g) * dual_sum;
            CHECK(close(fuse_boundary(6.0, xs), kpz_map(g, fused)));
        }
}

TEST_CASE("short-distance exponents") {
    CHECK(close(sde_exponent(6.0, 1.0 / 3.0, 1.0 / 3.0, Locus::Boundary), 4.0 / 3.0));
    for (double k : {2.0, 8.0 / 3.0, 4.0}) CHECK(sde_exponent(k, 0.0, 1.3, Locus::Boundary) == 0.0);
    CHECK(close(sde_exponent(6.0, 0.0, 0.0, Locus::Bulk), 0.25));
    for (double k : {2.0, 8.0 / 3.0, 6.0, 8.0}) {
        double c = model_point(ByKappa{k}).c;
        CHECK(close(sde_exponent(k, 0.0, 0.0, Locus::Bulk) - 0.25 * k * sle_kpz_inverse(k, 0) * sle_kpz_inverse(k, 0),
                    (1.0 - c) / 12.0));
        // boundary sde = fused minus parts
        std::vector<double> xs{0.4, 1.1};
        CHECK(close(sde_exponent(k, 0.4, 1.1, Locus::Boundary), fuse_boundary(k, xs) - 0.4 - 1.1));
    }
}

TEST_CASE("phase data") {
    auto d = phase_data(-0.5, Phase::Dilute);
    CHECK(d.delta0_boundary == 0.0);
    CHECK(d.nu == 1.0);
    for (double g : {-2.0, -0.5, -0.1, 0.0}) {
        auto p = phase_data(g, Phase::Dense);
        CHECK(p.delta0_boundary == g);
        CHECK(close(1.0 / p.nu, 1.0 - p.delta0_boundary));
    }
}
