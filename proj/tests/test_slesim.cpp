#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kpzlab/errors.hpp"
#include "kpzlab/slesim.hpp"

using namespace kpz;
using C = std::complex<double>;

namespace {

LoewnerDrive manual_drive(double dt, std::vector<double> inc) {
    LoewnerDrive d;
    d.dt = dt;
    d.increments = std::move(inc);
    return d;
}

C root_up(C z) {
    C r = std::sqrt(z);
    return r.imag() < 0 ? -r : r;
}

// Chordal trace by direct composition of z -> w + sqrt((z - w)^2 - 4 dt).
std::vector<C> naive_chordal(const LoewnerDrive& d) {
    const std::size_t n = d.steps();
    std::vector<double> w(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) w[k] = w[k - 1] + d.increments[k - 1];
    std::vector<C> out(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        C z = w[k] + C(0, 2 * std::sqrt(d.dt));
        for (std::size_t j = k - 1; j >= 1; --j) z = w[j] + root_up((z - w[j]) * (z - w[j]) - 4 * d.dt);
        out[k] = z;
    }
    return out;
}

// Radial trace built in the unit disk (target 0, root -1) and mapped to the
// upper half plane.  The inverse radial slit map at -1 is the unique map onto
// the disk minus a radial slit fixing 0 with derivative e^{-dt} there; seen
// through the Cayley map it is z -> sqrt(e^{-dt} z^2 - h^2).
C to_disk(C w) { return (w - C(0, 1)) / (w + C(0, 1)); }
C to_half(C z) { return C(0, 1) * (1.0 + z) / (1.0 - z); }

std::vector<C> naive_radial(const LoewnerDrive& d) {
    const std::size_t n = d.steps();
    const double e = std::exp(-d.dt), h = std::sqrt(1 - e);
    auto slit_inverse = [&](C z) {
        const C w = to_half(z);
        return to_disk(root_up(e * w * w - h * h));
    };
    std::vector<C> out(n + 1, 0.0);
    std::vector<double> angle(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) angle[k] = angle[k - 1] + d.increments[k - 1];
    for (std::size_t k = 1; k <= n; ++k) {
        // tip of the k-th slit, rotated into place, then pulled back
        C z = std::polar(1.0, angle[k]) * to_disk(C(0, h));
        for (std::size_t j = k - 1; j >= 1; --j) {
            z = std::polar(1.0, -angle[j]) * z;
            z = slit_inverse(z);
            z = std::polar(1.0, angle[j]) * z;
        }
        out[k] = to_half(z);
    }
    return out;
}

Trace spiral(double lambda, std::size_t n) {
    // z(u) = e^{-u + i lambda u}, tip at the origin
    Trace t;
    for (std::size_t k = 0; k <= n; ++k) {
        const double u = 20.0 * double(k) / double(n);
        t.points.push_back(std::exp(C(-u, lambda * u)));
        t.capacities.push_back(u);
    }
    t.points.push_back(0.0);
    t.capacities.push_back(21.0);
    return t;
}

void koch(C a, C b, int level, std::vector<C>& out) {
    if (level == 0) {
        out.push_back(b);
        return;
    }
    const C d = (b - a) / 3.0;
    const C p = a + d, q = a + 2.0 * d, r = p + d * std::polar(1.0, std::numbers::pi / 3);
    koch(a, p, level - 1, out);
    koch(p, r, level - 1, out);
    koch(r, q, level - 1, out);
    koch(q, b, level - 1, out);
}

}  // namespace

TEST_CASE("drive increments") {
    auto d = sample_drive(6.0, 1.0 / 1024, 4096, 3);
    CHECK(d.steps() == 4096);
    for (double v : d.increments) CHECK(std::abs(std::abs(v) - std::sqrt(6.0 / 1024)) < 1e-15);
    double sum = 0;
    for (double v : d.increments) sum += v;
    CHECK(std::abs(sum) / std::sqrt(6.0 / 1024) < 4 * std::sqrt(4096.0));

    auto g = sample_drive(2.0, 0.01, 20000, 5, DriveMode::Gaussian);
    double m2 = 0;
    for (double v : g.increments) m2 += v * v;
    // chi-square with 20000 degrees of freedom, about 5 sigma
    const double chi = m2 / (2.0 * 0.01);
    CHECK(std::abs(chi - 20000) < 5 * std::sqrt(2 * 20000.0));

    auto a = sample_drive(6.0, 0.01, 100, 9, DriveMode::Binomial, 4);
    auto b = sample_drive(6.0, 0.01, 100, 9, DriveMode::Binomial, 4);
    auto c = sample_drive(6.0, 0.01, 100, 9, DriveMode::Binomial, 5);
    CHECK(a.increments == b.increments);
    CHECK(a.increments != c.increments);
    CHECK_THROWS_AS(sample_drive(-1.0, 0.01, 10, 0), ConfigError);
    CHECK_THROWS_AS(sample_drive(1.0, 0.0, 10, 0), ConfigError);
    CHECK_THROWS_AS(sample_drive(1.0, 0.01, 0, 0), ConfigError);
}

TEST_CASE("inverse slit map") {
    // maps the tip of the slit's image back onto the slit
    CHECK(std::abs(inverse_slit(C(0.3, 0), 0.3, 0.25) - C(0.3, 1.0)) < 1e-15);
    // points on either side of the root go to the two sides of the slit base
    CHECK(inverse_slit(C(1.5, 0), 0.0, 0.25).real() > 0);
    CHECK(inverse_slit(C(-1.5, 0), 0.0, 0.25).real() < 0);
    // far away the map is close to the identity
    C z(40, 30);
    CHECK(std::abs(inverse_slit(z, 0.0, 0.25) - (z - 0.5 / z)) < 1e-5);
}

TEST_CASE("chordal trace: exact slits") {
    const double dt = 1.0 / 64;
    auto t = trace_from_drive(manual_drive(dt, std::vector<double>(64, 0.0)));
    for (std::size_t k = 0; k <= 64; ++k) CHECK(std::abs(t.points[k] - C(0, 2 * std::sqrt(k * dt))) < 1e-9);
    CHECK(t.capacities[64] == doctest::Approx(1.0));

    std::vector<double> inc(64, 0.0);
    inc[0] = 0.7;
    auto s = trace_from_drive(manual_drive(dt, inc));
    CHECK(s.points[0] == C(0, 0));
    for (std::size_t k = 1; k <= 64; ++k) CHECK(std::abs(s.points[k] - C(0.7, 2 * std::sqrt(k * dt))) < 1e-9);

    auto one = trace_from_drive(manual_drive(0.04, {-0.3}));
    CHECK(std::abs(one.points[1] - C(-0.3, 0.4)) < 1e-15);
}

TEST_CASE("chordal trace agrees with direct composition") {
    for (auto mode : {DriveMode::Binomial, DriveMode::Gaussian}) {
        auto d = sample_drive(6.0, 1.0 / 300, 300, 21, mode);
        auto t = trace_from_drive(d);
        auto ref = naive_chordal(d);
        double err = 0;
        for (std::size_t k = 0; k <= 300; ++k) err = std::max(err, std::abs(t.points[k] - ref[k]));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("chordal trace symmetries") {
    auto d = sample_drive(4.0, 1.0 / 256, 256, 8, DriveMode::Gaussian);
    auto t = trace_from_drive(d);

    auto r = d;
    for (auto& v : r.increments) v = -v;
    auto tr = trace_from_drive(r);
    for (std::size_t k = 0; k <= 256; ++k) CHECK(std::abs(tr.points[k] - std::conj(-t.points[k])) < 1e-10);

    // Brownian scaling: dt -> a^2 dt, W -> a W scales the trace by a
    const double a = 3.0;
    auto sc = d;
    sc.dt *= a * a;
    for (auto& v : sc.increments) v *= a;
    auto ts = trace_from_drive(sc);
    for (std::size_t k = 0; k <= 256; ++k) CHECK(std::abs(ts.points[k] - a * t.points[k]) < 1e-9);
}

TEST_CASE("radial trace") {
    const double dt = 1.0 / 16;
    auto t = trace_from_drive(manual_drive(dt, std::vector<double>(128, 0.0)), LoewnerKind::Radial);
    for (std::size_t k = 0; k <= 128; ++k)
        CHECK(std::abs(t.points[k] - C(0, std::sqrt(1 - std::exp(-double(k) * dt)))) < 1e-12);

    auto d = sample_drive(6.0, 1.0 / 32, 200, 4, DriveMode::Gaussian);
    auto tr = trace_from_drive(d, LoewnerKind::Radial);
    auto ref = naive_radial(d);
    double err = 0;
    for (std::size_t k = 0; k <= 200; ++k) err = std::max(err, std::abs(tr.points[k] - ref[k]));
    CHECK(err < 1e-9);

    // Koebe quarter theorem: after log-capacity T every trace point stays at
    // disk distance >= e^{-T}/4 from the target, and the hull reaches e^{-T}
    const double T = 200 / 32.0;
    double closest = 1e9;
    for (auto z : tr.points) closest = std::min(closest, std::abs(to_disk(z)));
    CHECK(closest >= 0.25 * std::exp(-T) * (1 - 1e-9));
    CHECK(closest <= 2.0 * std::exp(-T));
}

TEST_CASE("sample_traces is deterministic") {
    SleConfig c;
    c.kappa = 3.0;
    c.steps = 128;
    c.traces = 6;
    c.seed = 17;
    c.threads = 1;
    auto a = sample_traces(c);
    c.threads = 3;
    auto b = sample_traces(c);
    for (std::size_t i = 0; i < 6; ++i) CHECK(a[i].points == b[i].points);
    auto d = trace_from_drive(sample_drive(3.0, 1.0 / 128, 128, 17, DriveMode::Binomial, 4));
    CHECK(d.points == a[4].points);
    CHECK(a[0].points != a[1].points);
    c.traces = 0;
    CHECK_THROWS_AS(sample_traces(c), ConfigError);
}

TEST_CASE("self-touching appears only above kappa 4") {
    // distance between parts of the trace far apart in time, in units of the
    // typical step: dense-phase traces come back to themselves
    auto ratio = [](double kappa) {
        SleConfig c;
        c.kappa = kappa;
        c.steps = 1024;
        c.traces = 8;
        c.seed = 2;
        double sum = 0;
        for (const auto& t : sample_traces(c)) {
            double step = 0;
            for (std::size_t i = 1; i < t.points.size(); ++i) step += std::abs(t.points[i] - t.points[i - 1]);
            step /= double(t.points.size() - 1);
            sum += min_separated_distance(t, 128) / step;
        }
        return sum / 8;
    };
    const double low = ratio(2.0), high = ratio(8.0);
    CHECK(low > 4 * high);
}

TEST_CASE("winding statistics") {
    std::vector<Trace> sp(30, spiral(0.8, 20000));
    auto w = winding_statistics(sp, {0.5, 1e-6, 1});
    CHECK(w.samples == 30);
    CHECK(w.mean_slope.exponent == doctest::Approx(0.8).epsilon(0.01));
    for (double v : w.variances) CHECK(v < 1e-10);
    CHECK(std::abs(w.slope.exponent) < 1e-12);

    std::vector<Trace> line(30, trace_from_drive(manual_drive(1.0 / 512, std::vector<double>(512, 0.0))));
    auto l = winding_statistics(line);
    for (double v : l.variances) CHECK(v < 1e-18);
    for (double m : l.means) CHECK(std::abs(m) < 1e-12);
    if (l.scales.size() < 5) CHECK(l.increment_slope.points == 0);
    CHECK(w.increment_slope.points > 0);
    CHECK(std::abs(w.increment_slope.exponent) < 1e-6);

    std::vector<Trace> few(29, line[0]);
    CHECK_THROWS_AS(winding_statistics(few), InsufficientDataError);
}

TEST_CASE("radial winding variance grows like kappa ln R") {
    SleConfig c;
    c.kappa = 4.0;
    c.kind = LoewnerKind::Radial;
    c.steps = 512;
    c.dt = 1.0 / 32;
    c.traces = 1000;
    c.seed = 5;
    auto w = winding_statistics(sample_traces(c), {0.25, std::exp(-double(c.steps) * c.dt + 3.5), 1});
    CHECK(std::abs(w.slope.exponent - 4.0) < 0.1 * 4.0);
    CHECK(std::abs(w.slope.exponent - 4.0) < 4 * w.slope.std_error);
    CHECK(std::abs(w.mean_slope.exponent) < 4 * w.mean_slope.std_error + 0.05);
}

TEST_CASE("box-counting dimension") {
    auto seg = trace_from_drive(manual_drive(1.0 / 4096, std::vector<double>(4096, 0.0)));
    auto f = trace_dimension({seg, seg});
    CHECK(f.exponent == doctest::Approx(1.0).epsilon(0.02));
    CHECK(f.std_error < 1e-12);

    Trace k;
    k.points.push_back(0.0);
    koch(0.0, 1.0, 7, k.points);
    k.capacities.assign(k.points.size(), 0.0);
    auto fk = trace_dimension({k}, {1.0 / 9, 1.0 / 2187});
    CHECK(std::abs(fk.exponent - std::log(4.0) / std::log(3.0)) < 0.02);

    CHECK_THROWS_AS(trace_dimension({seg}, {0.1, 0.01}), InsufficientDataError);
    CHECK_THROWS_AS(trace_dimension({}), InsufficientDataError);
}
