#include "kpzlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <utility>

#include "kpzlab/harmonic.hpp"
#include "kpzlab/models.hpp"
#include "kpzlab/percsim.hpp"
#include "kpzlab/rng.hpp"
#include "kpzlab/slesim.hpp"
#include "kpzlab/spectra.hpp"
#include "kpzlab/walksim.hpp"

namespace kpz {

const char* to_string(VerifyTier t) {
    switch (t) {
    case VerifyTier::Exact: return "exact";
    case VerifyTier::Mc: return "mc";
    case VerifyTier::All: return "all";
    }
    return "?";
}

const char* to_string(Budget b) { return b == Budget::Fast ? "fast" : "full"; }

namespace {

const double charges[] = {-2.0, 0.0, 0.5, 1.0};

void check(CriterionResult& r, std::string label, double measured, double target, double tolerance, double error = 0.0) {
    Check c{std::move(label), measured, target, tolerance, error, Relation::Within, false};
    c.pass = std::abs(measured - target) <= tolerance;
    r.checks.push_back(std::move(c));
}

// relative tolerance in the sense |a - b| <= tol max(1, |b|)
void exact(CriterionResult& r, std::string label, double measured, double target, double tol = 1e-12) {
    check(r, std::move(label), measured, target, tol * std::max(1.0, std::abs(target)));
}

void bound(CriterionResult& r, std::string label, double measured, double limit, Relation rel) {
    Check c{std::move(label), measured, limit, 0.0, 0.0, rel, false};
    c.pass = rel == Relation::AtLeast ? measured >= limit : measured <= limit;
    r.checks.push_back(std::move(c));
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <class F>
double golden_max(F f, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi, x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 200; ++i) {
        if (f1 < f2) a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = f(x2);
        else b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = f(x1);
    }
    return f(0.5 * (a + b));
}

// --- exact algebra --------------------------------------------------------

void table1(CriterionResult& r) {
    struct Row {
        double q, ep, h, sc;
    };
    for (Row w : {Row{0, 5.0 / 4, 2, 5.0 / 4}, Row{1, 4.0 / 3, 7.0 / 4, 3.0 / 4}, Row{2, 11.0 / 8, 5.0 / 3, 13.0 / 24},
                  Row{3, 17.0 / 12, 8.0 / 5, 7.0 / 20}, Row{4, 3.0 / 2, 3.0 / 2, 0}}) {
        const auto d = geometry_dims(model_point(ByPotts{w.q}));
        const std::string q = fmt("Q=%g", w.q);
        exact(r, q + " D_EP", d.d_ep, w.ep);
        exact(r, q + " D_H", d.d_hull, w.h);
        exact(r, q + " D_SC", d.d_sc, w.sc);
    }
}

void brownian(CriterionResult& r) {
    exact(r, "zeta_1", brownian_zeta(1, Locus::Bulk), 1.0 / 8);
    exact(r, "boundary zeta_1", brownian_zeta(1, Locus::Boundary), 1.0);
    exact(r, "zeta_3/2", brownian_zeta(1.5, Locus::Bulk), 1.0 / 3);
    const int p21[] = {2, 1};
    exact(r, "zeta(2,1)", packet_zeta(p21, Locus::Bulk), 1.0);
    exact(r, "frontier 2 - 2 zeta_3/2", 2 - 2 * brownian_zeta(1.5, Locus::Bulk), 4.0 / 3);
}

void crossings(CriterionResult& r) {
    exact(r, "boundary x_1", perc_crossing(1, Locus::Boundary), 1.0 / 3);
    exact(r, "boundary x_2", perc_crossing(2, Locus::Boundary), 1.0);
    exact(r, "boundary x_3", perc_crossing(3, Locus::Boundary), 2.0);
    exact(r, "x_2", perc_crossing(2, Locus::Bulk), 1.0 / 4);
    exact(r, "x_3", perc_crossing(3, Locus::Bulk), 2.0 / 3);
    for (int L = 1; L <= 3; ++L)
        exact(r, fmt("2 zeta_%g = x_2L", L), 2 * brownian_zeta(L, Locus::Bulk), perc_crossing(2 * L, Locus::Bulk));
}

void harmonic_landmarks(CriterionResult& r) {
    exact(r, "D(2; c=0)", mf_dimension(0, 2), 11.0 / 12);
    exact(r, "D(0; c=0)", mf_dimension(0, 0), 4.0 / 3);
    exact(r, "beta", cpa_beta(0), 11.0 / 16);
    exact(r, "tau*", rare_site_exponent(0).tau_star, 23.0 / 24);
    for (double c : charges) exact(r, fmt("f(1; c=%g)", c), mf_spectrum(c, 1), 1.0);
    exact(r, "f(3; c=0)", mf_spectrum(0, 3), 4.0 / 3);
}

void duality(CriterionResult& r) {
    for (double k : {16.0 / 3, 6.0, 8.0}) {
        const auto d = geometry_dims(model_point(ByKappa{k}));
        exact(r, fmt("kappa=%.4g (D_EP-1)(D_H-1)", k), (d.d_ep - 1) * (d.d_hull - 1), 0.25);
        for (double n : {0.0, 0.5, 1.0, 2.0, 5.0})
            exact(r, fmt("kappa=%.4g", k) + fmt(" x(2^%g) duality", n), sle_star_moment(k, 2, n, Locus::Bulk, false),
                  sle_star_moment(16 / k, 2, n, Locus::Bulk, false));
    }
}

void bulk_boundary(CriterionResult& r) {
    for (double k : {2.0, 8.0 / 3, 6.0, 8.0}) {
        const auto m = model_point(ByKappa{k});
        for (int L = 1; L <= 6; ++L) {
            const double tb = watermelon(m, L, Locus::Boundary, Frame::QuantumGravity).value;
            const double b = watermelon(m, L, Locus::Bulk, Frame::QuantumGravity).value;
            const double expect = m.phase == Phase::Dilute ? 2 * b - m.gamma : 2 * b;
            exact(r, fmt("kappa=%.4g", k) + fmt(" L=%g", L), tb, expect);
        }
    }
}

void legendre(CriterionResult& r) {
    for (double c : charges) {
        double worst = 0;
        for (const auto& s : legendre_numeric(tau_curve(c)).samples)
            if (s.x >= 0.6 && s.x <= 10) worst = std::max(worst, std::abs(s.value - mf_spectrum(c, s.x)));
        check(r, fmt("c=%g numeric Legendre max |df|", c), worst, 0.0, 1e-6);
    }
    for (double c : charges) {
        double worst = 0;
        for (double a : {0.55, 0.8, 1.0, 1.7, 3.0, 12.0}) {
            const double ap = 0.5 + 0.25 / (a - 0.5);
            worst = std::max(worst, std::abs((mf_spectrum(c, a) - a) - (mf_spectrum(c, ap) - ap)));
        }
        check(r, fmt("c=%g f(a)-a invariance", c), worst, 0.0, 1e-9);
        worst = 0;
        for (double n : {0.0, 0.5, 2.0, 4.0}) {
            if (!(n > moment_floor(c))) continue;
            const double ap = 0.5 + 0.25 / (mf_alpha(c, n) - 0.5);
            const double q = 0.5 / (ap - 0.5);
            const double np = (q * q * (25 - c) - 1 + c) / 24;
            worst = std::max(worst, std::abs(mf_dimension(c, n) + mf_dimension(c, np) - 2));
        }
        check(r, fmt("c=%g D(n)+D(n')=2", c), worst, 0.0, 1e-9);
    }
}

void mixed(CriterionResult& r) {
    for (double c : charges) {
        double worst = 0;
        for (double a : {0.7, 1.0, 3.0, 20.0})
            for (double l : {0.1, 0.5, 1.0, 2.0}) {
                const double s = 1 + l * l, as = a * s;
                const double law = s * mf_spectrum(c, as / s) - spectrum_b(c) * l * l;
                worst = std::max(worst, std::abs(mixed_spectrum(c, as, l) - law) / std::max(1.0, std::abs(law)));
            }
        check(r, fmt("c=%g scaling law", c), worst, 0.0, 1e-10);
    }
    for (double c : charges) {
        for (double l : {0.0, 0.3, 1.0, 1.7}) {
            const double s = 1 + l * l;
            const double ep = ep_dimension(c, l);
            exact(r, fmt("c=%g", c) + fmt(" D_EP(%g) parabola", l), ep, s * ep_dimension(c) - spectrum_b(c) * l * l);
            if (c < 1) {
                const double sup = golden_max([&](double a) { return mixed_spectrum(c, a, l); }, 0.5 * s + 1e-9, 1e4);
                exact(r, fmt("c=%g", c) + fmt(" sup_a f(a,%g)", l), sup, ep, 1e-8);
            }
        }
    }
}

// --- oracles --------------------------------------------------------------

// exact survival of two walks after t steps: every one of the 4^(2t) step
// sequences, with the full ranges intersected
std::vector<double> enumerate_two(Site a0, Site b0, int tmax) {
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    std::vector<double> p;
    for (int t = 1; t <= tmax; ++t) {
        const long total = 1L << (4 * t);
        long alive = 0;
        std::vector<Site> a, b;
        for (long code = 0; code < total; ++code) {
            a.assign(1, a0), b.assign(1, b0);
            long c = code;
            for (int s = 0; s < t; ++s, c >>= 4) {
                a.push_back({a.back().x + dx[c & 3], a.back().y + dy[c & 3]});
                b.push_back({b.back().x + dx[(c >> 2) & 3], b.back().y + dy[(c >> 2) & 3]});
            }
            bool hit = false;
            for (auto u : a)
                for (auto v : b) hit = hit || u == v;
            alive += !hit;
        }
        p.push_back(double(alive) / double(total));
    }
    return p;
}

double direct_sum(const HitHistogram& h, double radius, double n) {
    std::vector<Cell> centers;
    std::vector<double> mass;
    for (std::size_t s = 0; s < h.sites.size(); ++s) {
        const Cell q = h.sites[s];
        auto far = [&](Cell a) {
            const long dx = a.x - q.x, dy = a.y - q.y;
            return double(dx * dx + dx * dy + dy * dy) > radius * radius;
        };
        std::size_t k = 0;
        while (k < centers.size() && far(centers[k])) ++k;
        if (k == centers.size()) centers.push_back(q), mass.push_back(0.0);
        mass[k] += double(h.counts[s]);
    }
    double z = 0;
    for (double m : mass) z += std::pow(m / double(h.absorbed), n);
    return z;
}

void oracles(CriterionResult& r, const VerifyOptions& o) {
    const std::int64_t samples = o.budget == Budget::Fast ? 50000 : 200000;
    WalkConfig wc{{1, 1}, Geometry::Plane, 4, samples, o.seed, {}, o.threads};
    const auto origins = default_origins(2, Geometry::Plane);
    const auto exact_p = enumerate_two(origins[0], origins[1], 4);
    std::vector<std::int64_t> alive(5, 0);
    for (std::int64_t i = 0; i < samples; ++i) {
        const auto life = sample_lifetime(wc, std::uint64_t(i));
        for (int t = 1; t <= 4; ++t) alive[t] += life > t;
    }
    for (int t = 1; t <= 4; ++t) {
        const double p = exact_p[t - 1], phat = double(alive[t]) / double(samples);
        const double sigma = std::sqrt(p * (1 - p) / double(samples));
        check(r, fmt("walk survival t=%g vs enumeration", t), phat, p, 3 * sigma, sigma);
    }

    // hit counts on a random-walk trail
    CounterRng rng(o.seed, 15);
    HitHistogram h;
    std::set<std::pair<int, int>> seen;
    Cell c{0, 0};
    const Cell nb[6] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
    for (int i = 0; i < 3000; ++i) {
        const Cell d = nb[rng.below(6)];
        c = {c.x + d.x, c.y + d.y};
        if (!seen.insert({c.x, c.y}).second) continue;
        h.sites.push_back(c);
        h.counts.push_back(1 + std::uint64_t(rng.below(50)) * rng.below(50));
        h.absorbed += h.counts.back();
    }
    h.walkers = h.absorbed;
    const std::vector<double> radii{2, 3.5, 8, 20}, orders{0, 0.25, 1, 2, 5.5};
    const auto t = moments(h, radii, orders);
    double worst = 0;
    for (std::size_t j = 0; j < radii.size(); ++j)
        for (std::size_t k = 0; k < orders.size(); ++k) {
            const double ref = direct_sum(h, radii[j], orders[k]);
            worst = std::max(worst, std::abs(t.values[j][k] - ref) / ref);
        }
    check(r, "moments vs direct summation, max rel dev", worst, 0.0, 1e-12);

    for (double cc : charges) {
        double w = 0;
        for (const auto& s : legendre_numeric(tau_curve(cc)).samples)
            if (s.x >= 0.6 && s.x <= 10) w = std::max(w, std::abs(s.value - mf_spectrum(cc, s.x)));
        check(r, fmt("c=%g numeric Legendre max |df|", cc), w, 0.0, 1e-6);
    }
}

// --- Monte Carlo ----------------------------------------------------------

struct Runner {
    VerifyOptions o;
    std::optional<PercStudy> perc;
    double perc_seconds = 0;

    bool fast() const { return o.budget == Budget::Fast; }
    // tolerance widening for a fast budget with `ratio` times fewer samples
    double widen(double ratio) const { return fast() ? std::sqrt(ratio) : 1.0; }

    const PercStudy& perc_study() {
        if (!perc) {
            const auto t0 = std::chrono::steady_clock::now();
            PercConfig pc;
            pc.clusters = fast() ? 50 : 200;
            pc.seed = o.seed;
            pc.threads = o.threads;
            perc = run_perc_study(pc);
            perc_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        return *perc;
    }

    void time_limit(CriterionResult& r, double seconds, double limit) {
        if (!fast()) bound(r, fmt("wall time (s), limit %g", limit), seconds, limit, Relation::AtMost);
    }

    void hull(CriterionResult& r) {
        const auto& s = perc_study();
        r.note = std::to_string(s.records.size()) + " clusters from " + std::to_string(s.fields) + " fields, side 1024";
        check(r, "hull mass exponent", s.hull_fit.exponent, 1.75, 0.05 * widen(4), s.hull_fit.std_error);
        time_limit(r, perc_seconds, 600);
    }

    void ep(CriterionResult& r) {
        const auto& s = perc_study();
        r.note = std::to_string(s.records.size()) + " clusters, same ensemble as criterion 9";
        check(r, "EP mass exponent", s.ep_fit.exponent, 4.0 / 3, 0.05 * widen(4), s.ep_fit.std_error);
        const double sigma = std::hypot(s.hull_fit.std_error, s.ep_fit.std_error);
        bound(r, "(hull - EP) / sigma", (s.hull_fit.exponent - s.ep_fit.exponent) / sigma, 3.0, Relation::AtLeast);
        time_limit(r, perc_seconds, 600);
    }

    void harmonic(CriterionResult& r) {
        const auto t0 = std::chrono::steady_clock::now();
        HarmonicConfig hc;
        hc.fields = fast() ? 5 : 20;
        hc.walkers = 1000000;
        hc.orders = {2, 4, 6, 8};
        hc.seed = o.seed;
        hc.threads = o.threads;
        const auto s = run_harmonic_study(hc);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.note = std::to_string(s.tables.size()) + " fields, " + std::to_string(hc.walkers) + " walkers each, radii " +
                 fmt("%g..", hc.radii.front()) + fmt("%g", hc.radii.back()) +
                 fmt(", censored fraction %.2g", 1 - double(s.absorbed) / double(s.walkers));
        for (const auto& e : s.estimates)
            check(r, fmt("D(%g)", e.order), e.dimension, mf_dimension(0, e.order), 0.03 * widen(4), e.dimension_error);
        time_limit(r, seconds, 900);
    }

    void walks(CriterionResult& r) {
        auto t0 = std::chrono::steady_clock::now();
        WalkConfig plane{{1, 1}, Geometry::Plane, 100000, fast() ? 25000 : 100000, o.seed, {}, o.threads};
        const auto fp = fit_exponent(simulate_survival(plane));
        const double tp = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        check(r, "plane zeta_2 (survival exponent)", fp.exponent, 0.625, 0.06 * widen(4), fp.std_error);
        time_limit(r, tp, 600);

        t0 = std::chrono::steady_clock::now();
        WalkConfig half{{1, 1}, Geometry::HalfPlane, 4096, fast() ? 7500000 : 30000000, o.seed, {}, o.threads};
        const auto fh = fit_exponent(simulate_survival(half));
        const double th = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        check(r, "half-plane survival exponent", fh.exponent, 5.0 / 3, 0.15 * widen(4), fh.std_error);
        time_limit(r, th, 600);
        r.note = "plane: t_max 1e5, " + std::to_string(plane.samples) + " samples; half plane: t_max 4096, " +
                 std::to_string(half.samples) + " samples";
    }

    void winding(CriterionResult& r) {
        const std::size_t traces = fast() ? 50 : 200;
        for (double k : {2.0, 8.0 / 3, 6.0}) {
            const auto t0 = std::chrono::steady_clock::now();
            SleConfig sc;
            sc.kappa = k;
            sc.steps = 1 << 14;
            sc.kind = LoewnerKind::Radial;
            sc.traces = traces;
            sc.seed = o.seed;
            sc.threads = o.threads;
            WindingOptions wo;
            wo.s_max = 0.25;
            wo.s_min = std::ldexp(1.0, -18);
            const auto w = winding_statistics(sample_traces(sc), wo);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            check(r, fmt("kappa=%.4g variance slope", k), w.increment_slope.exponent, k, 0.15 * k * widen(4),
                  w.increment_slope.std_error);
            time_limit(r, seconds, 600);
        }
        r.note = std::to_string(traces) + " radial traces of 2^14 steps, dt 1/1024, scales 2^-18..2^-2";
    }

    void box(CriterionResult& r) {
        const std::size_t traces = fast() ? 10 : 40;
        for (double k : {8.0 / 3, 6.0}) {
            SleConfig sc;
            sc.kappa = k;
            sc.steps = 1 << 14;
            sc.traces = traces;
            sc.seed = o.seed;
            sc.threads = o.threads;
            const auto f = trace_dimension(sample_traces(sc));
            check(r, fmt("kappa=%.4g box dimension", k), f.exponent, 1 + k / 8, 0.10 * widen(4), f.std_error);
        }
        r.note = std::to_string(traces) + " chordal traces of 2^14 steps";
    }
};

struct Entry {
    int id;
    const char* title;
    bool mc;
};

const Entry registry[] = {
    {1, "Table 1 dimensions", false},
    {2, "Brownian landmarks", false},
    {3, "Percolation crossings", false},
    {4, "Harmonic spectrum landmarks", false},
    {5, "Duality battery", false},
    {6, "Bulk-boundary relations", false},
    {7, "Legendre consistency", false},
    {8, "Mixed-spectrum scaling law", false},
    {9, "Percolation hull dimension", true},
    {10, "Accessible perimeter dimension", true},
    {11, "Harmonic measure on percolation EP", true},
    {12, "Random-walk non-intersection", true},
    {13, "SLE winding variance", true},
    {14, "SLE trace dimension", true},
    {15, "Oracle equivalence", true},
};

}  // namespace

std::vector<CriterionResult> run_verification(const VerifyOptions& options,
                                              const std::function<void(const CriterionResult&)>& on_result) {
    Runner run{options, {}, 0.0};
    std::vector<CriterionResult> out;
    for (const auto& e : registry) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), e.id) == options.only.end())
            continue;
        if (options.tier == VerifyTier::Exact && e.mc) continue;
        if (options.tier == VerifyTier::Mc && !e.mc) continue;
        CriterionResult r;
        r.id = e.id;
        r.title = e.title;
        r.monte_carlo = e.mc;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            switch (e.id) {
            case 1: table1(r); break;
            case 2: brownian(r); break;
            case 3: crossings(r); break;
            case 4: harmonic_landmarks(r); break;
            case 5: duality(r); break;
            case 6: bulk_boundary(r); break;
            case 7: legendre(r); break;
            case 8: mixed(r); break;
            case 9: run.hull(r); break;
            case 10: run.ep(r); break;
            case 11: run.harmonic(r); break;
            case 12: run.walks(r); break;
            case 13: run.winding(r); break;
            case 14: run.box(r); break;
            case 15: oracles(r, options); break;
            }
            r.pass = !r.checks.empty() && std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
        } catch (const std::exception& ex) {
            r.pass = false;
            r.note = std::string("error: ") + ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string summary_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d %s:", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str());
    std::string s = head;
    if (!r.monte_carlo) {
        double worst = 0;
        int failed = 0;
        for (const auto& c : r.checks) {
            worst = std::max(worst, std::abs(c.measured - c.target));
            failed += !c.pass;
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, " %zu checks, %d failed, max |dev| %.2e", r.checks.size(), failed, worst);
        s += buf;
    } else {
        bool first = true;
        for (const auto& c : r.checks) {
            char buf[192];
            if (c.relation == Relation::Within)
                std::snprintf(buf, sizeof buf, " %s %.5g +- %.2g (target %.5g +- %.3g)", c.label.c_str(), c.measured,
                              c.error, c.target, c.tolerance);
            else
                std::snprintf(buf, sizeof buf, " %s %.3g (%s %g)", c.label.c_str(), c.measured,
                              c.relation == Relation::AtLeast ? ">=" : "<=", c.target);
            s += first ? "" : ";";
            s += buf;
            first = false;
        }
    }
    if (!r.note.empty() && r.note.rfind("error:", 0) == 0) s += " " + r.note;
    char t[32];
    std::snprintf(t, sizeof t, " [%.1f s]", r.seconds);
    return s + t;
}

Json to_json(const CriterionResult& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        const char* rel = c.relation == Relation::Within ? "within" : c.relation == Relation::AtLeast ? "at_least" : "at_most";
        checks.push_back(Json{{"label", c.label},
                              {"measured", c.measured},
                              {"target", c.target},
                              {"tolerance", c.tolerance},
                              {"error", c.error},
                              {"relation", rel},
                              {"pass", c.pass}});
    }
    return Json{{"id", r.id},       {"title", r.title},   {"tier", r.monte_carlo ? "mc" : "exact"},
                {"pass", r.pass},   {"note", r.note},     {"seconds", r.seconds},
                {"checks", checks}};
}

}  // namespace kpz
