#include "kpzlab/slesim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "kpzlab/errors.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/rng.hpp"

namespace kpz {

using cplx = std::complex<double>;

const char* to_string(DriveMode m) { return m == DriveMode::Binomial ? "binomial" : "gaussian"; }

const char* to_string(LoewnerKind k) { return k == LoewnerKind::Chordal ? "chordal" : "radial"; }

namespace {

// Root of a + ib with Im >= 0.  On the real axis the sign of b (which
// carries the sign of Re(z - w) when Im z = +0) picks the side.  Written
// without branches so blocks of independent chains vectorize.
inline void sqrt_up(double a, double b, double& re, double& im) {
    const double m = std::sqrt(a * a + b * b);
    const double p = std::sqrt(0.5 * (m + std::abs(a)));
    const double q = p > 0.0 ? std::abs(b) / (2.0 * p) : 0.0;
    re = std::copysign(a >= 0.0 ? p : q, b);
    im = a >= 0.0 ? q : p;
}

// Inverse chordal slit step z -> w + sqrt((z - w)^2 - 4 dt).
inline void slit_step(double& x, double& y, double w, double four_dt) {
    x -= w;
    double re, im;
    sqrt_up(x * x - y * y - four_dt, 2.0 * x * y, re, im);
    x = w + re;
    y = im;
}

// Inverse radial step in upper half-plane coordinates (target i):
// z -> sqrt(a2 z^2 - h2), then the rotation about i by the drive increment,
// z -> (c z + s) / (c - s z) with (c, s) the cosine and sine of half of it.
inline void radial_step(double& x, double& y, double c, double s, double a2, double h2) {
    double re, im;
    sqrt_up(a2 * (x * x - y * y) - h2, a2 * 2.0 * x * y, re, im);
    const double nx = c * re + s, ny = c * im;
    const double dx = c - s * re, dy = -s * im;
    const double inv = 1.0 / (dx * dx + dy * dy);
    x = (nx * dx + ny * dy) * inv;
    y = std::max(0.0, (ny * dx - nx * dy) * inv);
}

// Applies maps m = k0-1, ..., 1 to the points k0..k0+cnt-1 after each has
// gone through its own maps k-1..k0; `step(x, y, m)` applies map m.
template <class Start, class Step>
void zipper(std::size_t n, std::vector<cplx>& out, Start start, Step step) {
    constexpr std::size_t B = 8;
    for (std::size_t k0 = 1; k0 <= n; k0 += B) {
        const std::size_t cnt = std::min(B, n + 1 - k0);
        double x[B], y[B];
        for (std::size_t j = 0; j < cnt; ++j) {
            const std::size_t k = k0 + j;
            start(k, x[j], y[j]);
            for (std::size_t m = k - 1; m >= k0; --m) step(x[j], y[j], m);
        }
        if (cnt == B) {
            for (std::size_t m = k0 - 1; m >= 1; --m)
                for (std::size_t j = 0; j < B; ++j) step(x[j], y[j], m);
        } else {
            for (std::size_t m = k0 - 1; m >= 1; --m)
                for (std::size_t j = 0; j < cnt; ++j) step(x[j], y[j], m);
        }
        for (std::size_t j = 0; j < cnt; ++j) {
            if (!std::isfinite(x[j]) || !std::isfinite(y[j]) || y[j] < -1e-9)
                throw NumericalError("trace point left the closed upper half plane");
            out[k0 + j] = {x[j], y[j]};
        }
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

std::vector<double> jackknife_slopes(std::size_t groups, const std::function<double(std::size_t)>& slope_without) {
    std::vector<double> s(groups);
    for (std::size_t g = 0; g < groups; ++g) s[g] = slope_without(g);
    return s;
}

double jackknife_error(const std::vector<double>& s) {
    const double m = double(s.size());
    if (s.size() < 2) return 0.0;
    double mean = std::accumulate(s.begin(), s.end(), 0.0) / m, var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    return std::sqrt(var * (m - 1) / m);
}

std::vector<std::size_t> tip_indices(const Trace& t, int tips) {
    const std::size_t n = t.points.size() - 1;
    std::vector<std::size_t> out;
    for (int j = 1; j <= tips; ++j) out.push_back(n / 2 + (n - n / 2) * std::size_t(j) / std::size_t(tips));
    return out;
}

// Unwrapped angle of points[i] - tip for i going back from the tip, sampled
// at the last exit from each radius.  Returns false if some scale is never
// reached.
bool winding_at_scales(const std::vector<cplx>& pts, std::size_t tip, const std::vector<double>& scales,
                       std::vector<double>& out) {
    const cplx z0 = pts[tip];
    out.assign(scales.size(), 0.0);
    std::size_t next = scales.size();  // smallest scale first
    double theta = 0.0;
    cplx prev = 0.0;
    bool started = false;
    for (std::size_t i = tip; i-- > 0;) {
        cplx d = pts[i] - z0;
        if (started) theta += std::arg(d / prev);
        prev = d;
        started = true;
        while (next > 0 && std::abs(d) >= scales[next - 1]) {
            out[next - 1] = theta;
            --next;
        }
        if (next == 0) break;
    }
    if (next != 0) return false;
    for (std::size_t j = scales.size(); j-- > 0;) out[j] -= out[0];
    return true;
}

void densify(const std::vector<cplx>& pts, double h, std::vector<cplx>& out) {
    out.clear();
    out.push_back(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double len = std::abs(pts[i] - pts[i - 1]);
        int sub = std::max(1, int(std::ceil(len / h)));
        for (int s = 1; s <= sub; ++s) out.push_back(pts[i - 1] + (pts[i] - pts[i - 1]) * (double(s) / sub));
    }
}

std::size_t box_count(const std::vector<cplx>& pts, double eps) {
    std::vector<std::uint64_t> keys;
    keys.reserve(pts.size());
    for (auto z : pts) {
        auto ix = std::int64_t(std::floor(z.real() / eps)), iy = std::int64_t(std::floor(z.imag() / eps));
        keys.push_back((std::uint64_t(ix) << 32) ^ std::uint64_t(std::uint32_t(iy)));
    }
    std::sort(keys.begin(), keys.end());
    return std::size_t(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace

LoewnerDrive sample_drive(double kappa, double dt, std::size_t steps, std::uint64_t seed, DriveMode mode,
                          std::uint64_t stream) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be >= 0");
    LoewnerDrive d{dt, kappa, std::vector<double>(steps, 0.0), seed, mode};
    const double sd = std::sqrt(kappa * dt);
    CounterRng rng(seed, stream);
    if (mode == DriveMode::Binomial) {
        std::uint32_t bits = 0;
        for (std::size_t k = 0; k < steps; ++k) {
            if (k % 32 == 0) bits = rng();
            d.increments[k] = (bits & 1u) ? sd : -sd;
            bits >>= 1;
        }
    } else {
        for (auto& v : d.increments) v = sd * rng.normal();
    }
    return d;
}

cplx inverse_slit(cplx z, double w, double dt) {
    double x = z.real(), y = z.imag();
    slit_step(x, y, w, 4.0 * dt);
    return {x, y};
}

Trace trace_from_drive(const LoewnerDrive& drive, LoewnerKind kind) {
    const std::size_t n = drive.steps();
    if (n < 1 || !(drive.dt > 0.0)) throw ConfigError("invalid drive");
    Trace t;
    t.points.assign(n + 1, 0.0);
    t.capacities.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t.capacities[k] = double(k) * drive.dt;

    if (kind == LoewnerKind::Chordal) {
        // gamma(k dt) = f_1 o ... o f_{k-1}(w_k + 2i sqrt(dt)), f_j the inverse
        // slit map rooted at w_j
        std::vector<double> w(n + 1, 0.0);
        for (std::size_t k = 1; k <= n; ++k) w[k] = w[k - 1] + drive.increments[k - 1];
        const double four_dt = 4.0 * drive.dt, rise = 2.0 * std::sqrt(drive.dt);
        zipper(
            n, t.points, [&](std::size_t k, double& x, double& y) { x = w[k], y = rise; },
            [&](double& x, double& y, std::size_t m) { slit_step(x, y, w[m], four_dt); });
    } else {
        // gamma(k dt) = E_1 F E_2 F ... F E_k (i h), E_j the rotation about i
        // by increment j and F the inverse radial slit map in these coordinates
        std::vector<double> c(n + 1), s(n + 1);
        for (std::size_t k = 1; k <= n; ++k) c[k] = std::cos(0.5 * drive.increments[k - 1]), s[k] = std::sin(0.5 * drive.increments[k - 1]);
        const double a2 = std::exp(-drive.dt), h2 = -std::expm1(-drive.dt), h = std::sqrt(h2);
        zipper(
            n, t.points,
            [&](std::size_t k, double& x, double& y) {
                // rotation of i h about i
                const double nx = s[k], ny = c[k] * h, dx = c[k], dy = -s[k] * h;
                const double inv = 1.0 / (dx * dx + dy * dy);
                x = (nx * dx + ny * dy) * inv, y = (ny * dx - nx * dy) * inv;
            },
            [&](double& x, double& y, std::size_t m) { radial_step(x, y, c[m], s[m], a2, h2); });
    }
    return t;
}

std::vector<Trace> sample_traces(const SleConfig& c) {
    if (c.traces < 1) throw ConfigError("traces must be >= 1");
    const double dt = c.dt > 0 ? c.dt : (c.kind == LoewnerKind::Chordal ? 1.0 : 16.0) / double(c.steps);
    std::vector<Trace> out(c.traces);
    parallel_chunks(c.traces, c.threads ? c.threads : default_threads(), [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i) out[i] = trace_from_drive(sample_drive(c.kappa, dt, c.steps, c.seed, c.mode, i), c.kind);
    });
    return out;
}

WindingSeries winding_statistics(const std::vector<Trace>& traces, const WindingOptions& opt) {
    if (traces.size() < 30) throw InsufficientDataError("winding statistics need at least 30 traces");
    if (opt.tips < 1) throw ConfigError("tips must be >= 1");
    for (const auto& t : traces)
        if (t.points.size() < 8) throw InsufficientDataError("trace too short");

    double s_max = opt.s_max, s_min = opt.s_min;
    if (!(s_max > 0.0) || !(s_min > 0.0)) {
        std::vector<double> reach, step;
        for (const auto& t : traces) {
            auto tips = tip_indices(t, opt.tips);
            reach.push_back(std::abs(t.points[tips.front()] - t.points[0]));
            for (auto k : tips) step.push_back(std::abs(t.points[k] - t.points[k - 1]));
        }
        if (!(s_max > 0.0)) s_max = 0.5 * median(reach);
        if (!(s_min > 0.0)) s_min = 4.0 * median(step);
    }
    WindingSeries ws;
    for (double s = s_max; s >= s_min * (1 - 1e-12); s *= 0.5) ws.scales.push_back(s);
    if (ws.scales.size() < 4) throw InsufficientDataError("fewer than 4 dyadic scales between s_min and s_max");
    const std::size_t ns = ws.scales.size();

    // per-trace sums so the jackknife can drop one trace at a time
    std::vector<std::vector<double>> s1(traces.size(), std::vector<double>(ns, 0.0)), s2 = s1;
    std::vector<double> cnt(traces.size(), 0.0);
    // increments theta(s_j) - theta(s_{j+m}) pooled over j, per lag m
    const std::size_t nl = std::min<std::size_t>(ns / 2, std::size_t(std::max(opt.max_lag, 1)));
    std::vector<std::vector<double>> d1(traces.size(), std::vector<double>(nl + 1, 0.0)), d2 = d1;
    std::vector<double> theta;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (auto k : tip_indices(traces[i], opt.tips)) {
            if (!winding_at_scales(traces[i].points, k, ws.scales, theta)) continue;
            for (std::size_t j = 0; j < ns; ++j) s1[i][j] += theta[j], s2[i][j] += theta[j] * theta[j];
            for (std::size_t m = 1; m <= nl; ++m)
                for (std::size_t j = 0; j + m < ns; ++j) {
                    const double d = theta[j + m] - theta[j];
                    d1[i][m] += d, d2[i][m] += d * d;
                }
            cnt[i] += 1;
        }
    }
    auto moments = [&](std::size_t skip, std::vector<double>& mean, std::vector<double>& var) {
        mean.assign(ns, 0.0), var.assign(ns, 0.0);
        double n = 0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            if (i == skip) continue;
            n += cnt[i];
            for (std::size_t j = 0; j < ns; ++j) mean[j] += s1[i][j], var[j] += s2[i][j];
        }
        if (n < 2) throw InsufficientDataError("too few traces reach every scale");
        for (std::size_t j = 0; j < ns; ++j) {
            mean[j] /= n;
            var[j] = std::max(0.0, (var[j] / n - mean[j] * mean[j]) * n / (n - 1));
        }
        return n;
    };
    std::vector<double> lnr(ns);
    for (std::size_t j = 0; j < ns; ++j) lnr[j] = std::log(ws.scales[0] / ws.scales[j]);
    auto fits = [&](std::size_t skip) {
        std::vector<double> mean, var;
        moments(skip, mean, var);
        return std::pair{fit_line(lnr, var), fit_line(lnr, mean)};
    };
    const std::size_t lag0 = std::max<std::size_t>(1, opt.min_lag);
    std::vector<double> lag_x;
    for (std::size_t m = lag0; m <= nl; ++m) lag_x.push_back(std::log(ws.scales[0] / ws.scales[m]));
    auto lag_variances = [&](std::size_t skip) {
        std::vector<double> v;
        for (std::size_t m = lag0; m <= nl; ++m) {
            double a = 0, b = 0, n = 0;
            for (std::size_t i = 0; i < traces.size(); ++i) {
                if (i == skip) continue;
                a += d1[i][m], b += d2[i][m], n += cnt[i] * double(ns - m);
            }
            a /= n;
            v.push_back(std::max(0.0, (b / n - a * a) * n / (n - 1)));
        }
        return v;
    };

    ws.samples = std::size_t(moments(traces.size(), ws.means, ws.variances));
    auto [fv, fm] = fits(traces.size());
    std::vector<double> jv, jm;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        auto [a, b] = fits(i);
        jv.push_back(a.exponent), jm.push_back(b.exponent);
    }
    fv.std_error = jackknife_error(jv);
    fm.std_error = jackknife_error(jm);
    fv.window_min = fm.window_min = ws.scales.back();
    fv.window_max = fm.window_max = ws.scales.front();
    ws.slope = fv;
    ws.mean_slope = fm;

    if (nl < lag0 + 2) {
        // too few scales for the increment fit
        ws.increment_slope.exponent = ws.increment_slope.std_error = std::numeric_limits<double>::quiet_NaN();
        ws.increment_slope.points = 0;
        return ws;
    }
    ws.lags = lag_x;
    ws.lag_variances = lag_variances(traces.size());
    FitResult fi = fit_line(ws.lags, ws.lag_variances);
    std::vector<double> ji;
    for (std::size_t i = 0; i < traces.size(); ++i) ji.push_back(fit_line(ws.lags, lag_variances(i)).exponent);
    fi.std_error = jackknife_error(ji);
    fi.window_min = lag_x.front();
    fi.window_max = lag_x.back();
    ws.increment_slope = fi;
    return ws;
}

FitResult trace_dimension(const std::vector<Trace>& traces, const BoxOptions& opt) {
    if (traces.empty()) throw InsufficientDataError("no traces");
    double eps_max = opt.eps_max, eps_min = opt.eps_min;
    if (!(eps_max > 0.0)) {
        std::vector<double> diam;
        for (const auto& t : traces) {
            if (t.points.size() < 2) throw InsufficientDataError("trace too short");
            double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
            for (auto z : t.points) x0 = std::min(x0, z.real()), x1 = std::max(x1, z.real()), y0 = std::min(y0, z.imag()), y1 = std::max(y1, z.imag());
            diam.push_back(std::hypot(x1 - x0, y1 - y0));
        }
        eps_max = 0.25 * median(diam);
    }
    if (!(eps_min > 0.0)) eps_min = eps_max / 128.0;
    std::vector<double> eps;
    for (double e = eps_max; e >= eps_min * (1 - 1e-12); e *= 0.5) eps.push_back(e);
    if (eps.size() < 2 || eps.front() / eps.back() < 99.0)
        throw InsufficientDataError("box sizes span less than 2 decades");

    // counts[i][j] for trace i at size eps[j]
    std::vector<std::vector<double>> counts(traces.size(), std::vector<double>(eps.size()));
    std::vector<cplx> dense;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        densify(traces[i].points, 0.25 * eps.back(), dense);
        for (std::size_t j = 0; j < eps.size(); ++j) counts[i][j] = double(box_count(dense, eps[j]));
    }
    std::vector<double> x(eps.size());
    for (std::size_t j = 0; j < eps.size(); ++j) x[j] = std::log(1.0 / eps[j]);
    auto fit_without = [&](std::size_t skip) {
        std::vector<double> y(eps.size(), 0.0);
        double n = 0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            if (i == skip) continue;
            for (std::size_t j = 0; j < eps.size(); ++j) y[j] += counts[i][j];
            n += 1;
        }
        for (auto& v : y) v = std::log(v / n);
        return fit_line(x, y);
    };
    FitResult r = fit_without(traces.size());
    if (traces.size() >= 2) r.std_error = jackknife_error(jackknife_slopes(traces.size(), [&](std::size_t g) { return fit_without(g).exponent; }));
    r.window_min = eps.back();
    r.window_max = eps.front();
    return r;
}

double min_separated_distance(const Trace& trace, std::size_t gap) {
    const auto& p = trace.points;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + gap < p.size(); ++i)
        for (std::size_t j = i + gap; j < p.size(); ++j) best = std::min(best, std::norm(p[j] - p[i]));
    return std::sqrt(best);
}

}  // namespace kpz
