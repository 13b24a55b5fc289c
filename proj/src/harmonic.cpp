#include "kpzlab/harmonic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "kpzlab/errors.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/rng.hpp"

namespace kpz {

namespace {

constexpr double half_sqrt3 = 0.86602540378443864676;
constexpr int margin = 32;  // hex distance covered by the distance map
const Cell dirs[6] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};

Cell nearest_site(double px, double py) {
    const double fy = py / half_sqrt3, fx = px - 0.5 * fy;
    const int x0 = int(std::floor(fx)), y0 = int(std::floor(fy));
    Cell best{x0, y0};
    double bd = std::numeric_limits<double>::infinity();
    for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
            const Cell c{x0 + dx, y0 + dy};
            const Point2 p = to_plane(c);
            const double d = (p.x - px) * (p.x - px) + (p.y - py) * (p.y - py);
            if (d < bd) bd = d, best = c;
        }
    return best;
}

// Box around the absorber holding the absorber index of every site (-1 if
// free) and the lattice distance to the absorber, capped at 255.
struct Neighbourhood {
    int x0 = 0, y0 = 0, w = 0, h = 0;
    std::vector<std::int32_t> owner;
    std::vector<std::uint8_t> dist;

    bool inside(Cell c) const { return c.x >= x0 && c.y >= y0 && c.x < x0 + w && c.y < y0 + h; }
    std::size_t at(Cell c) const { return std::size_t(c.y - y0) * std::size_t(w) + std::size_t(c.x - x0); }
};

Neighbourhood build_neighbourhood(const std::vector<Cell>& absorber) {
    Neighbourhood nb;
    int x0 = absorber[0].x, x1 = x0, y0 = absorber[0].y, y1 = y0;
    for (auto c : absorber) x0 = std::min(x0, c.x), x1 = std::max(x1, c.x), y0 = std::min(y0, c.y), y1 = std::max(y1, c.y);
    nb.x0 = x0 - margin, nb.y0 = y0 - margin;
    nb.w = x1 - x0 + 1 + 2 * margin, nb.h = y1 - y0 + 1 + 2 * margin;
    const std::size_t n = std::size_t(nb.w) * std::size_t(nb.h);
    nb.owner.assign(n, -1);
    nb.dist.assign(n, 255);
    std::deque<Cell> queue;
    for (std::size_t i = 0; i < absorber.size(); ++i) {
        const std::size_t k = nb.at(absorber[i]);
        if (nb.owner[k] >= 0) throw ConfigError("absorber sites must be distinct");
        nb.owner[k] = std::int32_t(i);
        nb.dist[k] = 0;
        queue.push_back(absorber[i]);
    }
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        const int d = nb.dist[nb.at(c)];
        if (d >= margin) continue;
        for (auto dd : dirs) {
            const Cell t{c.x + dd.x, c.y + dd.y};
            if (!nb.inside(t)) continue;
            auto& v = nb.dist[nb.at(t)];
            if (v > d + 1) v = std::uint8_t(d + 1), queue.push_back(t);
        }
    }
    return nb;
}

// Walk-on-circles radius that keeps the landing site off the absorber, given
// the hex distance g of the nearest site (Euclidean >= g sqrt(3)/2).
inline double safe_radius(int g) { return half_sqrt3 * g - 1.5; }

}  // namespace

HitHistogram first_hit_sampling(const std::vector<Cell>& absorber, std::uint64_t walkers, const HitOptions& opt) {
    if (absorber.empty()) throw ConfigError("absorber is empty");
    if (walkers < 1) throw ConfigError("walkers must be >= 1");
    const Neighbourhood nb = build_neighbourhood(absorber);

    HitHistogram hist;
    for (auto c : absorber) {
        const Point2 p = to_plane(c);
        hist.center.x += p.x, hist.center.y += p.y;
    }
    hist.center.x /= double(absorber.size()), hist.center.y /= double(absorber.size());
    double rmax = 0;
    for (auto c : absorber) {
        const Point2 p = to_plane(c);
        rmax = std::max(rmax, std::hypot(p.x - hist.center.x, p.y - hist.center.y));
    }
    hist.set_radius = rmax + 1.0;
    hist.launch_radius = 2 * hist.set_radius;
    hist.kill_radius = 8 * hist.set_radius;
    hist.walkers = walkers;

    const double cx = hist.center.x, cy = hist.center.y, R = hist.set_radius;
    const double launch = hist.launch_radius, kill = hist.kill_radius;
    const double outside = safe_radius(margin + 1);
    const unsigned threads = std::max(1u, opt.threads ? opt.threads : default_threads());
    std::vector<std::vector<std::uint64_t>> counts(threads);

    parallel_chunks(walkers, threads, [&](std::size_t b, std::size_t e, unsigned worker) {
        auto& mine = counts[worker];
        mine.assign(absorber.size(), 0);
        for (std::size_t w = b; w < e; ++w) {
            CounterRng rng(opt.seed, w);
            double a = 2 * std::numbers::pi * rng.uniform();
            double px = cx + launch * std::cos(a), py = cy + launch * std::sin(a);
            std::uint64_t moves = 0;
            std::int32_t hit = -1;
            while (hit < 0 && moves < opt.max_moves) {
                // continuum phase
                const double rho = std::hypot(px - cx, py - cy);
                if (rho > kill) {
                    const double phi = std::atan2(py - cy, px - cx), q = launch / rho;
                    const double th = phi + 2 * std::atan((1 - q) / (1 + q) * std::tan(std::numbers::pi * (rng.uniform() - 0.5)));
                    px = cx + launch * std::cos(th), py = cy + launch * std::sin(th);
                    ++moves;
                    continue;
                }
                Cell s = nearest_site(px, py);
                double r;
                if (nb.inside(s)) {
                    const int g = nb.dist[nb.at(s)];
                    r = g > margin ? std::max(outside, rho - R - 1.0) : safe_radius(g);
                } else {
                    r = std::max(outside, rho - R - 1.0);
                }
                if (r >= 2.0) {
                    a = 2 * std::numbers::pi * rng.uniform();
                    px += r * std::cos(a), py += r * std::sin(a);
                    ++moves;
                    continue;
                }
                // lattice phase, until the walker hits or moves away
                while (moves < opt.max_moves) {
                    const Cell d = dirs[rng.below(6)];
                    const Cell t{s.x + d.x, s.y + d.y};
                    ++moves;
                    const std::size_t k = nb.at(t);
                    if (nb.owner[k] >= 0) {
                        hit = nb.owner[k];
                        break;
                    }
                    s = t;
                    if (nb.dist[k] >= 6) break;
                }
                const Point2 p = to_plane(s);
                px = p.x, py = p.y;
            }
            if (hit >= 0) ++mine[std::size_t(hit)];
        }
    });

    for (std::size_t i = 0; i < absorber.size(); ++i) {
        std::uint64_t c = 0;
        for (const auto& v : counts)
            if (!v.empty()) c += v[i];
        if (c > 0) {
            hist.sites.push_back(absorber[i]);
            hist.counts.push_back(c);
            hist.absorbed += c;
        }
    }
    return hist;
}

MomentTable moments(const HitHistogram& hist, const std::vector<double>& radii, const std::vector<double>& orders) {
    for (double r : radii)
        if (!(r >= 2.0)) throw ConfigError("ball radii must be >= 2");
    if (hist.sites.size() != hist.counts.size()) throw ConfigError("histogram sites and counts differ in length");
    MomentTable t;
    t.radii = radii;
    t.orders = orders;
    const double total = double(hist.absorbed);
    for (double r : radii) {
        // centers bucketed on a square grid of cell size just above r; distances are
        // compared exactly as squared axial norms
        std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
        const double cell = r * (1 + 1e-9);
        auto key = [](std::int64_t i, std::int64_t j) { return i * 0x100000 + j; };
        std::vector<double> mass;
        std::vector<Cell> centers;
        for (std::size_t s = 0; s < hist.sites.size(); ++s) {
            const Point2 p = to_plane(hist.sites[s]);
            const std::int64_t gi = std::int64_t(std::floor(p.x / cell)), gj = std::int64_t(std::floor(p.y / cell));
            std::size_t best = std::numeric_limits<std::size_t>::max();
            for (std::int64_t di = -1; di <= 1; ++di)
                for (std::int64_t dj = -1; dj <= 1; ++dj) {
                    auto it = grid.find(key(gi + di, gj + dj));
                    if (it == grid.end()) continue;
                    for (std::size_t c : it->second) {
                        if (c >= best) continue;
                        const std::int64_t dx = centers[c].x - hist.sites[s].x, dy = centers[c].y - hist.sites[s].y;
                        if (double(dx * dx + dx * dy + dy * dy) <= r * r) best = c;
                    }
                }
            if (best == std::numeric_limits<std::size_t>::max()) {
                best = centers.size();
                mass.push_back(0.0);
                centers.push_back(hist.sites[s]);
                grid[key(gi, gj)].push_back(best);
            }
            mass[best] += double(hist.counts[s]);
        }
        std::vector<double> z;
        for (double n : orders) {
            double sum = 0;
            for (double m : mass)
                if (m > 0) sum += std::pow(m / total, n);
            z.push_back(sum);
        }
        t.values.push_back(std::move(z));
        t.covering.push_back(std::move(centers));
    }
    return t;
}

std::vector<TauEstimate> tau_fit(const std::vector<MomentTable>& tables) {
    if (tables.empty()) throw InsufficientDataError("no moment tables");
    const auto& radii = tables[0].radii;
    const auto& orders = tables[0].orders;
    for (const auto& t : tables)
        if (t.radii != radii || t.orders != orders) throw ConfigError("moment tables use different grids");
    if (radii.size() < 4) throw InsufficientDataError("tau fit needs at least 4 radii");
    const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
    if (*hi / *lo < 10.0 * (1 - 1e-12)) throw InsufficientDataError("radii span less than a decade");

    std::vector<double> x;
    for (double r : radii) x.push_back(std::log(r));
    auto fit = [&](std::size_t o, std::size_t skip) {
        std::vector<double> y(radii.size(), 0.0);
        double n = 0;
        for (std::size_t i = 0; i < tables.size(); ++i) {
            if (i == skip) continue;
            for (std::size_t j = 0; j < radii.size(); ++j) y[j] += tables[i].values[j][o];
            n += 1;
        }
        for (auto& v : y) {
            if (!(v > 0)) throw InsufficientDataError("empty moment");
            v = std::log(v / n);
        }
        return fit_line(x, y);
    };
    std::vector<TauEstimate> out;
    for (std::size_t o = 0; o < orders.size(); ++o) {
        TauEstimate e;
        e.order = orders[o];
        e.tau = fit(o, tables.size());
        if (tables.size() >= 2) {
            std::vector<double> js;
            for (std::size_t i = 0; i < tables.size(); ++i) js.push_back(fit(o, i).exponent);
            const double m = std::accumulate(js.begin(), js.end(), 0.0) / double(js.size());
            double v = 0;
            for (double s : js) v += (s - m) * (s - m);
            e.tau.std_error = std::sqrt(v * double(js.size() - 1) / double(js.size()));
        }
        e.tau.window_min = *lo, e.tau.window_max = *hi;
        if (e.order == 1.0) {
            e.dimension = e.dimension_error = std::numeric_limits<double>::quiet_NaN();
        } else {
            e.dimension = e.tau.exponent / (e.order - 1);
            e.dimension_error = e.tau.std_error / std::abs(e.order - 1);
        }
        out.push_back(e);
    }
    return out;
}

FitResult rare_site_histogram(const HitHistogram& hist, std::uint64_t min_walkers) {
    if (hist.walkers < min_walkers) throw InsufficientDataError("too few walkers for the rare-site histogram");
    if (hist.absorbed == 0) throw InsufficientDataError("no absorbed walkers");
    // bin j holds counts in [2^j, 2^{j+1}), placed at the mean H of its sites
    std::vector<double> sites(64, 0.0), hsum(64, 0.0);
    for (auto c : hist.counts)
        if (c > 0) {
            const auto j = std::size_t(std::bit_width(c) - 1);
            sites[j] += 1, hsum[j] += double(c);
        }
    const double total = double(hist.absorbed);
    std::vector<double> x, y;
    for (std::size_t j = 0; j < 64; ++j) {
        const double width = std::ldexp(1.0, int(j));
        if (width > 100) break;
        if (sites[j] == 0) continue;
        x.push_back(std::log(hsum[j] / sites[j] / total));
        y.push_back(std::log(sites[j] / (width / total)));
    }
    if (x.size() < 3) throw InsufficientDataError("no power law in the low-H tail");
    FitResult f = fit_line(x, y);
    f.exponent = -f.exponent;
    f.window_min = std::exp(x.front());
    f.window_max = std::exp(x.back());
    return f;
}

HarmonicStudy run_harmonic_study(const HarmonicConfig& cfg) {
    if (cfg.side < 8) throw ConfigError("side must be >= 8");
    if (cfg.fields < 1) throw ConfigError("fields must be >= 1");
    const double lo = cfg.rg_min > 0 ? cfg.rg_min : cfg.side / 8.0;
    const double hi = cfg.rg_max > 0 ? cfg.rg_max : cfg.side / 4.0;
    HarmonicStudy study;
    for (std::uint64_t f = 0; f < cfg.max_fields && study.tables.size() < cfg.fields; ++f) {
        // same field sequence as run_perc_study
        auto field = sample_field(cfg.side, field_seed(cfg.seed, f));
        const Cluster* pick = nullptr;
        auto clusters = find_clusters(field);
        for (const auto& c : clusters) {
            if (c.touches_edge || c.radius_of_gyration < lo || c.radius_of_gyration > hi) continue;
            if (!pick || c.size > pick->size) pick = &c;
        }
        if (!pick) continue;
        // hull sites first, in walk order, so the covering follows the boundary
        auto hull = trace_hull(field, pick->anchor);
        auto all = cluster_sites(field, pick->anchor);
        std::vector<Cell> absorber = hull.sites;
        std::vector<std::uint8_t> seen(std::size_t(cfg.side) * cfg.side, 0);
        for (auto c : absorber) seen[std::size_t(c.y) * cfg.side + c.x] = 1;
        for (auto c : all)
            if (!seen[std::size_t(c.y) * cfg.side + c.x]) absorber.push_back(c);
        HitOptions opt;
        opt.seed = cfg.seed + 0x9E3779B97F4A7C15ull * (f + 1);
        opt.threads = cfg.threads;
        auto hist = first_hit_sampling(absorber, cfg.walkers, opt);
        study.walkers += hist.walkers;
        study.absorbed += hist.absorbed;
        study.fields.push_back(f);
        study.tables.push_back(moments(hist, cfg.radii, cfg.orders));
    }
    if (study.tables.size() < cfg.fields) throw InsufficientDataError("not enough conditioned clusters");
    study.estimates = tau_fit(study.tables);
    return study;
}

}  // namespace kpz
