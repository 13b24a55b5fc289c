#include "kpzlab/percsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kpzlab/errors.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/rng.hpp"

namespace kpz {

namespace {

constexpr Cell dirs[6] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
constexpr double half_sqrt3 = 0.86602540378443864676;

Cell add(Cell a, Cell d) { return {a.x + d.x, a.y + d.y}; }

// Occupancy of one cluster on a box padded by `pad` free cells.
class LocalGrid {
public:
    LocalGrid(const std::vector<Cell>& sites, int pad) {
        int x0 = sites[0].x, x1 = x0, y0 = sites[0].y, y1 = y0;
        for (auto s : sites) {
            x0 = std::min(x0, s.x), x1 = std::max(x1, s.x);
            y0 = std::min(y0, s.y), y1 = std::max(y1, s.y);
        }
        ox_ = x0 - pad, oy_ = y0 - pad;
        w_ = x1 - x0 + 1 + 2 * pad, h_ = y1 - y0 + 1 + 2 * pad;
        occ_.assign(std::size_t(w_) * h_, 0);
        for (auto s : sites) occ_[index(s)] = 1;
    }

    bool inside(Cell c) const { return c.x >= ox_ && c.y >= oy_ && c.x < ox_ + w_ && c.y < oy_ + h_; }
    bool occupied(Cell c) const { return inside(c) && occ_[index(c)]; }
    std::size_t index(Cell c) const { return std::size_t(c.y - oy_) * w_ + (c.x - ox_); }
    std::size_t size() const { return occ_.size(); }
    Cell cell(std::size_t i) const { return {int(i % w_) + ox_, int(i / w_) + oy_}; }

    // Free cells connected to the box border.  With `necks`, a step a -> b is
    // refused when both sites flanking the edge ab are occupied.
    std::vector<std::uint8_t> exterior(bool necks) const {
        std::vector<std::uint8_t> seen(occ_.size(), 0);
        std::vector<std::size_t> stack;
        for (std::size_t i = 0; i < occ_.size(); ++i) {
            Cell c = cell(i);
            bool border = c.x == ox_ || c.y == oy_ || c.x == ox_ + w_ - 1 || c.y == oy_ + h_ - 1;
            if (border && !occ_[i]) seen[i] = 1, stack.push_back(i);
        }
        while (!stack.empty()) {
            Cell a = cell(stack.back());
            stack.pop_back();
            for (int k = 0; k < 6; ++k) {
                Cell b = add(a, dirs[k]);
                if (!inside(b) || occupied(b) || seen[index(b)]) continue;
                if (necks && occupied(add(a, dirs[(k + 1) % 6])) && occupied(add(a, dirs[(k + 5) % 6]))) continue;
                seen[index(b)] = 1;
                stack.push_back(index(b));
            }
        }
        return seen;
    }

private:
    int ox_, oy_, w_, h_;
    std::vector<std::uint8_t> occ_;
};

std::vector<double> mean_counts(const std::vector<std::vector<double>>& counts, std::size_t skip) {
    std::vector<double> m(counts[0].size(), 0.0);
    std::size_t used = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (s == skip) continue;
        for (std::size_t j = 0; j < m.size(); ++j) m[j] += counts[s][j];
        ++used;
    }
    for (auto& v : m) v /= double(used);
    return m;
}

FitResult fit_counts(const std::vector<std::vector<double>>& counts, std::span<const double> radii) {
    if (counts.empty()) throw InsufficientDataError("no point sets");
    auto slope_of = [&](std::size_t skip) {
        auto m = mean_counts(counts, skip);
        std::vector<double> x, y;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            if (!(m[j] > 0.0)) throw InsufficientDataError("no neighbours within radius " + std::to_string(radii[j]));
            x.push_back(std::log(radii[j]));
            y.push_back(std::log(m[j]));
        }
        return fit_line(x, y);
    };
    FitResult r = slope_of(counts.size());
    r.window_min = radii.front();
    r.window_max = radii.back();
    const std::size_t m = counts.size();
    if (m >= 2) {
        std::vector<double> s(m);
        for (std::size_t i = 0; i < m; ++i) s[i] = slope_of(i).exponent;
        double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(m), var = 0.0;
        for (double v : s) var += (v - mean) * (v - mean);
        r.std_error = std::sqrt(var * double(m - 1) / double(m));
    }
    return r;
}

void check_radii(std::span<const double> radii) {
    if (radii.size() < 4) throw InsufficientDataError("mass-radius fit needs at least 4 radii");
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (!(radii[j] > 0.0)) throw DomainError("radii must be positive");
        if (j && !(radii[j] > radii[j - 1])) throw DomainError("radii must be increasing");
    }
}

std::vector<Point2> to_points(const std::vector<Cell>& cells) {
    std::vector<Point2> out;
    out.reserve(cells.size());
    for (auto c : cells) out.push_back(to_plane(c));
    return out;
}

}  // namespace

Point2 to_plane(Cell c) { return {c.x + 0.5 * c.y, half_sqrt3 * c.y}; }

bool PercField::occupied(Cell c) const { return inside(c) && occupancy[std::size_t(c.y) * side + c.x]; }

PercField sample_field(int side, std::uint64_t seed, double p) {
    if (side < 8) throw ConfigError("side must be >= 8");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
    PercField f{side, std::vector<std::uint8_t>(std::size_t(side) * side), seed, p};
    CounterRng rng(seed, 0);
    for (auto& o : f.occupancy) o = rng.uniform() < p;
    return f;
}

std::uint64_t field_checksum(const PercField& field) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto b : field.occupancy) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_pbm(const PercField& field) {
    std::string s = "P1\n" + std::to_string(field.side) + " " + std::to_string(field.side) + "\n";
    for (int y = 0; y < field.side; ++y) {
        for (int x = 0; x < field.side; ++x) {
            s += field.occupied({x, y}) ? '1' : '0';
            s += x + 1 < field.side ? ' ' : '\n';
        }
    }
    return s;
}

std::vector<Cluster> find_clusters(const PercField& field) {
    const int n = field.side;
    std::vector<std::uint8_t> seen(field.occupancy.size(), 0);
    std::vector<Cluster> out;
    std::vector<Cell> stack;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            std::size_t i = std::size_t(y) * n + x;
            if (!field.occupancy[i] || seen[i]) continue;
            Cluster c{{x, y}};
            double sx = 0, sy = 0, s2 = 0;
            seen[i] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                Cell a = stack.back();
                stack.pop_back();
                ++c.size;
                if (a.x == 0 || a.y == 0 || a.x == n - 1 || a.y == n - 1) c.touches_edge = true;
                Point2 p = to_plane(a);
                sx += p.x, sy += p.y, s2 += p.x * p.x + p.y * p.y;
                for (auto d : dirs) {
                    Cell b = add(a, d);
                    if (!field.inside(b)) continue;
                    std::size_t j = std::size_t(b.y) * n + b.x;
                    if (field.occupancy[j] && !seen[j]) seen[j] = 1, stack.push_back(b);
                }
            }
            double m = double(c.size);
            c.radius_of_gyration = std::sqrt(std::max(0.0, s2 / m - (sx * sx + sy * sy) / (m * m)));
            out.push_back(c);
        }
    }
    return out;
}

std::vector<Cell> cluster_sites(const PercField& field, Cell anchor) {
    if (!field.occupied(anchor)) throw ConfigError("anchor site is not occupied");
    const int n = field.side;
    std::vector<std::uint8_t> seen(field.occupancy.size(), 0);
    std::vector<Cell> out{anchor}, stack{anchor};
    seen[std::size_t(anchor.y) * n + anchor.x] = 1;
    while (!stack.empty()) {
        Cell a = stack.back();
        stack.pop_back();
        for (auto d : dirs) {
            Cell b = add(a, d);
            if (!field.occupied(b)) continue;
            std::size_t j = std::size_t(b.y) * n + b.x;
            if (!seen[j]) seen[j] = 1, stack.push_back(b), out.push_back(b);
        }
    }
    return out;
}

HullPath trace_hull(const PercField& field, Cell anchor) {
    auto sites = cluster_sites(field, anchor);
    const int n = field.side;
    for (auto s : sites)
        if (s.x == 0 || s.y == 0 || s.x == n - 1 || s.y == n - 1)
            throw OpenClusterError("cluster touches the field edge");
    LocalGrid grid(sites, 1);

    // leftmost site in the plane; its west neighbour lies outside
    Cell start = sites[0];
    for (auto s : sites) {
        int k = 2 * s.x + s.y, k0 = 2 * start.x + start.y;
        if (k < k0 || (k == k0 && s.y < start.y)) start = s;
    }

    HullPath h;
    std::vector<std::uint8_t> listed(grid.size(), 0);
    Cell a = start;
    int k = 3;
    const std::size_t cap = 6 * std::size_t(n) * n;
    for (std::size_t step = 0;; ++step) {
        if (step > cap) throw NumericalError("hull walk did not close");
        if (!listed[grid.index(a)]) listed[grid.index(a)] = 1, h.sites.push_back(a);
        Cell b = add(a, dirs[k]), c = add(a, dirs[(k + 1) % 6]);
        Point2 pa = to_plane(a), pb = to_plane(b), pc = to_plane(c);
        h.dual.push_back({(pa.x + pb.x + pc.x) / 3.0, (pa.y + pb.y + pc.y) / 3.0});
        if (grid.occupied(c)) {
            a = c;
            k = (k + 5) % 6;
        } else {
            k = (k + 1) % 6;
        }
        if (a == start && k == 3) break;
    }
    h.dual.push_back(h.dual.front());
    h.closed = true;
    return h;
}

PerimeterSet accessible_perimeter(const PercField& field, const HullPath& hull) {
    PerimeterSet out;
    if (hull.sites.empty()) return out;
    auto sites = cluster_sites(field, hull.sites.front());
    LocalGrid grid(sites, 2);
    auto reach = grid.exterior(true);
    for (auto s : hull.sites) {
        for (auto d : dirs) {
            Cell b = add(s, d);
            if (grid.inside(b) && reach[grid.index(b)]) {
                out.sites.push_back(s);
                break;
            }
        }
    }
    return out;
}

std::vector<double> correlation_counts(const std::vector<Point2>& points, std::span<const double> radii,
                                       std::size_t centers, std::uint64_t seed) {
    std::vector<double> out(radii.size(), 0.0);
    const std::size_t n = points.size();
    if (n == 0 || radii.empty()) return out;
    const double rmax = radii.back();

    // bucket points on a square grid of cell size rmax
    double x0 = points[0].x, y0 = points[0].y, x1 = x0, y1 = y0;
    for (auto& p : points) x0 = std::min(x0, p.x), y0 = std::min(y0, p.y), x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
    const int gw = int((x1 - x0) / rmax) + 1, gh = int((y1 - y0) / rmax) + 1;
    auto cell_of = [&](const Point2& p) {
        int cx = std::min(gw - 1, int((p.x - x0) / rmax)), cy = std::min(gh - 1, int((p.y - y0) / rmax));
        return std::size_t(cy) * gw + cx;
    };
    std::vector<std::size_t> start(std::size_t(gw) * gh + 1, 0), order(n);
    for (auto& p : points) ++start[cell_of(p) + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) order[fill[cell_of(points[i])]++] = i;

    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    std::size_t m = std::min(n, std::max<std::size_t>(centers, 1));
    if (m < n) {
        CounterRng rng(seed, 1);
        for (std::size_t i = 0; i < m; ++i) std::swap(pick[i], pick[i + rng.below(std::uint32_t(n - i))]);
    }

    std::vector<double> r2(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) r2[j] = radii[j] * radii[j];
    std::vector<std::int64_t> hist(radii.size(), 0);
    for (std::size_t c = 0; c < m; ++c) {
        const std::size_t i = pick[c];
        const Point2 p = points[i];
        int cx = std::min(gw - 1, int((p.x - x0) / rmax)), cy = std::min(gh - 1, int((p.y - y0) / rmax));
        for (int gy = std::max(0, cy - 1); gy <= std::min(gh - 1, cy + 1); ++gy) {
            for (int gx = std::max(0, cx - 1); gx <= std::min(gw - 1, cx + 1); ++gx) {
                std::size_t g = std::size_t(gy) * gw + gx;
                for (std::size_t q = start[g]; q < start[g + 1]; ++q) {
                    std::size_t o = order[q];
                    if (o == i) continue;
                    double dx = points[o].x - p.x, dy = points[o].y - p.y, d2 = dx * dx + dy * dy;
                    if (d2 > r2.back() * (1 + 1e-12)) continue;
                    std::size_t j = std::lower_bound(r2.begin(), r2.end(), d2 * (1 - 1e-12)) - r2.begin();
                    ++hist[std::min(j, hist.size() - 1)];
                }
            }
        }
    }
    std::int64_t run = 0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        run += hist[j];
        out[j] = double(run) / double(m);
    }
    return out;
}

FitResult mass_radius_fit(const std::vector<std::vector<Point2>>& point_sets, std::span<const double> radii,
                          std::size_t centers, std::uint64_t seed) {
    check_radii(radii);
    if (point_sets.empty()) throw InsufficientDataError("no point sets");
    std::vector<std::vector<double>> counts;
    for (std::size_t s = 0; s < point_sets.size(); ++s)
        counts.push_back(correlation_counts(point_sets[s], radii, centers, seed + 0x9E3779B97F4A7C15ull * s));
    return fit_counts(counts, radii);
}

PercStudy run_perc_study(const PercConfig& cfg) {
    if (cfg.side < 8) throw ConfigError("side must be >= 8");
    if (cfg.clusters < 1) throw ConfigError("clusters must be >= 1");
    check_radii(cfg.radii);
    const double lo = cfg.rg_min > 0 ? cfg.rg_min : cfg.side / 8.0;
    const double hi = cfg.rg_max > 0 ? cfg.rg_max : cfg.side / 4.0;
    const unsigned threads = cfg.threads ? cfg.threads : default_threads();

    struct Found {
        ClusterRecord rec;
        std::vector<double> hull_counts, ep_counts;
    };
    std::vector<Found> found;
    PercStudy study;
    std::uint64_t next = 0;
    while (found.size() < cfg.clusters && next < cfg.max_fields) {
        const std::size_t batch = std::min<std::uint64_t>(threads, cfg.max_fields - next);
        std::vector<std::vector<Found>> per(batch);
        parallel_chunks(batch, threads, [&](std::size_t b, std::size_t e, unsigned) {
            for (std::size_t i = b; i < e; ++i) {
                const std::uint64_t f = next + i;
                // per-field seed keeps fields independent of the batch layout
                auto field = sample_field(cfg.side, field_seed(cfg.seed, f));
                for (const auto& c : find_clusters(field)) {
                    if (c.touches_edge || c.radius_of_gyration < lo || c.radius_of_gyration > hi) continue;
                    auto hull = trace_hull(field, c.anchor);
                    auto ep = accessible_perimeter(field, hull);
                    Found x;
                    x.rec = {f, c.anchor, c.radius_of_gyration, hull.length(), hull.sites.size(), ep.sites.size()};
                    std::uint64_t s = cfg.seed + 0x9E3779B97F4A7C15ull * (f * 4096 + per[i].size());
                    x.hull_counts = correlation_counts(to_points(hull.sites), cfg.radii, cfg.centers, s);
                    x.ep_counts = correlation_counts(to_points(ep.sites), cfg.radii, cfg.centers, s + 1);
                    per[i].push_back(std::move(x));
                }
            }
        });
        for (std::size_t i = 0; i < batch && found.size() < cfg.clusters; ++i) {
            for (auto& x : per[i]) {
                if (found.size() == cfg.clusters) break;
                found.push_back(std::move(x));
            }
            study.fields = next + i + 1;
        }
        next += batch;
    }
    if (found.size() < 2) throw InsufficientDataError("fewer than two conditioned clusters found");
    std::vector<std::vector<double>> hc, ec;
    for (auto& x : found) {
        study.records.push_back(x.rec);
        hc.push_back(std::move(x.hull_counts));
        ec.push_back(std::move(x.ep_counts));
    }
    study.radii = cfg.radii;
    study.hull_counts = mean_counts(hc, hc.size());
    study.ep_counts = mean_counts(ec, ec.size());
    study.hull_fit = fit_counts(hc, cfg.radii);
    study.ep_fit = fit_counts(ec, cfg.radii);
    return study;
}

}  // namespace kpz
