#include "kpzlab/walksim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpzlab/errors.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/rng.hpp"

namespace kpz {

const char* to_string(Geometry g) { return g == Geometry::Plane ? "plane" : "half_plane"; }

namespace {

std::uint64_t pack(int x, int y) { return (std::uint64_t(std::uint32_t(x)) << 32) | std::uint32_t(y); }

std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Site -> owning packet, cleared in O(1) between samples by bumping a
// generation counter.
class OwnerMap {
public:
    OwnerMap() { resize(1u << 12); }

    void clear() {
        if (++gen_ == 0) {
            std::fill(gens_.begin(), gens_.end(), 0u);
            gen_ = 1;
        }
        size_ = 0;
    }

    // Owner of `key`, or -1 after inserting it for `packet`.
    int claim(std::uint64_t key, int packet) {
        std::size_t i = mix(key) & mask_;
        while (gens_[i] == gen_) {
            if (keys_[i] == key) return owners_[i];
            i = (i + 1) & mask_;
        }
        gens_[i] = gen_;
        keys_[i] = key;
        owners_[i] = std::uint16_t(packet);
        if (++size_ * 2 > keys_.size()) grow();
        return -1;
    }

private:
    void resize(std::size_t cap) {
        keys_.assign(cap, 0);
        owners_.assign(cap, 0);
        gens_.assign(cap, 0);
        mask_ = cap - 1;
    }

    void grow() {
        std::vector<std::uint64_t> keys;
        std::vector<std::uint16_t> owners;
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (gens_[i] == gen_) keys.push_back(keys_[i]), owners.push_back(owners_[i]);
        resize(keys_.size() * 2);
        gen_ = 1;
        size_ = 0;
        for (std::size_t k = 0; k < keys.size(); ++k) claim(keys[k], owners[k]);
    }

    std::vector<std::uint64_t> keys_;
    std::vector<std::uint16_t> owners_;
    std::vector<std::uint32_t> gens_;
    std::size_t mask_ = 0, size_ = 0;
    std::uint32_t gen_ = 1;
};

struct Walker {
    int x, y, packet;
    CounterRng rng;
    std::uint32_t bits = 0;
    int left = 0;

    int step() {
        if (left == 0) {
            bits = rng();
            left = 16;
        }
        int d = bits & 3u;
        bits >>= 2;
        --left;
        return d;
    }
};

constexpr int dx[4] = {1, -1, 0, 0};
constexpr int dy[4] = {0, 0, 1, -1};

void validate(const WalkConfig& c) {
    if (c.packet_counts.empty()) throw ConfigError("at least one packet is required");
    if (c.packet_counts.size() > 60000) throw ConfigError("too many packets");
    for (int n : c.packet_counts)
        if (n < 1) throw ConfigError("each packet needs at least one walk");
    if (c.max_time < 1) throw ConfigError("max_time must be >= 1");
    if (c.samples < 1) throw ConfigError("samples must be >= 1");
    if (!c.origin_offsets.empty()) {
        if (c.origin_offsets.size() != c.packet_counts.size())
            throw ConfigError("origin_offsets needs one site per packet");
        for (std::size_t i = 0; i < c.origin_offsets.size(); ++i) {
            if (c.geometry == Geometry::HalfPlane && c.origin_offsets[i].y < 1)
                throw ConfigError("half-plane origins must have y >= 1");
            for (std::size_t j = 0; j < i; ++j)
                if (c.origin_offsets[i] == c.origin_offsets[j]) throw ConfigError("origins must be distinct");
        }
    }
}

class Sampler {
public:
    explicit Sampler(const WalkConfig& c) : cfg_(c) {
        validate(c);
        origins_ = c.origin_offsets.empty() ? default_origins(c.packet_counts.size(), c.geometry) : c.origin_offsets;
    }

    std::int64_t lifetime(std::uint64_t sample) {
        map_.clear();
        walkers_.clear();
        std::uint32_t id = 0;
        for (std::size_t p = 0; p < cfg_.packet_counts.size(); ++p) {
            map_.claim(pack(origins_[p].x, origins_[p].y), int(p));
            for (int k = 0; k < cfg_.packet_counts[p]; ++k)
                walkers_.push_back({origins_[p].x, origins_[p].y, int(p), CounterRng(cfg_.seed, sample, id++)});
        }
        // a lone packet in the plane can never die
        if (cfg_.packet_counts.size() == 1 && cfg_.geometry == Geometry::Plane) return cfg_.max_time + 1;
        const bool half = cfg_.geometry == Geometry::HalfPlane;
        for (std::int64_t t = 1; t <= cfg_.max_time; ++t) {
            for (auto& w : walkers_) {
                int d = w.step();
                w.x += dx[d];
                w.y += dy[d];
                if (half && w.y <= 0) return t;
                int owner = map_.claim(pack(w.x, w.y), w.packet);
                if (owner >= 0 && owner != w.packet) return t;
            }
        }
        return cfg_.max_time + 1;
    }

private:
    const WalkConfig& cfg_;
    std::vector<Site> origins_;
    OwnerMap map_;
    std::vector<Walker> walkers_;
};

}  // namespace

std::vector<Site> default_origins(std::size_t packets, Geometry geometry) {
    std::vector<Site> out;
    if (geometry == Geometry::HalfPlane) {
        for (std::size_t i = 0; i < packets; ++i) out.push_back({int(i), 1});
        return out;
    }
    // (0,0), then its ring of 8 in counter-clockwise order, then wider rings
    out.push_back({0, 0});
    for (int r = 1; out.size() < packets; ++r) {
        int x = r, y = -r + 1;
        for (; y <= r && out.size() < packets; ++y) out.push_back({x, y});
        for (x = r - 1, y = r; x >= -r && out.size() < packets; --x) out.push_back({x, y});
        for (x = -r, y = r - 1; y >= -r && out.size() < packets; --y) out.push_back({x, y});
        for (x = -r + 1, y = -r; x <= r && out.size() < packets; ++x) out.push_back({x, y});
    }
    out.resize(packets);
    return out;
}

std::vector<std::int64_t> checkpoints(std::int64_t max_time) {
    std::vector<std::int64_t> out;
    for (std::int64_t t = 1; t < max_time; t *= 2) out.push_back(t);
    out.push_back(max_time);
    return out;
}

std::int64_t sample_lifetime(const WalkConfig& config, std::uint64_t sample) {
    Sampler s(config);
    return s.lifetime(sample);
}

SurvivalCurve simulate_survival(const WalkConfig& config) {
    validate(config);
    SurvivalCurve curve;
    curve.times = checkpoints(config.max_time);
    curve.total = config.samples;
    const std::size_t nt = curve.times.size();
    unsigned threads = config.threads ? config.threads : default_threads();
    std::vector<std::vector<std::int64_t>> deaths(threads, std::vector<std::int64_t>(nt + 1, 0));

    parallel_chunks(std::size_t(config.samples), threads, [&](std::size_t b, std::size_t e, unsigned w) {
        Sampler s(config);
        auto& hist = deaths[w];
        for (std::size_t i = b; i < e; ++i) {
            std::int64_t life = s.lifetime(i);
            // first checkpoint index the sample fails to reach
            auto k = std::lower_bound(curve.times.begin(), curve.times.end(), life) - curve.times.begin();
            ++hist[k];
        }
    });

    std::vector<std::int64_t> died(nt + 1, 0);
    for (const auto& h : deaths)
        for (std::size_t k = 0; k <= nt; ++k) died[k] += h[k];
    std::int64_t alive = config.samples;
    for (std::size_t k = 0; k < nt; ++k) {
        alive -= died[k];
        curve.alive_counts.push_back(alive);
    }
    return curve;
}

FitResult fit_exponent(const SurvivalCurve& curve, double t_min, double t_max) {
    if (curve.times.size() != curve.alive_counts.size() || curve.total < 1)
        throw InsufficientDataError("malformed survival curve");
    std::vector<double> x, y, w, v;
    const double n = double(curve.total);
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
        double t = double(curve.times[k]);
        if (t < t_min || t > t_max || curve.alive_counts[k] <= 0) continue;
        double p = curve.alive_counts[k] / n;
        // delta-method variance of ln P, floored for P = 1
        double var = std::max(1.0 - p, 1.0 / n) / (n * p);
        x.push_back(std::log(t));
        y.push_back(std::log(p));
        w.push_back(1.0 / var);
        v.push_back(var);
    }
    if (x.size() < 4) throw InsufficientDataError("fit window holds " + std::to_string(x.size()) + " usable checkpoints, need 4");
    FitResult r = fit_line(x, y, w);
    // Checkpoints share samples: Cov(ln P_i, ln P_j) = var of the earlier one.
    // The slope is linear in y, so its variance is c^T C c.
    double sw = 0, sx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sw += w[i], sx += w[i] * x[i];
    double mx = sx / sw, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    double var_b = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            var_b += w[i] * (x[i] - mx) * w[j] * (x[j] - mx) * std::min(v[i], v[j]);
    r.std_error = std::sqrt(std::max(0.0, var_b)) / sxx;
    r.exponent = -r.exponent;
    r.window_min = std::exp(r.window_min);
    r.window_max = std::exp(r.window_max);
    return r;
}

FitResult fit_exponent(const SurvivalCurve& curve) {
    if (curve.times.empty()) throw InsufficientDataError("empty survival curve");
    double tmax = double(curve.times.back());
    return fit_exponent(curve, tmax / 64.0, tmax);
}

}  // namespace kpz
