#pragma once

// Survival of mutually-avoiding packets of simple random walks on Z^2.
// Walks inside a packet are transparent to each other; a sample dies at the
// first time two packets share a site (or, in the half plane, when any walk
// reaches the line y = 0).

#include <cstdint>
#include <vector>

#include "kpzlab/fit.hpp"

namespace kpz {

struct Site {
    int x = 0;
    int y = 0;
    bool operator==(const Site&) const = default;
};

enum class Geometry { Plane, HalfPlane };

const char* to_string(Geometry g);

struct WalkConfig {
    std::vector<int> packet_counts;
    Geometry geometry = Geometry::Plane;
    std::int64_t max_time = 1024;
    std::int64_t samples = 1000;
    std::uint64_t seed = 0;
    std::vector<Site> origin_offsets;  // empty: default_origins()
    unsigned threads = 0;              // 0: hardware concurrency
};

struct SurvivalCurve {
    std::vector<std::int64_t> times;
    std::vector<std::int64_t> alive_counts;
    std::int64_t total = 0;
};

/// One start site per packet: nearest neighbours spiralling around the
/// origin in the plane, consecutive sites on the row y = 1 in the half plane.
std::vector<Site> default_origins(std::size_t packets, Geometry geometry);

/// Powers of two up to max_time, plus max_time itself.
std::vector<std::int64_t> checkpoints(std::int64_t max_time);

/// First time the sample dies, or max_time + 1 if it survives.  Walk w of
/// packet p draws from stream (seed, sample, global walk index).
std::int64_t sample_lifetime(const WalkConfig& config, std::uint64_t sample);

SurvivalCurve simulate_survival(const WalkConfig& config);

/// Weighted fit of ln P against ln t over checkpoints in [t_min, t_max];
/// exponent is minus the slope.  The standard error uses the covariance of
/// nested binomial counts, since every checkpoint sees the same samples.
FitResult fit_exponent(const SurvivalCurve& curve, double t_min, double t_max);

/// Default window [t_max/64, t_max].
FitResult fit_exponent(const SurvivalCurve& curve);

}  // namespace kpz
