#pragma once

// Harmonic measure of a lattice set sampled by first-hit random walkers, and
// its multifractal moments.  Walkers move as Brownian motion (walk on circles)
// while far from the set and as nearest-neighbour walks on the triangular
// lattice near it; the first set site they step onto is hit.

#include <cstdint>
#include <vector>

#include "kpzlab/fit.hpp"
#include "kpzlab/percsim.hpp"

namespace kpz {

struct HitHistogram {
    std::vector<Cell> sites;  // hit sites, in absorber order
    std::vector<std::uint64_t> counts;
    std::uint64_t walkers = 0;
    std::uint64_t absorbed = 0;
    Point2 center;
    double set_radius = 0.0;     // R: all absorber sites within R of center
    double launch_radius = 0.0;  // 2R
    double kill_radius = 0.0;    // 8R
};

struct HitOptions {
    std::uint64_t seed = 0;
    std::uint64_t max_moves = 1u << 22;  // per walker; beyond it the walker is censored
    unsigned threads = 0;
};

/// Walker i draws from stream (seed, i).  A walker beyond the kill circle is
/// put back on the launch circle with the exact exterior Poisson-kernel law.
HitHistogram first_hit_sampling(const std::vector<Cell>& absorber, std::uint64_t walkers,
                                const HitOptions& options = {});

struct MomentTable {
    std::vector<double> radii;
    std::vector<double> orders;
    std::vector<std::vector<double>> values;  // values[radius][order] = Z_n(r)
    std::vector<std::vector<Cell>> covering;  // ball centers per radius
};

/// Greedy covering of the hit support in histogram order: a site joins the
/// first center within distance r, or becomes a new center.  H of a ball is
/// its share of the absorbed walkers; Z_n = sum of H^n over balls.
MomentTable moments(const HitHistogram& hist, const std::vector<double>& radii, const std::vector<double>& orders);

struct TauEstimate {
    double order = 0.0;
    FitResult tau;                  // slope of ln <Z_n> against ln r
    double dimension = 0.0;         // tau / (n - 1); NaN at n = 1
    double dimension_error = 0.0;
};

/// Fits ln of the table-averaged Z_n against ln r for every order.  With two
/// or more tables the errors are jackknifed over tables.  Needs at least 4
/// radii spanning a decade.
std::vector<TauEstimate> tau_fit(const std::vector<MomentTable>& tables);

/// Number density of sites per unit H, in logarithmic count bins, fitted
/// over the two lowest decades of H; the exponent is tau* in N(H) ~ H^-tau*.
FitResult rare_site_histogram(const HitHistogram& hist, std::uint64_t min_walkers = 1000000);

struct HarmonicConfig {
    int side = 1024;
    std::size_t fields = 20;  // conditioned clusters, one per field
    std::size_t max_fields = 100000;
    std::uint64_t walkers = 1000000;
    double rg_min = 0.0;  // 0: side/8
    double rg_max = 0.0;  // 0: side/4
    std::vector<double> radii{4, 8, 16, 32, 64};  // r = 2 is lattice dominated
    std::vector<double> orders{0.5, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct HarmonicStudy {
    std::vector<std::uint64_t> fields;  // field index of each cluster
    std::vector<MomentTable> tables;
    std::vector<TauEstimate> estimates;
    std::uint64_t walkers = 0;
    std::uint64_t absorbed = 0;
};

/// Percolation clusters selected as in run_perc_study (largest conditioned
/// cluster per field), each absorbing `walkers` first-hit walkers.
HarmonicStudy run_harmonic_study(const HarmonicConfig& config);

}  // namespace kpz
