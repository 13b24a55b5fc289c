#pragma once

// Site percolation on the triangular lattice.  Sites use axial coordinates
// (x, y) with neighbours (1,0), (0,1), (-1,1), (-1,0), (0,-1), (1,-1) in
// counter-clockwise order; the plane position is (x + y/2, y*sqrt(3)/2).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kpzlab/fit.hpp"

namespace kpz {

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

Point2 to_plane(Cell c);

struct PercField {
    int side = 0;
    std::vector<std::uint8_t> occupancy;  // row-major, index y*side + x
    std::uint64_t seed = 0;
    double p = 0.5;

    bool occupied(Cell c) const;
    bool inside(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < side && c.y < side; }
};

/// I.i.d. occupation with probability p from stream (seed, 0).
PercField sample_field(int side, std::uint64_t seed, double p = 0.5);

/// Seed of field `index` in a study seeded with `seed`.
inline std::uint64_t field_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ (0xD1B54A32D192ED03ull * (index + 1));
}

/// FNV-1a over the occupancy bytes.
std::uint64_t field_checksum(const PercField& field);

/// Plain PBM (P1) image, 1 = occupied.
std::string to_pbm(const PercField& field);

struct Cluster {
    Cell anchor;
    std::int64_t size = 0;
    bool touches_edge = false;
    double radius_of_gyration = 0.0;
};

/// All occupied clusters, labelled by nearest-neighbour connectivity.
std::vector<Cluster> find_clusters(const PercField& field);

/// Sites of the cluster containing `anchor`.
std::vector<Cell> cluster_sites(const PercField& field, Cell anchor);

struct HullPath {
    std::vector<Cell> sites;     // hull sites in order of first visit
    std::vector<Point2> dual;    // hexagonal-lattice vertices, first == last
    bool closed = false;
    std::size_t length() const { return dual.empty() ? 0 : dual.size() - 1; }
};

/// Wall-follower on the hexagonal dual around the outer boundary of the
/// anchor's cluster.  Throws OpenClusterError if the cluster reaches the
/// field edge.
HullPath trace_hull(const PercField& field, Cell anchor);

struct PerimeterSet {
    std::vector<Cell> sites;
};

/// Name of the accessibility rule, for run metadata.
inline constexpr const char* accessibility_rule = "next-nearest-neck-closed";

/// Hull sites reachable from outside by a walker that may not squeeze
/// between two cluster sites at next-nearest-neighbour distance.
PerimeterSet accessible_perimeter(const PercField& field, const HullPath& hull);

/// Correlation-sum dimension: for each set, the mean number of other points
/// within distance r of a point (up to `centers` random points per set),
/// averaged over sets, fitted as ln N(r) against ln r.  With two or more
/// sets the standard error is a leave-one-set-out jackknife.
FitResult mass_radius_fit(const std::vector<std::vector<Point2>>& point_sets, std::span<const double> radii,
                          std::size_t centers = 256, std::uint64_t seed = 0);

/// Mean correlation counts per radius, as used by mass_radius_fit.
std::vector<double> correlation_counts(const std::vector<Point2>& points, std::span<const double> radii,
                                       std::size_t centers, std::uint64_t seed);

struct PercConfig {
    int side = 1024;
    std::size_t clusters = 200;  // conditioned clusters wanted
    std::size_t max_fields = 100000;
    double rg_min = 0.0;  // 0: side/8
    double rg_max = 0.0;  // 0: side/4
    std::vector<double> radii{4, 8, 16, 32};  // r <= rg_min/4 at side 1024
    std::size_t centers = 256;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct ClusterRecord {
    std::uint64_t field = 0;
    Cell anchor;
    double radius_of_gyration = 0.0;
    std::size_t hull_length = 0;
    std::size_t hull_sites = 0;
    std::size_t ep_sites = 0;
};

struct PercStudy {
    std::vector<ClusterRecord> records;
    std::size_t fields = 0;
    std::vector<double> radii;
    std::vector<double> hull_counts;  // ensemble-mean correlation counts
    std::vector<double> ep_counts;
    FitResult hull_fit;
    FitResult ep_fit;
};

/// Scan fields (seed, field index) until enough conditioned clusters are
/// found, then fit hull and accessible-perimeter dimensions.
PercStudy run_perc_study(const PercConfig& config);

}  // namespace kpz
