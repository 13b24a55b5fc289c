#pragma once

// SLE traces from a discretized Loewner evolution: the driving function is
// held constant on each capacity step, so every step is an exact slit map and
// the trace is recovered by composing inverse maps.  Chordal traces run from
// 0 to infinity in the upper half plane; radial traces run from 0 to the
// interior point i, drawn in the same half-plane coordinates.

#include <complex>
#include <cstdint>
#include <vector>

#include "kpzlab/fit.hpp"

namespace kpz {

enum class DriveMode { Binomial, Gaussian };

const char* to_string(DriveMode m);

enum class LoewnerKind { Chordal, Radial };

const char* to_string(LoewnerKind k);

struct LoewnerDrive {
    double dt = 0.0;
    double kappa = 0.0;
    std::vector<double> increments;
    std::uint64_t seed = 0;
    DriveMode mode = DriveMode::Binomial;
    std::size_t steps() const { return increments.size(); }
};

/// Increments of +-sqrt(kappa dt) (Binomial) or N(0, kappa dt) (Gaussian)
/// drawn from stream (seed, stream).
LoewnerDrive sample_drive(double kappa, double dt, std::size_t steps, std::uint64_t seed,
                          DriveMode mode = DriveMode::Binomial, std::uint64_t stream = 0);

struct Trace {
    std::vector<std::complex<double>> points;  // points[k] = gamma(k dt), points[0] = 0
    std::vector<double> capacities;
};

/// Inverse of the slit map of capacity dt rooted at w:
/// z -> w + sqrt((z - w)^2 - 4 dt), with the root taken in the closed upper
/// half plane (on the real axis, on the side of z - w).
std::complex<double> inverse_slit(std::complex<double> z, double w, double dt);

/// O(N^2) backward composition.  Radial steps have capacity dt measured by
/// the log conformal radius seen from i.  Throws NumericalError on
/// non-finite values.
Trace trace_from_drive(const LoewnerDrive& drive, LoewnerKind kind = LoewnerKind::Chordal);

struct WindingOptions {
    double s_max = 0.0;  // 0: half the median tip-to-origin distance
    double s_min = 0.0;  // 0: four times the median step length at the tips
    int tips = 1;        // tips per trace, equally spaced over the second half
    int min_lag = 2;     // scale ratios 2^m, min_lag <= m <= max_lag, in the increment fit
    int max_lag = 5;
};

struct WindingSeries {
    std::vector<double> scales;     // descending, dyadic
    std::vector<double> means;      // mean winding relative to scales[0]
    std::vector<double> variances;  // ensemble variance of the winding
    std::size_t samples = 0;        // (trace, tip) pairs
    FitResult slope;                // variance against ln(1/s)
    FitResult mean_slope;           // mean against ln(1/s)
    // Variance of theta(s) - theta(s / 2^m), pooled over s, against m ln 2.
    // Uses every window of the scale range, so it is less noisy than `slope`
    // when the winding has stationary increments in ln s.  NaN with 0 points
    // when the scale range holds fewer than min_lag + 2 octaves.
    std::vector<double> lags;
    std::vector<double> lag_variances;
    FitResult increment_slope;
};

/// Unwrapped angle of the trace seen from its tip, read where the trace last
/// leaves the disk of radius s around the tip, relative to the largest scale.
/// Standard errors are jackknifed over traces.
WindingSeries winding_statistics(const std::vector<Trace>& traces, const WindingOptions& options = {});

struct BoxOptions {
    double eps_max = 0.0;  // 0: a quarter of the median trace diameter
    double eps_min = 0.0;  // 0: eps_max / 128
};

/// Box-counting dimension of the densified polylines: ln of the mean box
/// count against ln(1/eps) over dyadic eps.  Needs at least 2 decades.
FitResult trace_dimension(const std::vector<Trace>& traces, const BoxOptions& options = {});

/// Smallest distance between points whose indices differ by at least `gap`.
double min_separated_distance(const Trace& trace, std::size_t gap);

struct SleConfig {
    double kappa = 6.0;
    std::size_t steps = 1 << 14;
    double dt = 0.0;  // 0: 1/steps chordal, 16/steps radial
    LoewnerKind kind = LoewnerKind::Chordal;
    std::size_t traces = 200;
    DriveMode mode = DriveMode::Binomial;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// Trace i uses drive stream (seed, i).
std::vector<Trace> sample_traces(const SleConfig& config);

}  // namespace kpz
