#pragma once

#include <span>

namespace kpz {

struct FitResult {
    double exponent = 0.0;
    double std_error = 0.0;  // "stderr" is a macro in <cstdio>
    double window_min = 0.0;
    double window_max = 0.0;
    double r_squared = 1.0;
    double intercept = 0.0;
    int points = 0;
};

/// Least-squares line y = a + b x.  `exponent` holds the slope b.  With
/// weights (inverse variances) the slope error is sqrt(max(1, chi2/dof)/Sxx);
/// without, it is the residual estimate.  Needs at least 3 points.
FitResult fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> weights = {});

}  // namespace kpz
