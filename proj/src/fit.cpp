#include "kpzlab/fit.hpp"

#include <algorithm>
#include <cmath>

#include "kpzlab/errors.hpp"

namespace kpz {

FitResult fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
    const std::size_t n = x.size();
    if (y.size() != n || (!weights.empty() && weights.size() != n)) throw DomainError("fit_line: size mismatch");
    if (n < 3) throw InsufficientDataError("fit_line needs at least 3 points");
    auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(w(i) > 0.0) || !std::isfinite(w(i))) throw DomainError("fit_line: weights must be positive and finite");
        sw += w(i);
        sx += w(i) * x[i];
        sy += w(i) * y[i];
    }
    double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += w(i) * dx * dx;
        sxy += w(i) * dx * dy;
        syy += w(i) * dy * dy;
    }
    if (!(sxx > 0.0)) throw InsufficientDataError("fit_line: abscissas are all equal");

    FitResult r;
    r.exponent = sxy / sxx;
    r.intercept = my - r.exponent * mx;
    r.points = int(n);
    r.window_min = *std::min_element(x.begin(), x.end());
    r.window_max = *std::max_element(x.begin(), x.end());
    double chi2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double res = y[i] - r.intercept - r.exponent * x[i];
        chi2 += w(i) * res * res;
    }
    double dof = double(n) - 2.0;
    r.r_squared = syy > 0 ? std::max(0.0, 1.0 - chi2 / syy) : 1.0;
    double scale = weights.empty() ? chi2 / dof : std::max(1.0, chi2 / dof);
    r.std_error = std::sqrt(scale / sxx);
    return r;
}

}  // namespace kpz
