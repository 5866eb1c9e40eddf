// quadrature.hpp — adaptive Gauss-Kronrod integration with breakpoint splitting.

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "support/errors.hpp"

namespace scatterwork {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

template <typename F>
QuadratureResult integrate_adaptive(F&& f, double lo, double hi,
                                    double tol = 1e-10, int max_depth = 15) {
    if (hi <= lo) return {0.0, 0.0};
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, lo, hi, max_depth, tol, &err);
    if (!std::isfinite(v) || err > 1e3 * tol * (1.0 + std::abs(v))) {
        std::ostringstream msg;
        msg << "adaptive quadrature did not converge on [" << lo << ", " << hi
            << "]: value " << v << ", error estimate " << err;
        throw NumericalError(msg.str());
    }
    return {v, err};
}

// Integrate over [lo, hi] split at the interior breakpoints (integrand may
// kink there); each subinterval is integrated separately.
template <typename F>
QuadratureResult integrate_split(F&& f, double lo, double hi,
                                 const std::vector<double>& breakpoints,
                                 double tol = 1e-10, int max_depth = 15) {
    std::vector<double> cuts{lo};
    for (double b : breakpoints)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    QuadratureResult total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-300) continue;
        auto r = integrate_adaptive(f, cuts[i], cuts[i + 1], tol, max_depth);
        total.value += r.value;
        total.error += r.error;
    }
    return total;
}

} // namespace scatterwork
