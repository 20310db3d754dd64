#pragma once

#include "plurilab/core.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace plurilab::detail {

struct GradedResult {
    cd value = 0;
    double error = 0;  // infinite when the pieces stop shrinking
};

// int_0^hi f by adaptive Gauss-Kronrod on pieces [h/2, h] graded towards 0.
// Stops once a piece falls below 1e-3 tol relative to the running value; a
// run of 30 pieces that fail to shrink is reported as divergent.
template <class F>
GradedResult graded_integral(F f, double hi, double tol, int max_depth, int max_pieces = 200) {
    GradedResult r;
    double prev = 0;
    int stalled = 0;
    for (int piece = 0; piece < max_pieces && hi > 0; ++piece) {
        const double lo = piece == max_pieces - 1 ? 0.0 : 0.5 * hi;
        // Integrate over [0, 1]: Boost's error estimate has an absolute floor
        // that never clears on tiny intervals.
        const double w = hi - lo;
        auto unit = [&](double u) -> cd { return f(lo + w * u); };
        double e = 0;
        const cd part = w * cd(boost::math::quadrature::gauss_kronrod<double, 21>::integrate(unit, 0.0, 1.0, max_depth, tol, &e));
        e *= w;
        r.value += part;
        r.error += e;
        hi = lo;
        stalled = std::abs(part) > 0.7 * prev && prev > 0 ? stalled + 1 : 0;
        prev = std::abs(part);
        if (stalled >= 30) {
            r.error = std::numeric_limits<double>::infinity();
            break;
        }
        if (std::abs(part) + e < 1e-3 * tol * std::max(1.0, std::abs(r.value)) && piece > 4) {
            // The rest of [0, hi] contributes like this piece or less.
            r.error += std::abs(part) + e;
            break;
        }
    }
    return r;
}

}  // namespace plurilab::detail
