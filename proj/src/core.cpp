#include "plurilab/core.hpp"

#include <cmath>

namespace plurilab {

RVec to_real(const Vec& z) {
    RVec x(2 * z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        x[2 * k] = z[k].real();
        x[2 * k + 1] = z[k].imag();
    }
    return x;
}

Vec to_complex(const RVec& x) {
    Vec z(x.size() / 2);
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = cd(x[2 * k], x[2 * k + 1]);
    return z;
}

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec random_unit(int n, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (;;) {
        for (int k = 0; k < n; ++k) v[k] = cd(g(rng), g(rng));
        const double nv = v.norm();
        if (nv > 1e-12) return v / nv;
    }
}

Vec real_gradient(const RealField& f, const Vec& z, double h) {
    const auto n = z.size();
    Vec g(n);
    auto partial = [&](Eigen::Index k, cd dir, double step) {
        Vec a = z, b = z;
        a[k] += dir * step;
        b[k] -= dir * step;
        return (f(a) - f(b)) / (2.0 * step);
    };
    auto rich = [&](Eigen::Index k, cd dir) {
        const double d1 = partial(k, dir, h);
        const double d2 = partial(k, dir, h / 2);
        return (4.0 * d2 - d1) / 3.0;
    };
    for (Eigen::Index k = 0; k < n; ++k) g[k] = cd(rich(k, cd(1, 0)), rich(k, cd(0, 1)));
    return g;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorKind::invalid_argument, "fit_line needs at least two paired samples");
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw Error(ErrorKind::invalid_argument, "fit_line: all abscissae coincide");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
        f.residual = std::max(f.residual, std::abs(y[i] - (f.intercept + f.slope * x[i])));
    return f;
}

}  // namespace plurilab
