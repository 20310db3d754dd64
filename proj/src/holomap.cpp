#include "plurilab/holomap.hpp"

#include <cmath>

namespace plurilab {

Mat HoloMap::jac(const Vec& z) const {
    if (jacobian) return jacobian(z);
    Mat J(n, m);
    auto diff = [&](int j, double h) {
        Vec a = z, b = z;
        a[j] += h;
        b[j] -= h;
        return Vec((F(a) - F(b)) / (2 * h));
    };
    for (int j = 0; j < m; ++j) J.col(j) = (4.0 * diff(j, 5e-4) - diff(j, 1e-3)) / 3.0;
    return J;
}

double cauchy_riemann_residual(const HoloMap& f, const Vec& z, double h) {
    double worst = 0;
    for (int j = 0; j < f.m; ++j) {
        Vec xp = z, xm = z, yp = z, ym = z;
        xp[j] += h;
        xm[j] -= h;
        yp[j] += cd(0, h);
        ym[j] -= cd(0, h);
        const Vec dx = (f(xp) - f(xm)) / (2 * h);
        const Vec dy = (f(yp) - f(ym)) / (2 * h);
        worst = std::max(worst, (dy - cd(0, 1) * dx).cwiseAbs().maxCoeff());
    }
    return worst;
}

HoloMap identity_map(int m) {
    return {"identity", m, m, [](const Vec& z) { return z; }, [m](const Vec&) { return Mat(Mat::Identity(m, m)); }};
}

HoloMap linear_map(const Mat& A) {
    return {"linear", int(A.cols()), int(A.rows()), [A](const Vec& z) { return Vec(A * z); },
            [A](const Vec&) { return A; }};
}

HoloMap constant_map(const Vec& value, int m) {
    const int n = int(value.size());
    return {"constant", m, n, [value](const Vec&) { return value; },
            [n, m](const Vec&) { return Mat(Mat::Zero(n, m)); }};
}

HoloMap sqrt_embedding_map() {
    HoloMap f;
    f.name = "example25";
    f.m = 2;
    f.n = 3;
    f.F = [](const Vec& z) {
        Vec w(3);
        w << std::sqrt(z[0] + 1.0), z[1], 0.0;
        return w;
    };
    f.jacobian = [](const Vec& z) {
        Mat J = Mat::Zero(3, 2);
        J(0, 0) = 1.0 / (2.0 * std::sqrt(z[0] + 1.0));
        J(1, 1) = 1.0;
        return J;
    };
    return f;
}

}  // namespace plurilab
