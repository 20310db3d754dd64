#pragma once

#include "plurilab/core.hpp"

#include <functional>
#include <string>

namespace plurilab {

// A holomorphic map C^m -> C^n with an optional analytic Jacobian (n x m,
// entry (mu, j) = dF_mu/dz_j).
struct HoloMap {
    std::string name;
    int m = 0;
    int n = 0;
    std::function<Vec(const Vec&)> F;
    std::function<Mat(const Vec&)> jacobian;

    [[nodiscard]] Vec operator()(const Vec& z) const { return F(z); }
    // Analytic Jacobian when supplied, otherwise complex central differences
    // along each z_j with one Richardson step.
    [[nodiscard]] Mat jac(const Vec& z) const;
};

// max |dF/dy_j - i dF/dx_j| over components, by finite differences.
[[nodiscard]] double cauchy_riemann_residual(const HoloMap& f, const Vec& z, double h = 1e-5);

[[nodiscard]] HoloMap identity_map(int m);
[[nodiscard]] HoloMap linear_map(const Mat& A);
[[nodiscard]] HoloMap constant_map(const Vec& value, int m);
// (z1, z2) -> (sqrt(z1 + 1), z2, 0), principal branch.
[[nodiscard]] HoloMap sqrt_embedding_map();

}  // namespace plurilab
