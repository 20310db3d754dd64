#pragma once

#include "plurilab/domains.hpp"
#include "plurilab/holomap.hpp"

#include <functional>
#include <string>
#include <vector>

namespace plurilab {

// a_{jk} = d^2 u / dz_j dzbar_k from central differences of step h, combined
// with the step h/2 by one Richardson extrapolation. The result is Hermitian.
[[nodiscard]] Mat complex_hessian(const RealField& u, const Vec& z, double h = 1e-3);

struct HessianEstimate {
    Mat value;
    double richardson_gap = 0.0;  // max |entry(h) - entry(h/2)|
};
[[nodiscard]] HessianEstimate complex_hessian_checked(const RealField& u, const Vec& z, double h = 1e-3);

// m! det(a): with this normalization u = |z|^2 has density m!.
[[nodiscard]] double ma_density(const Mat& a);

[[nodiscard]] double min_eigenvalue(const Mat& hermitian);

struct HermitianField {
    int n = 0;
    std::function<Mat(const Vec&)> entries;
    double essential_bound = 0.0;
    std::function<bool(const Vec&)> defined_at;  // empty: everywhere

    [[nodiscard]] Mat operator()(const Vec& w) const { return entries(w); }
};

[[nodiscard]] HermitianField identity_field(int n);
// Coefficient field of the complex Hessian of u, with a membership test.
[[nodiscard]] HermitianField hessian_field(const RealField& u, int n, double essential_bound,
                                           std::function<bool(const Vec&)> defined_at = {});

struct FieldCheck {
    bool ok = true;
    double symmetry_defect = 0.0;
    double max_entry = 0.0;
};
[[nodiscard]] FieldCheck check_field(const HermitianField& b, const std::vector<Vec>& samples);

struct PullbackSample {
    Vec z;
    Mat a;
    double density = 0.0;
};

// a_{jk}(z) = sum_{mu,nu} b_{mu nu}(F(z)) dF_mu/dz_j conj(dF_nu/dz_k).
[[nodiscard]] PullbackSample pullback_field(const HoloMap& F, const HermitianField& b, const Vec& z);

struct PullbackField {
    HoloMap F;
    HermitianField b;
    double p = 0.0;
    std::string normalization = "a_jk = d2u/dz_j dzbar_k; density = m! det(a)";

    [[nodiscard]] int m() const { return F.m; }
    [[nodiscard]] PullbackSample at(const Vec& z) const { return pullback_field(F, b, z); }
};

struct LpOptions {
    int budget = 20000;
    std::uint64_t seed = 1;
    double nonfinite_tolerance = 1e-6;
};

struct LpEstimate {
    double value = 0.0;      // (int |g|^p)^{1/p} at the full budget
    double coarse = 0.0;     // same from the first stratified pass only
    double error_bar = 0.0;  // |value - coarse| + stratified standard error
    long samples = 0;
    long nonfinite = 0;
};

// Stratified estimate over the sampling box of dom: a coarse pass over every
// cell, then the remaining budget spent on cells straddling the boundary.
[[nodiscard]] LpEstimate lp_norm_estimate(const RealField& g, const DomainSpec& dom, double p,
                                          const LpOptions& opts = {});
// Several integrands sharing the sample points.
[[nodiscard]] std::vector<LpEstimate> lp_norm_estimates(
    const std::function<void(const Vec&, std::vector<double>&)>& g, int count, const DomainSpec& dom, double p,
    const LpOptions& opts = {});

}  // namespace plurilab
