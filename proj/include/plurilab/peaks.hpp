#pragma once

#include "plurilab/domains.hpp"

#include <string>
#include <vector>

namespace plurilab {

// Support data at a boundary point p: Re <z - p, v> < 0 on the domain and
// pi(z) = <z - p, v> is the coordinate along the complex normal line.
struct SupportFrame {
    Vec p;
    Vec v;
    int checked = 0;

    [[nodiscard]] cd pi(const Vec& z) const { return v.dot(z - p); }
};

struct FrameOptions {
    int samples = 200;
    std::uint64_t seed = 31;
};

[[nodiscard]] SupportFrame support_frame(const DomainSpec& dom, const Vec& p, const FrameOptions& opts = {});

// Convex planar loop, counter-clockwise, with the area centroid as anchor.
struct Shadow {
    std::vector<cd> loop;
    cd anchor;
    double diameter = 0;
};

// Convex hull of the given points.
[[nodiscard]] Shadow planar_loop(const std::vector<cd>& points);

struct ShadowOptions {
    int directions = 512;     // support points, one per planar direction
    int random_samples = 2000;
    int flat_probes = 16;      // directions in the complex tangent plane checked for a flat face
    std::uint64_t seed = 37;
};

// pi(dom) from support points and boundary samples. Throws invariant_violation
// when the complex tangent plane at p meets the closure elsewhere nearby or 0
// ends up inside the hull.
[[nodiscard]] Shadow complex_shadow(const DomainSpec& dom, const SupportFrame& frame, const ShadowOptions& opts = {});

struct RiemannOptions {
    int nodes = 512;
    double tol = 1e-6;
    int max_iter = 2000;
};

struct MapQuality {
    int iterations = 0;
    double residual = 0;         // last Theodorsen update
    double relaxation = 1;
    double unimodularity = 0;    // max ||psi| - 1| off the nodes on the boundary
    int winding = 0;
    double at_zero = 0;          // |psi(0) - 1|
};

// Conformal map of a convex loop onto the unit disc with psi(anchor) = 0 and
// psi(0) = 1; 0 must lie on the loop.
struct RiemannMapData {
    Shadow shadow;
    std::vector<double> phi;    // disc angles of the nodes
    std::vector<double> theta;  // polar angles about the anchor
    std::vector<cd> nodes;      // boundary points
    std::vector<cd> weights;    // barycentric Cauchy weights
    std::vector<double> theta_coeffs;  // theta(phi) - phi as a real trigonometric series
    double phi_zero = 0;        // disc angle of the boundary point 0
    MapQuality quality;

    [[nodiscard]] cd operator()(cd zeta) const;
    // Boundary correspondence at polar angle t about the anchor.
    [[nodiscard]] cd boundary_value(double t) const;
    [[nodiscard]] double radius(double t) const;  // loop radius about the anchor
};

[[nodiscard]] RiemannMapData riemann_map(const Shadow& omega, const RiemannOptions& opts = {});

struct PeakOptions {
    ShadowOptions shadow;
    RiemannOptions map;
    int samples = 500;        // boundary and interior samples each
    double separation = 0.1;  // in units of the diameter
    int hessian_samples = 8;
    std::uint64_t seed = 41;
};

struct PeakReport {
    double u_at_p = 0;
    double max_u = 0;  // over samples farther than 1e-3 diam from p
    double eta = 0;    // -max u over boundary samples at least separation * diam from p
    double diameter = 0;
    int boundary_samples = 0;
    int interior_samples = 0;
    int violations = 0;  // samples away from p with u >= 0
    double min_hessian_eigenvalue = 0;
};

struct PeakFunction {
    SupportFrame frame;
    RiemannMapData map;
    PeakReport report;

    // Re psi(pi(z)) - 1.
    [[nodiscard]] double u(const Vec& z) const;
    // exp(psi(pi(z)) - 1), a holomorphic peak function.
    [[nodiscard]] cd g(const Vec& z) const;
};

[[nodiscard]] PeakFunction peak_function(const DomainSpec& dom, const Vec& p, const PeakOptions& opts = {});

// -max u over boundary samples at distance >= fraction * diameter from p.
[[nodiscard]] double peak_separation(const PeakFunction& peak, const DomainSpec& dom, int samples, double fraction,
                                     double diameter, std::uint64_t seed);

}  // namespace plurilab
