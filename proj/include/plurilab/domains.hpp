#pragma once

#include "plurilab/core.hpp"

#include <map>
#include <string>
#include <vector>

namespace plurilab {

struct DomainFlags {
    bool convex = false;
    bool reinhardt = false;
};

// {x in R^{2n} : (x - c)^T A (x - c) < 1}, c given as a complex point.
struct Ellipsoid {
    Vec center;
    RMat shape;
};

[[nodiscard]] Ellipsoid ellipsoid_ball(const Vec& center, double radius);
[[nodiscard]] Ellipsoid ellipsoid_axes(const Vec& center, const RVec& semi_axes);

using ParamRecord = std::map<std::string, double>;

struct DomainSpec {
    std::string name;
    int n = 0;
    RealField rho;
    DomainFlags flags;
    Vec witness;
    double bound_radius = 0.0;
    std::vector<RealField> pieces;
    // Axis-aligned sampling box in real coordinates (length 2n each).
    RVec box_lo;
    RVec box_hi;
    ParamRecord params;

    [[nodiscard]] bool contains(const Vec& z) const { return rho(z) < 0.0; }
};

struct BuiltinParams {
    int n = 2;
    double r = 1.0;
    std::vector<Ellipsoid> ellipsoids;
};

// Names: ball, polydisc, omega_phi, example_D, example_Omega, strongly_convex_intersection.
[[nodiscard]] DomainSpec make_builtin(const std::string& name, const BuiltinParams& params = {});
[[nodiscard]] DomainSpec intersection_domain(const std::vector<Ellipsoid>& ellipsoids);
[[nodiscard]] std::vector<std::string> builtin_names();

// The flat-at-zero profile phi(x) = e^2 exp(-1/x)/3 on (0, 1/2), (4x - 1)/3 beyond.
[[nodiscard]] double phi_flat(double x);
[[nodiscard]] double phi_flat_inverse(double y);
// h(u + iv) = 2u^2 - beta(v) + v^4 with beta(v) = v|v|.
[[nodiscard]] double h_profile(cd w);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> failures;
};
[[nodiscard]] ValidationReport validate(const DomainSpec& dom, std::uint64_t seed = 7, int samples = 64);

// Throws not_interior unless rho(z) < 0 with |rho(z)| >= 1e-14.
void require_interior(const DomainSpec& dom, const Vec& z);

// First t > 0 with rho(z + t*dir) >= 0 (dir a unit vector of R^{2n} in packed form).
// A positive hint switches to a bracket around the expected exit.
[[nodiscard]] double first_exit(const DomainSpec& dom, const Vec& z, const Vec& dir, double tol = 1e-10,
                                double hint = 0.0);

struct DistanceOptions {
    double tol = 1e-8;
    int multistarts = 16;
    std::uint64_t seed = 11;
};

struct BoundaryPoint {
    double distance = 0.0;
    Vec point;
    Vec direction;
    double residual = 0.0;  // |rho| at the returned point
};

[[nodiscard]] BoundaryPoint nearest_boundary_point(const DomainSpec& dom, const Vec& z,
                                                   const DistanceOptions& opts = {});
[[nodiscard]] double boundary_distance(const DomainSpec& dom, const Vec& z, const DistanceOptions& opts = {});

struct DirectionProbe {
    Vec z;
    Vec v;
    double delta = 0.0;
    double disc_radius = 0.0;
    double theta_min = 0.0;
    std::vector<double> theta;
    std::vector<double> exit_radius;

    [[nodiscard]] std::string to_csv() const;
};

struct DiscOptions {
    int theta_samples = 256;
    double tol = 1e-10;
    bool with_delta = true;
};

[[nodiscard]] DirectionProbe disc_radius(const DomainSpec& dom, const Vec& z, const Vec& v,
                                         const DiscOptions& opts = {});

[[nodiscard]] std::vector<Vec> sample_interior(const DomainSpec& dom, int count, Rng& rng);
// Boundary points hit by rays from the interior witness in random directions.
[[nodiscard]] std::vector<Vec> sample_boundary(const DomainSpec& dom, int count, Rng& rng);

}  // namespace plurilab
