#pragma once

#include "plurilab/domains.hpp"
#include "plurilab/kobayashi.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace plurilab {

using ScalarFunction = std::function<cd(cd)>;

// A holomorphic map from the unit disc into C^n.
struct AnalyticDisc {
    std::string name;
    int n = 0;
    std::function<Vec(cd)> psi;
    std::function<Vec(cd)> dpsi;
    std::vector<Vec> coefficients;  // power series, when known

    [[nodiscard]] Vec operator()(cd zeta) const { return psi(zeta); }
    [[nodiscard]] Vec derivative(cd zeta) const { return dpsi(zeta); }
};

// sum_k a_k zeta^k.
[[nodiscard]] AnalyticDisc series_disc(std::vector<Vec> coefficients, std::string name = "series");
// center + zeta * direction.
[[nodiscard]] AnalyticDisc linear_disc(const Vec& center, const Vec& direction);

// 1 / limsup |a_k|^(1/k) over the second half of the coefficient list.
[[nodiscard]] double series_radius_estimate(const std::vector<Vec>& coefficients);

// psi(zeta) in Omega for seeded |zeta| <= 1 - 1e-6, and the root test when coefficients are given.
[[nodiscard]] ValidationReport validate_disc(const AnalyticDisc& psi, const DomainSpec& Omega, int samples = 200,
                                             std::uint64_t seed = 5);

// Involutive automorphism of the unit ball exchanging a and 0.
[[nodiscard]] Vec ball_automorphism(const Vec& a, const Vec& z);
// Poincare distance with metric |dz| / (1 - |z|^2), so d(0, r) = atanh r.
[[nodiscard]] double disc_distance(cd a, cd b);
[[nodiscard]] double ball_distance(const Vec& p, const Vec& q);

// The complex geodesic of the unit ball through p (at zeta = 0) and q.
[[nodiscard]] AnalyticDisc ball_geodesic(const Vec& p, const Vec& q);

struct DistanceBracket {
    double lower = 0;
    double upper = 0;
    bool exact = false;
};

struct BracketOptions {
    DistanceOptions distance;
};

// Exact on a centred ball. On convex domains: lower from supporting half-planes
// (holomorphic projections into a half-plane), upper from the disc-embedding
// metric bound integrated along the segment.
[[nodiscard]] DistanceBracket kobayashi_distance(const DomainSpec& Omega, const Vec& a, const Vec& b,
                                                 const BracketOptions& opts = {});

struct DefectReport {
    double lower = 0;  // the defect lies in [lower, upper]
    double upper = 0;
    bool exact = false;
    int pairs = 0;
};

[[nodiscard]] DefectReport isometry_defect(const AnalyticDisc& psi, const DomainSpec& Omega,
                                           const std::vector<std::pair<cd, cd>>& pairs,
                                           const BracketOptions& opts = {});

struct MercerFit {
    double C1 = 0;
    double C2 = 0;
    double beta = 1;
    double slope = 0;     // log-log slope of delta against 1 - |zeta|
    double residual = 0;  // max log residual of the fit
    int fit_samples = 0;
    int held_out = 0;
    int violations = 0;  // held-out sandwich failures

    [[nodiscard]] bool validated() const { return violations == 0; }
};

struct MercerOptions {
    int angles = 8;
    double safety = 0.98;  // C1 shrinks and C2 grows by this factor
    DistanceOptions distance;
};

[[nodiscard]] std::vector<double> default_mercer_radii();

// Even-indexed radii fit, odd-indexed radii validate.
[[nodiscard]] MercerFit mercer_fit(const AnalyticDisc& psi, const DomainSpec& Omega, const std::vector<double>& radii,
                                   const MercerOptions& opts = {});

// Bound m(t) on |g'| at distance t from the unit circle.
struct Majorant {
    enum class Family { power, log };
    Family family = Family::power;
    double A = 1;
    double a = 0;

    // A t^-a.
    static Majorant power(double A, double a);
    // A (1 + log 1/t).
    static Majorant log(double A);

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] bool integrable() const;
    // int_0^t m.
    [[nodiscard]] double tail(double t) const;
};

struct HLOptions {
    double r0 = 0.5;
    double tol = 1e-10;
    int max_depth = 12;
    int check_radii = 40;
};

struct BoundaryValue {
    double theta = 0;
    cd value;
    double error = 0;
};

// g(e^{i theta}) as g(r0 e^{i theta}) + int_{r0}^1 g'(t e^{i theta}) e^{i theta} dt.
[[nodiscard]] std::vector<BoundaryValue> hl_extend(const ScalarFunction& g, const ScalarFunction& dg,
                                                   const Majorant& majorant, const std::vector<double>& angles,
                                                   const HLOptions& opts = {});
[[nodiscard]] std::vector<double> uniform_angles(int count);

struct DiniReport {
    ModulusOfContinuity omega;
    double s = 1;
    double C2 = 1;
    double c = 1;
    double eps0 = 0.1;
    double integral = 0;
    bool divergent = false;

    [[nodiscard]] double tau(double x) const;
    [[nodiscard]] bool pass() const { return !divergent && std::isfinite(integral); }
};

// int_0^eps0 sqrt(omega(C2 x^s)) / (c x) dx.
[[nodiscard]] DiniReport dini_check(const ModulusOfContinuity& omega, double C2, double s, double c,
                                    double eps0 = 0.1);

struct DerivativeRow {
    double r = 0;
    double theta = 0;
    double derivative = 0;  // |psi'(zeta)|
    double rhs = 0;         // sqrt(omega(C2 (1 - r)^(1/beta))) / (1 - r)
};

struct DerivativeBoundTable {
    std::vector<DerivativeRow> rows;
    double c_max = 0;  // largest c for which every row holds
    double c = 0;      // the requested c, 0 in calibration mode
    [[nodiscard]] bool pass() const { return c <= c_max; }
};

// |psi'| <= rhs / c on radial samples; c = 0 only calibrates.
[[nodiscard]] DerivativeBoundTable geodesic_derivative_bound(const AnalyticDisc& psi, const DomainSpec& Omega,
                                                             const ModulusOfContinuity& omega, const MercerFit& fit,
                                                             const std::vector<double>& radii, int angles = 8,
                                                             double c = 0);

struct ConvexityReport {
    int checked = 0;
    int violations = 0;
};

// Random chords between interior samples stay inside.
[[nodiscard]] ConvexityReport convexity_spot_check(const DomainSpec& dom, int pairs = 200, std::uint64_t seed = 29);

}  // namespace plurilab
