#pragma once

#include "plurilab/domains.hpp"
#include "plurilab/holomap.hpp"

#include <string>
#include <vector>

namespace plurilab {

// Points b + t * (witness - b)/|witness - b| for boundary points b and t
// log-uniform in [t_min, t_max]; only interior points are kept.
[[nodiscard]] std::vector<Vec> boundary_layer_samples(const DomainSpec& dom, int count, double t_min, double t_max,
                                                      Rng& rng);

// Largest singular value of F'(z).
[[nodiscard]] double jacobian_norm(const HoloMap& F, const Vec& z);

struct ApproachRow {
    double delta_D = 0;
    double delta_Omega = 0;
};

struct ProperVerdict {
    std::vector<ApproachRow> rows;
    bool tends_to_zero = false;
};

// One verdict per sequence: the last delta_Omega is below a tenth of the first and
// at least 80% of the steps are nonincreasing, over at least 8 points.
[[nodiscard]] std::vector<ProperVerdict> properness_probe(const HoloMap& F, const DomainSpec& D, const DomainSpec& Omega,
                                                          const std::vector<std::vector<Vec>>& seqs);

struct ProductNorm {
    int mu = 0, j = 0, nu = 0, k = 0;
    double value = 0;   // at budget
    double refined = 0;  // at 4 x budget
    double ratio = 1;   // refined / value, 1 for 0/0
};

struct JacobianLpReport {
    double p = 0;
    int budget = 0;
    std::vector<ProductNorm> products;  // m^2 n^2 entries
    bool pass = false;
};

// L^p norms of dF_mu/dz_j * conj(dF_nu/dz_k) over D, stable under a fourfold budget.
[[nodiscard]] JacobianLpReport jacobian_lp_check(const HoloMap& F, const DomainSpec& D, double p, int budget = 4000,
                                                 std::uint64_t seed = 1);

struct HopfOptions {
    double safety = 0.9;  // c0 = safety * min over fit samples of -rho/delta^alpha
    DistanceOptions distance;
};

struct HopfFit {
    double c0 = 0;
    double alpha = 1;  // at least 1
    double slope = 0;  // raw least-squares exponent
    int fit_samples = 0;
    int held_out = 0;
    int violations = 0;  // held-out points with rho > -c0 delta^alpha

    [[nodiscard]] double pass_rate() const { return held_out ? 1.0 - double(violations) / held_out : 1.0; }
};

// Fit -rho ~ c delta^alpha on even-indexed samples, check rho <= -c0 delta^alpha on the rest.
[[nodiscard]] HopfFit hopf_fit(const RealField& rho, const DomainSpec& Omega, const std::vector<Vec>& samples,
                               const HopfOptions& opts = {});

struct ChainConstants {
    double s = 0;           // target-domain Hoelder exponent (input)
    double s0 = 0;          // decay exponent of rho_Omega o F
    double alpha_hopf = 1;  // from hopf_fit
    double c0 = 0;
    double s_star = 0;   // s0 / alpha_hopf
    double s_tilde = 0;  // 1 - s s_star / 2
    double M = 0;        // empirical Step 1 constant
    double M_star = 0;
    double C0 = 0;
    double C1 = 0;  // (C0 / c0)^(1/alpha_hopf)
    int fit_samples = 0;
    int held_out = 0;
    int distance_violations = 0;    // delta_Omega(F) > C1 delta_D^s_star
    int derivative_violations = 0;  // |F'| > M_star / delta_D^s_tilde

    [[nodiscard]] bool holds() const { return distance_violations == 0 && derivative_violations == 0; }
};

// Default s for a target domain in C^n: midpoint of (0, 1/(n+1)).
[[nodiscard]] double default_target_exponent(const DomainSpec& Omega);

struct ChainOptions {
    double safety = 1.1;  // inflation of the fitted C0 and M_star
    DistanceOptions distance;
};

[[nodiscard]] ChainConstants exponent_chain(const HoloMap& F, const DomainSpec& D, const DomainSpec& Omega,
                                            const RealField& rho_Omega, double s, const HopfFit& hopf,
                                            const std::vector<Vec>& samples, const ChainOptions& opts = {});

struct ExtensionValue {
    cd value;
    double error = 0;
};

struct ExtensionOptions {
    double s_tilde = 0.5;
    double tol = 1e-8;
    int max_depth = 12;
};

// F_j(xi + t' v0) - int_0^t' (F'(xi + x v0) v0)_j dx, with x = y^(1/(1 - s_tilde)).
// error is the summed Gauss-Kronrod estimate plus the neglected tail bound.
[[nodiscard]] ExtensionValue boundary_extend(const HoloMap& F, const Vec& xi, const Vec& v0, double t_prime, int j,
                                             const ExtensionOptions& opts = {});
[[nodiscard]] Vec boundary_extend(const HoloMap& F, const Vec& xi, const Vec& v0, double t_prime,
                                  const ExtensionOptions& opts = {});

struct HoloMapAnalysis {
    HoloMap F;
    ChainConstants constants;
    std::vector<Vec> xi;
    std::vector<Vec> extension;  // F. at each xi
};

struct LipschitzChart {
    Vec p;
    Mat U;  // unitary; U (z - p) has the inward direction along i e_m
    double radius = 0;
    std::vector<RVec> graph_x;  // (w', Re w_m) packed as reals
    std::vector<double> graph_psi;
    double psi_lipschitz = 0;
    double C = 1;  // Lipschitz constant of y = Im w_m - psi
    int checked = 0;
    int violations = 0;  // sandwich failures
    int frame_retries = 0;

    [[nodiscard]] Vec chart(const Vec& z) const { return U * (z - p); }
    [[nodiscard]] Vec unchart(const Vec& w) const { return U.adjoint() * w + p; }
};

struct ChartOptions {
    double radius = 0.1;
    int graph_samples = 200;
    int checks = 100;
    std::uint64_t seed = 13;
    DistanceOptions distance;
};

[[nodiscard]] LipschitzChart lipschitz_chart_fit(const DomainSpec& dom, const Vec& p, const ChartOptions& opts = {});
// psi at the chart point (w', Re w_m); throws if the vertical line misses the boundary.
[[nodiscard]] double chart_graph(const DomainSpec& dom, const LipschitzChart& c, const Vec& w);
[[nodiscard]] double chart_height(const DomainSpec& dom, const LipschitzChart& c, const Vec& z);

struct ScanRow {
    double eps = 0;
    double kappa = 0;
    double r = 0;
    double extension_osc = 0;  // max |F.(xi1) - F.(xi2)| over sampled pairs closer than r
};

struct ScanOptions {
    double M_star = 1;
    double s_tilde = 0.5;
    int boundary_points = 40;
    std::uint64_t seed = 19;
};

[[nodiscard]] double kappa_for(double eps, double M_star, double s_tilde);

struct ScanTable {
    std::vector<Vec> xi;         // sampled boundary points of the patch
    std::vector<Vec> extension;  // F. at each xi
    std::vector<ScanRow> rows;
};

[[nodiscard]] ScanTable extension_continuity_scan(const HoloMap& F, const DomainSpec& D,
                                                const LipschitzChart& patch, const std::vector<double>& eps_list,
                                                const ScanOptions& opts = {});

struct ConeCondition {
    double theta = 0;
    double r0 = 0;
    double K_margin = 0;  // samples with delta above this lie in K
    std::vector<double> per_sample;
    Vec worst;  // anchor of the narrowest cone
};

struct ConeAnchor {
    Vec apex;  // on the boundary
    Vec axis;  // empty: inward normal, or towards the witness where rho is singular
};

struct ConeOptions {
    double r0 = 0.05;
    int samples = 40;
    int membership = 200;
    double t_min = 1e-3, t_max = 2e-2;
    std::vector<ConeAnchor> anchors;
    std::uint64_t seed = 23;
    DistanceOptions distance;
};

[[nodiscard]] ConeCondition cone_probe(const DomainSpec& dom, const ConeOptions& opts = {});

}  // namespace plurilab
