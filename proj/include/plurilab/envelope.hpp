#pragma once

#include "plurilab/domains.hpp"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace plurilab {

// Boundary data g, evaluated on the boundary. Solvers may also read it just
// outside the domain (exterior grid nodes), so it should extend continuously.
using BoundaryData = RealField;

// Lower convex envelope of (x_i, y_i) evaluated at every x_i. x strictly increasing;
// entries with y = +inf are ignored and get the envelope value where it is defined.
[[nodiscard]] std::vector<double> lower_convex_envelope(const std::vector<double>& x, const std::vector<double>& y);

// Largest convex, coordinatewise nondecreasing minorant of boundary data given
// as samples (y_i, G_i) in log coordinates; the value is the dual
// max_{a,b >= 0} [a x1 + b x2 + min_i (G_i - a y_i1 - b y_i2)].
class PointwiseEnvelope {
public:
    PointwiseEnvelope() = default;
    PointwiseEnvelope(std::vector<double> y1, std::vector<double> y2, std::vector<double> G);

    // x_j may be -inf (the coordinate axis).
    [[nodiscard]] double operator()(double x1, double x2) const;
    [[nodiscard]] bool empty() const { return G_.empty(); }
    [[nodiscard]] std::size_t size() const { return G_.size(); }

private:
    double min_term(double a, double b) const;
    double best_b(double a, double x1, double x2) const;

    std::vector<double> y1_, y2_, G_;
};

struct EnvelopeOptions {
    int nodes = 121;        // per log axis
    double x_trunc = 12.0;  // grid starts at x_j = -x_trunc
    double tol = 1e-10;
    int max_iter = 20000;
    // Treat the truncation edges x_j = -x_trunc as boundary carrying the data.
    bool pin_truncation = false;
    int curve_samples = 8000;
    int invariance_samples = 64;
    std::uint64_t seed = 5;
};

struct EnvelopeInvariants {
    bool ok = true;
    double data_excess = 0;          // max U - g over boundary-adjacent nodes and their exits
    double data_gap = 0;             // max g - U at boundary-adjacent nodes
    double convexity_defect = 0;     // max negative second difference along grid lines
    double monotonicity_defect = 0;  // max U(x) - U(x + h e_j)
};

struct HolderRow {
    double scale = 0;
    double osc = 0;
    double alpha_hat = 0;    // fit through the origin of log osc against log r
    double local_slope = 0;  // free-intercept slope over the same window
    std::vector<double> quotients;
};

struct HolderFit {
    Vec xi;
    double u_xi = 0;
    std::vector<double> alphas;
    std::vector<HolderRow> rows;

    [[nodiscard]] std::string to_json() const;
};

enum class GridCoords { log_modulus, modulus };

struct EnvelopeSolution {
    std::string method;  // "envelope" or "perron"
    GridCoords coords = GridCoords::log_modulus;
    std::vector<double> axis1, axis2;
    RMat values;  // NaN outside the domain
    double h1 = 0, h2 = 0;
    double x_trunc = 12.0;
    int iterations = 0;
    double residual = 0;
    bool pinned = false;
    BoundaryData g;
    EnvelopeInvariants invariants;
    PointwiseEnvelope pointwise;
    double curve_gap = 0;  // largest spacing of the boundary samples in z
    RealField evaluator;   // set for oracle-backed solutions
    std::vector<double> modulus_r, modulus_w;
    std::vector<HolderFit> fits;

    // Grid interpolation, falling back to the pointwise evaluator near the boundary.
    [[nodiscard]] double u(const Vec& z) const;
    [[nodiscard]] double u_pointwise(const Vec& z) const;
    [[nodiscard]] bool has_pointwise() const { return !pointwise.empty(); }
    [[nodiscard]] std::string to_csv_log() const;      // x1,x2,U
    [[nodiscard]] std::string to_csv_modulus() const;  // abs_z1,abs_z2,u
};

[[nodiscard]] EnvelopeSolution reinhardt_envelope_solve(const DomainSpec& dom, const BoundaryData& g,
                                                        const EnvelopeOptions& opts = {});

enum class PerronMode { reinhardt, full };

struct PerronOptions {
    PerronMode mode = PerronMode::reinhardt;
    int points = 11;  // per axis, at most 21
    int directions = 8;
    int radii = 8;
    int circle = 8;
    std::uint64_t seed = 17;
    double tol = 1e-9;
    int max_iter = 20000;
};

struct PerronSolution {
    PerronMode mode = PerronMode::reinhardt;
    int points = 0;
    int dims = 0;
    RVec lo, hi;
    double spacing = 0;  // largest grid step
    std::vector<double> values;
    std::vector<char> interior;
    int iterations = 0;
    double residual = 0;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    // Grid coordinates of node k: (|z1|, |z2|) or the real coordinates.
    [[nodiscard]] RVec coords(std::size_t k) const;
    [[nodiscard]] Vec node(std::size_t k) const;
    [[nodiscard]] double at(const Vec& z) const;
    // Multilinear interpolation weights of z over grid nodes.
    void interpolation_weights(const Vec& z, const std::function<void(std::size_t, double)>& emit) const;
};

// Decreasing sub-mean iteration over sampled complex discs; exterior nodes
// hold the data. Throws no_convergence with the residual at the cap.
[[nodiscard]] PerronSolution perron_oracle(const DomainSpec& dom, const BoundaryData& g,
                                           const PerronOptions& opts = {});

enum class CanonicalSolver { envelope, oracle };

// Boundary data -2|z|^2.
[[nodiscard]] BoundaryData canonical_data();
[[nodiscard]] EnvelopeSolution canonical_function(const DomainSpec& dom, CanonicalSolver solver,
                                                  const EnvelopeOptions& eopts = {},
                                                  const PerronOptions& popts = {});

struct HolderOptions {
    std::vector<double> alphas{0.5, 1.0};
    int random_samples = 12;
    double window = 0.5;  // half-width of the fit window in log2 units
    std::uint64_t seed = 3;
};

[[nodiscard]] std::vector<double> dyadic_scales(int kmin, int kmax);

// Oscillation of u around the boundary point xi at each scale.
[[nodiscard]] HolderFit holder_fit(const RealField& u, double u_xi, const DomainSpec& dom, const Vec& xi,
                                   const std::vector<double>& scales, const HolderOptions& opts = {});
// Uses the pointwise evaluator when present and u(xi) = g(xi).
[[nodiscard]] HolderFit holder_fit(const EnvelopeSolution& sol, const DomainSpec& dom, const Vec& xi,
                                   const std::vector<double>& scales, const HolderOptions& opts = {});

// Boundary-layer modulus: max over sampled boundary points of the oscillation
// along the inward normal, made nondecreasing. Fills sol.modulus_r/w.
void estimate_modulus(EnvelopeSolution& sol, const DomainSpec& dom, const std::vector<double>& radii,
                      int boundary_samples = 16);

// Largest gradient norm of g over sampled points of the closure.
[[nodiscard]] double data_lipschitz(const DomainSpec& dom, const BoundaryData& g, int samples = 400,
                                    std::uint64_t seed = 9);

// Sup over interior oracle nodes of |sol.u - oracle|.
[[nodiscard]] double sup_disagreement(const EnvelopeSolution& sol, const PerronSolution& oracle);

}  // namespace plurilab
