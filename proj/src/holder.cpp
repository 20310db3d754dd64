#include "plurilab/envelope.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace plurilab {

namespace {

struct Oscillation {
    double osc = 0;
    std::vector<double> quotients;
};

Vec inward_normal(const DomainSpec& dom, const Vec& xi) {
    const Vec grad = real_gradient(dom.rho, xi);
    if (grad.norm() > 1e-10) return -grad / grad.norm();
    return (dom.witness - xi).normalized();
}

}  // namespace

BoundaryData canonical_data() {
    return [](const Vec& z) { return -2.0 * z.squaredNorm(); };
}

EnvelopeSolution canonical_function(const DomainSpec& dom, CanonicalSolver solver, const EnvelopeOptions& eopts,
                                    const PerronOptions& popts) {
    const BoundaryData g = canonical_data();
    if (solver == CanonicalSolver::envelope) return reinhardt_envelope_solve(dom, g, eopts);
    auto p = std::make_shared<PerronSolution>(perron_oracle(dom, g, popts));
    EnvelopeSolution sol;
    sol.method = "perron";
    sol.coords = GridCoords::modulus;
    sol.g = g;
    sol.iterations = p->iterations;
    sol.residual = p->residual;
    sol.evaluator = [p](const Vec& z) { return p->at(z); };
    if (p->mode == PerronMode::reinhardt) {
        const int P = p->points;
        sol.h1 = (p->hi[0] - p->lo[0]) / (P - 1);
        sol.h2 = (p->hi[1] - p->lo[1]) / (P - 1);
        for (int i = 0; i < P; ++i) sol.axis1.push_back(p->lo[0] + i * sol.h1);
        for (int j = 0; j < P; ++j) sol.axis2.push_back(p->lo[1] + j * sol.h2);
        sol.values = RMat(P, P);
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j) sol.values(i, j) = p->values[std::size_t(i * P + j)];
    }
    return sol;
}

std::vector<double> dyadic_scales(int kmin, int kmax) {
    std::vector<double> s;
    for (int k = kmin; k <= kmax; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

HolderFit holder_fit(const RealField& u, double u_xi, const DomainSpec& dom, const Vec& xi,
                     const std::vector<double>& scales, const HolderOptions& opts) {
    if (xi.size() != dom.n) throw Error(ErrorKind::invalid_argument, "xi has the wrong dimension");
    if (!(std::abs(dom.rho(xi)) <= 1e-8)) throw Error(ErrorKind::invalid_argument, "xi must lie on the boundary");
    if (scales.empty()) throw Error(ErrorKind::invalid_argument, "at least one scale is required");
    for (double r : scales)
        if (!(r > 0)) throw Error(ErrorKind::invalid_argument, "scales must be positive");
    const Vec nu = inward_normal(dom, xi);

    std::map<long long, Oscillation> cache;
    auto osc_at = [&](double r) -> const Oscillation& {
        const long long key = std::llround(std::log2(r) * 1e6);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        std::vector<Vec> cand;
        for (double c : {1.0, 0.5, 0.25}) cand.push_back(xi + (r * c) * nu);
        Rng rng(opts.seed ^ std::uint64_t(key));
        for (int k = 0; k < opts.random_samples; ++k) {
            const Vec w = random_unit(dom.n, rng);
            cand.push_back(xi + (r * std::pow(uniform(rng), 1.0 / (2 * dom.n))) * w);
        }
        Oscillation o;
        o.quotients.assign(opts.alphas.size(), 0.0);
        int used = 0;
        for (const auto& z : cand) {
            if (!(dom.rho(z) < 0)) continue;
            const double d = (z - xi).norm();
            if (!(d > 0)) continue;
            const double v = std::abs(u(z) - u_xi);
            o.osc = std::max(o.osc, v);
            for (std::size_t a = 0; a < opts.alphas.size(); ++a)
                o.quotients[a] = std::max(o.quotients[a], v / std::pow(d, opts.alphas[a]));
            ++used;
        }
        if (used == 0) throw Error(ErrorKind::invalid_argument, "no interior points within the scale");
        return cache.emplace(key, std::move(o)).first->second;
    };

    HolderFit fit;
    fit.xi = xi;
    fit.u_xi = u_xi;
    fit.alphas = opts.alphas;
    const double f = std::exp2(opts.window);
    for (double r : scales) {
        HolderRow row;
        row.scale = r;
        const Oscillation& mid = osc_at(r);
        row.osc = mid.osc;
        row.quotients = mid.quotients;
        std::vector<double> lr, lo;
        for (double s : {r / f, r, r * f}) {
            lr.push_back(std::log(s));
            lo.push_back(std::log(osc_at(s).osc));
        }
        if (std::all_of(lo.begin(), lo.end(), [](double v) { return std::isfinite(v); })) {
            double num = 0, den = 0;
            for (std::size_t k = 0; k < lr.size(); ++k) num += lr[k] * lo[k], den += lr[k] * lr[k];
            row.alpha_hat = num / den;
            row.local_slope = fit_line(lr, lo).slope;
        } else {
            row.alpha_hat = row.local_slope = std::numeric_limits<double>::infinity();
        }
        fit.rows.push_back(std::move(row));
    }
    return fit;
}

HolderFit holder_fit(const EnvelopeSolution& sol, const DomainSpec& dom, const Vec& xi,
                     const std::vector<double>& scales, const HolderOptions& opts) {
    double resolution;
    RealField u;
    if (sol.has_pointwise()) {
        // The dual minimum over boundary samples errs quadratically in their spacing.
        resolution = 4 * sol.curve_gap * sol.curve_gap;
        u = [&sol](const Vec& z) { return sol.u_pointwise(z); };
    } else {
        const double h = std::max(sol.h1, sol.h2);
        resolution = 2 * h;
        if (sol.coords == GridCoords::log_modulus && !sol.axis1.empty())
            resolution *= std::exp(std::max(sol.axis1.back(), sol.axis2.back()));
        u = [&sol](const Vec& z) { return sol.u(z); };
    }
    const double smallest = *std::min_element(scales.begin(), scales.end()) / std::exp2(opts.window);
    if (smallest < resolution) throw Error(ErrorKind::invalid_argument, "smallest scale is below the solution's resolution");
    return holder_fit(u, sol.g(xi), dom, xi, scales, opts);
}

void estimate_modulus(EnvelopeSolution& sol, const DomainSpec& dom, const std::vector<double>& radii,
                      int boundary_samples) {
    if (dom.n != 2 || boundary_samples < 1) throw Error(ErrorKind::invalid_argument, "modulus estimate needs C^2");
    std::vector<double> r = radii;
    std::sort(r.begin(), r.end());
    std::vector<double> w(r.size(), 0.0);
    for (int k = 0; k < boundary_samples; ++k) {
        const double th = 0.5 * kPi * (k + 0.5) / boundary_samples;
        Vec dir(2);
        dir << std::cos(th), std::sin(th);
        const Vec xi = first_exit(dom, Vec::Zero(2), dir) * dir;
        const Vec nu = inward_normal(dom, xi);
        const double gx = sol.g(xi);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (double c : {1.0, 0.5}) {
                const Vec z = xi + (r[i] * c) * nu;
                if (dom.rho(z) < 0) w[i] = std::max(w[i], std::abs(sol.u(z) - gx));
            }
    }
    for (std::size_t i = 1; i < w.size(); ++i) w[i] = std::max(w[i], w[i - 1]);
    sol.modulus_r = r;
    sol.modulus_w = w;
}

double data_lipschitz(const DomainSpec& dom, const BoundaryData& g, int samples, std::uint64_t seed) {
    Rng rng(seed);
    double L = 0;
    auto pts = sample_interior(dom, samples / 2, rng);
    for (auto& b : sample_boundary(dom, samples - samples / 2, rng)) pts.push_back(b);
    for (const auto& z : pts) L = std::max(L, real_gradient(g, z).norm());
    return L;
}

std::string HolderFit::to_json() const {
    nlohmann::json j;
    auto& x = j["xi"] = nlohmann::json::array();
    for (Eigen::Index k = 0; k < xi.size(); ++k) x.push_back({xi[k].real(), xi[k].imag()});
    j["u_xi"] = u_xi;
    j["alphas"] = alphas;
    auto& rs = j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json q;
        for (std::size_t a = 0; a < alphas.size(); ++a) q.push_back({{"alpha", alphas[a]}, {"quotient", r.quotients[a]}});
        rs.push_back({{"scale", r.scale},
                      {"osc", r.osc},
                      {"alpha_hat", r.alpha_hat},
                      {"local_slope", r.local_slope},
                      {"quotients", q}});
    }
    return j.dump(2);
}

}  // namespace plurilab
