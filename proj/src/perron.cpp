#include "plurilab/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace plurilab {

namespace {

RVec grid_coords(PerronMode mode, const Vec& z) {
    if (mode == PerronMode::full) return to_real(z);
    RVec c(2);
    c << std::abs(z[0]), std::abs(z[1]);
    return c;
}

}  // namespace

RVec PerronSolution::coords(std::size_t k) const {
    RVec c(dims);
    for (int a = dims - 1; a >= 0; --a) {
        const std::size_t ia = k % std::size_t(points);
        k /= std::size_t(points);
        c[a] = lo[a] + (hi[a] - lo[a]) * double(ia) / (points - 1);
    }
    return c;
}

Vec PerronSolution::node(std::size_t k) const {
    const RVec c = coords(k);
    if (mode == PerronMode::full) return to_complex(c);
    Vec z(2);
    z << c[0], c[1];
    return z;
}

void PerronSolution::interpolation_weights(const Vec& z,
                                           const std::function<void(std::size_t, double)>& emit) const {
    const RVec c = grid_coords(mode, z);
    if (c.size() != dims) throw Error(ErrorKind::invalid_argument, "point has the wrong dimension");
    std::vector<int> base(dims);
    std::vector<double> frac(dims);
    for (int a = 0; a < dims; ++a) {
        const double step = (hi[a] - lo[a]) / (points - 1);
        const double t = std::clamp((c[a] - lo[a]) / step, 0.0, double(points - 1));
        base[a] = std::min(int(t), points - 2);
        frac[a] = t - base[a];
    }
    for (int corner = 0; corner < (1 << dims); ++corner) {
        double w = 1;
        std::size_t k = 0;
        for (int a = 0; a < dims; ++a) {
            const int bit = (corner >> a) & 1;
            w *= bit ? frac[a] : 1 - frac[a];
            k = k * std::size_t(points) + std::size_t(base[a] + bit);
        }
        if (w != 0) emit(k, w);
    }
}

double PerronSolution::at(const Vec& z) const {
    double v = 0;
    interpolation_weights(z, [&](std::size_t k, double w) { v += w * values[k]; });
    return v;
}

PerronSolution perron_oracle(const DomainSpec& dom, const BoundaryData& g, const PerronOptions& opts) {
    if (opts.points < 3 || opts.points > 21)
        throw Error(ErrorKind::invalid_argument, "oracle grid must have 3 to 21 points per axis");
    if (opts.directions < 1 || opts.radii < 1 || opts.circle < 3)
        throw Error(ErrorKind::invalid_argument, "oracle disc sampling options out of range");
    PerronSolution sol;
    sol.mode = opts.mode;
    sol.points = opts.points;
    if (opts.mode == PerronMode::reinhardt) {
        if (dom.n != 2 || !dom.flags.reinhardt)
            throw Error(ErrorKind::invalid_argument, "Reinhardt oracle needs a Reinhardt domain in C^2");
        sol.dims = 2;
        sol.lo = RVec::Zero(2);
        sol.hi = RVec(2);
        for (int a = 0; a < 2; ++a) {
            Vec dir = Vec::Zero(2);
            dir[a] = 1.0;
            sol.hi[a] = first_exit(dom, Vec::Zero(2), dir);
        }
    } else {
        if (dom.n > 2) throw Error(ErrorKind::invalid_argument, "full oracle grid supports n <= 2");
        sol.dims = 2 * dom.n;
        sol.lo = dom.box_lo;
        sol.hi = dom.box_hi;
    }
    for (int a = 0; a < sol.dims; ++a) sol.spacing = std::max(sol.spacing, (sol.hi[a] - sol.lo[a]) / (opts.points - 1));

    std::size_t total = 1;
    for (int a = 0; a < sol.dims; ++a) total *= std::size_t(opts.points);
    sol.values.assign(total, 0.0);
    sol.interior.assign(total, 0);

    Rng rng(opts.seed);
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& b : sample_boundary(dom, 512, rng)) top = std::max(top, g(b));
    for (std::size_t k = 0; k < total; ++k) {
        const Vec z = sol.node(k);
        sol.interior[k] = dom.rho(z) < 0;
        sol.values[k] = sol.interior[k] ? top : g(z);
    }

    std::vector<Vec> dirs;
    for (int a = 0; a < dom.n && int(dirs.size()) < opts.directions; ++a) {
        Vec e = Vec::Zero(dom.n);
        e[a] = 1.0;
        dirs.push_back(e);
    }
    if (dom.n > 1)
        while (int(dirs.size()) < opts.directions) dirs.push_back(random_unit(dom.n, rng));

    // Each sampled disc becomes a sparse averaging stencil over grid nodes.
    struct Stencil {
        double self = 0;  // weight of the centre node itself
        std::vector<std::pair<std::size_t, double>> rest;
    };
    std::vector<std::vector<Stencil>> stencils(total);
    std::vector<cd> roots(opts.circle);
    for (int m = 0; m < opts.circle; ++m) roots[m] = std::polar(1.0, 2 * kPi * m / opts.circle);
    for (std::size_t k = 0; k < total; ++k) {
        if (!sol.interior[k]) continue;
        const Vec z = sol.node(k);
        for (const auto& dir : dirs) {
            const double R = disc_radius(dom, z, dir, {64, 1e-9, false}).disc_radius;
            for (int m = 1; m <= opts.radii; ++m) {
                std::map<std::size_t, double> acc;
                for (const cd& r : roots) {
                    const Vec w = z + (R * m / opts.radii * r) * dir;
                    sol.interpolation_weights(w, [&](std::size_t idx, double wt) { acc[idx] += wt / opts.circle; });
                }
                Stencil st;
                for (const auto& [idx, wt] : acc) {
                    if (idx == k)
                        st.self += wt;
                    else if (wt != 0)
                        st.rest.emplace_back(idx, wt);
                }
                if (st.self < 1 - 1e-12) stencils[k].push_back(std::move(st));
            }
        }
    }

    // u_k <- min(u_k, min over discs of rest/(1 - self)): the largest value
    // satisfying every sampled sub-mean inequality at k given the neighbours.
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < total; ++k)
        if (sol.interior[k]) order.push_back(k);
    double res = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iter && res > opts.tol; ++it) {
        res = 0;
        for (std::size_t q = 0; q < order.size(); ++q) {
            const std::size_t k = it % 2 ? order[order.size() - 1 - q] : order[q];
            double best = sol.values[k];
            for (const auto& st : stencils[k]) {
                double r = 0;
                for (const auto& [idx, wt] : st.rest) r += wt * sol.values[idx];
                best = std::min(best, r / (1 - st.self));
            }
            res = std::max(res, sol.values[k] - best);
            sol.values[k] = best;
        }
    }
    if (res > opts.tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "oracle iteration cap reached, residual %.3e", res);
        throw Error(ErrorKind::no_convergence, buf);
    }
    sol.iterations = it;
    sol.residual = res;
    return sol;
}

double sup_disagreement(const EnvelopeSolution& sol, const PerronSolution& oracle) {
    double worst = 0;
    for (std::size_t k = 0; k < oracle.size(); ++k)
        if (oracle.interior[k]) worst = std::max(worst, std::abs(sol.u(oracle.node(k)) - oracle.values[k]));
    return worst;
}

}  // namespace plurilab
