#include "plurilab/mappings.hpp"
#include "plurilab/monge_ampere.hpp"

#include "graded_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace plurilab {

namespace {

Vec inward_direction(const DomainSpec& dom, const Vec& p) {
    const Vec grad = real_gradient(dom.rho, p);
    if (grad.norm() > 1e-8) return -grad / grad.norm();
    return (dom.witness - p).normalized();
}

// Unitary U with U nu = i e_m.
Mat frame_for(const Vec& nu) {
    const int m = int(nu.size());
    std::vector<Vec> basis{cd(0, -1) * nu};
    for (int k = 0; k < m && int(basis.size()) < m; ++k) {
        Vec e = Vec::Zero(m);
        e[k] = 1.0;
        for (const auto& b : basis) e -= b.dot(e) * b;
        if (e.norm() > 1e-6) basis.push_back(e.normalized());
    }
    Mat U(m, m);
    for (int k = 1; k < m; ++k) U.row(k - 1) = basis[k].adjoint();
    U.row(m - 1) = basis[0].adjoint();
    return U;
}

Vec chart_point(const RVec& x, double height) {
    // x packs (w', Re w_m) as 2m - 1 reals.
    const int m = int(x.size() + 1) / 2;
    Vec w(m);
    for (int k = 0; k + 1 < m; ++k) w[k] = cd(x[2 * k], x[2 * k + 1]);
    w[m - 1] = cd(x[2 * m - 2], height);
    return w;
}

RVec random_in_ball(int dim, double radius, Rng& rng) {
    std::normal_distribution<double> g;
    RVec x(dim);
    for (int k = 0; k < dim; ++k) x[k] = g(rng);
    return x.normalized() * radius * std::pow(uniform(rng), 1.0 / dim);
}

}  // namespace

std::vector<Vec> boundary_layer_samples(const DomainSpec& dom, int count, double t_min, double t_max, Rng& rng) {
    if (!(t_min > 0) || !(t_max >= t_min)) throw Error(ErrorKind::invalid_argument, "need 0 < t_min <= t_max");
    std::vector<Vec> out;
    for (int tries = 0; int(out.size()) < count; ++tries) {
        if (tries > 50 * count + 100) throw Error(ErrorKind::no_convergence, "boundary layer sampling ran out of tries");
        const Vec b = sample_boundary(dom, 1, rng).front();
        const double t = std::exp(uniform(rng, std::log(t_min), std::log(t_max)));
        const Vec z = b + t * (dom.witness - b).normalized();
        if (dom.rho(z) < 0) out.push_back(z);
    }
    return out;
}

double jacobian_norm(const HoloMap& F, const Vec& z) {
    const Mat J = F.jac(z);
    return Eigen::JacobiSVD<Mat>(J).singularValues()[0];
}

std::vector<ProperVerdict> properness_probe(const HoloMap& F, const DomainSpec& D, const DomainSpec& Omega,
                                            const std::vector<std::vector<Vec>>& seqs) {
    std::vector<ProperVerdict> out;
    for (const auto& seq : seqs) {
        ProperVerdict v;
        for (const auto& z : seq) {
            require_interior(D, z);
            const Vec w = F(z);
            if (!(Omega.rho(w) < 0)) throw Error(ErrorKind::not_interior, "F(z) lies outside the target domain");
            v.rows.push_back({boundary_distance(D, z), boundary_distance(Omega, w)});
        }
        const std::size_t n = v.rows.size();
        if (n >= 8) {
            int down = 0;
            for (std::size_t k = 1; k < n; ++k) down += v.rows[k].delta_Omega <= v.rows[k - 1].delta_Omega;
            v.tends_to_zero = v.rows.back().delta_Omega < v.rows.front().delta_Omega / 10 && down >= 0.8 * double(n - 1);
        }
        out.push_back(std::move(v));
    }
    return out;
}

JacobianLpReport jacobian_lp_check(const HoloMap& F, const DomainSpec& D, double p, int budget, std::uint64_t seed) {
    if (F.m != D.n) throw Error(ErrorKind::invalid_argument, "map source dimension does not match the domain");
    if (!(p > F.m)) throw Error(ErrorKind::invalid_argument, "the exponent p must exceed the source dimension");
    const int m = F.m, n = F.n, count = m * m * n * n;
    auto g = [&](const Vec& z, std::vector<double>& out) {
        const Mat J = F.jac(z);
        int idx = 0;
        for (int mu = 0; mu < n; ++mu)
            for (int j = 0; j < m; ++j)
                for (int nu = 0; nu < n; ++nu)
                    for (int k = 0; k < m; ++k) out[idx++] = std::abs(J(mu, j) * std::conj(J(nu, k)));
    };
    LpOptions lo{budget, seed};
    LpOptions hi{4 * budget, seed};
    const auto a = lp_norm_estimates(g, count, D, p, lo);
    const auto b = lp_norm_estimates(g, count, D, p, hi);
    JacobianLpReport rep;
    rep.p = p;
    rep.budget = budget;
    rep.pass = true;
    int idx = 0;
    for (int mu = 0; mu < n; ++mu)
        for (int j = 0; j < m; ++j)
            for (int nu = 0; nu < n; ++nu)
                for (int k = 0; k < m; ++k, ++idx) {
                    ProductNorm pn{mu, j, nu, k, a[idx].value, b[idx].value, 1.0};
                    if (pn.value != 0 || pn.refined != 0) pn.ratio = pn.refined / pn.value;
                    const bool ok = std::isfinite(pn.value) && std::isfinite(pn.refined) && pn.ratio >= 0.8 &&
                                    pn.ratio <= 1.25;
                    rep.pass = rep.pass && ok;
                    rep.products.push_back(pn);
                }
    return rep;
}

HopfFit hopf_fit(const RealField& rho, const DomainSpec& Omega, const std::vector<Vec>& samples,
                 const HopfOptions& opts) {
    std::vector<double> r(samples.size()), d(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        r[k] = rho(samples[k]);
        if (!(r[k] < 0)) throw Error(ErrorKind::invalid_argument, "rho >= 0 at a sample");
        d[k] = boundary_distance(Omega, samples[k], opts.distance);
    }
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < samples.size(); k += 2) lx.push_back(std::log(d[k])), ly.push_back(std::log(-r[k]));
    if (lx.size() < 2 || *std::max_element(lx.begin(), lx.end()) - *std::min_element(lx.begin(), lx.end()) < 0.4)
        throw Error(ErrorKind::invalid_argument, "hopf fit needs samples at several distances");
    HopfFit f;
    f.slope = fit_line(lx, ly).slope;
    f.alpha = std::max(1.0, f.slope);
    f.fit_samples = int(lx.size());
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples.size(); k += 2) c = std::min(c, -r[k] / std::pow(d[k], f.alpha));
    f.c0 = opts.safety * c;
    for (std::size_t k = 1; k < samples.size(); k += 2) {
        ++f.held_out;
        if (r[k] > -f.c0 * std::pow(d[k], f.alpha)) ++f.violations;
    }
    return f;
}

double default_target_exponent(const DomainSpec& Omega) { return 0.5 / (Omega.n + 1); }

ChainConstants exponent_chain(const HoloMap& F, const DomainSpec& D, const DomainSpec& Omega,
                              const RealField& rho_Omega, double s, const HopfFit& hopf,
                              const std::vector<Vec>& samples, const ChainOptions& opts) {
    if (!(s > 0 && s < 1)) throw Error(ErrorKind::invalid_argument, "s must lie in (0, 1)");
    if (!(hopf.c0 > 0) || hopf.alpha < 1) throw Error(ErrorKind::invalid_argument, "run hopf_fit first");
    const std::size_t N = samples.size();
    std::vector<double> dD(N), dO(N), r(N), jn(N);
    for (std::size_t k = 0; k < N; ++k) {
        dD[k] = boundary_distance(D, samples[k], opts.distance);
        const Vec w = F(samples[k]);
        r[k] = rho_Omega(w);
        if (!(r[k] < 0) || !(Omega.rho(w) < 0)) throw Error(ErrorKind::not_interior, "F(z) lies outside the target domain");
        dO[k] = boundary_distance(Omega, w, opts.distance);
        jn[k] = jacobian_norm(F, samples[k]);
    }
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < N; k += 2) lx.push_back(std::log(dD[k])), ly.push_back(std::log(-r[k]));
    if (lx.size() < 2 || *std::max_element(lx.begin(), lx.end()) - *std::min_element(lx.begin(), lx.end()) < 0.4)
        throw Error(ErrorKind::invalid_argument, "fit degeneracy: all samples at one scale");

    ChainConstants c;
    c.s = s;
    c.alpha_hopf = hopf.alpha;
    c.c0 = hopf.c0;
    c.s0 = std::clamp(fit_line(lx, ly).slope, 1e-3, 1.0);
    c.s_star = c.s0 / c.alpha_hopf;
    c.s_tilde = 1 - s * c.s_star / 2;
    c.M = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < N; k += 2) {
        ++c.fit_samples;
        c.C0 = std::max(c.C0, -r[k] / std::pow(dD[k], c.s0));
        if (jn[k] > 0) c.M = std::min(c.M, std::pow(dO[k], s / 2) / (dD[k] * jn[k]));
    }
    // M* is a sup over every sample, so the derivative bound is consistent by
    // construction; the distance bound is the held-out test.
    for (std::size_t k = 0; k < N; ++k) c.M_star = std::max(c.M_star, jn[k] * std::pow(dD[k], c.s_tilde));
    c.C0 *= opts.safety;
    c.M_star *= opts.safety;
    c.C1 = std::pow(c.C0 / c.c0, 1 / c.alpha_hopf);
    for (std::size_t k = 1; k < N; k += 2) {
        ++c.held_out;
        if (dO[k] > c.C1 * std::pow(dD[k], c.s_star)) ++c.distance_violations;
        if (jn[k] > c.M_star / std::pow(dD[k], c.s_tilde)) ++c.derivative_violations;
    }
    return c;
}

ExtensionValue boundary_extend(const HoloMap& F, const Vec& xi, const Vec& v0, double t_prime, int j,
                               const ExtensionOptions& opts) {
    if (xi.size() != F.m || v0.size() != F.m) throw Error(ErrorKind::invalid_argument, "point has the wrong dimension");
    if (j < 0 || j >= F.n) throw Error(ErrorKind::invalid_argument, "component index out of range");
    if (!(t_prime > 0)) throw Error(ErrorKind::invalid_argument, "t' must be positive");
    if (!(opts.s_tilde > 0 && opts.s_tilde < 1)) throw Error(ErrorKind::invalid_argument, "s_tilde must lie in (0, 1)");
    const Vec v = v0.normalized();
    auto deriv = [&](double x) -> cd { return (F.jac(xi + x * v) * v)[j]; };

    // x |F'| must stay bounded as x -> 0 for the integral to exist.
    std::vector<double> g;
    for (int k = 2; k <= 10; k += 2) {
        const double x = t_prime * std::pow(10.0, -k);
        g.push_back(x * std::abs(deriv(x)));
    }
    if (std::is_sorted(g.rbegin(), g.rend()) && g.back() > 10 * g.front() && g.back() > 1e-12)
        throw Error(ErrorKind::invalid_argument, "derivative grows faster than 1/x");

    const double a = 1 / (1 - opts.s_tilde);
    auto f = [&](double y) -> cd {
        if (y <= 0) return 0.0;
        return deriv(std::pow(y, a)) * (a * std::pow(y, a - 1));
    };
    // The substituted integrand may still have a weak cusp at 0 when F' is smooth.
    const auto q = detail::graded_integral(f, std::pow(t_prime, 1 - opts.s_tilde), opts.tol, opts.max_depth);
    const cd I = q.value;
    const double err = q.error;
    if (!(err <= std::max(1e-6, 100 * opts.tol) * std::max(1.0, std::abs(I)))) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "extension quadrature did not converge, error %.3e", err);
        throw Error(ErrorKind::no_convergence, buf);
    }
    return {F(xi + t_prime * v)[j] - I, err};
}

Vec boundary_extend(const HoloMap& F, const Vec& xi, const Vec& v0, double t_prime, const ExtensionOptions& opts) {
    Vec out(F.n);
    for (int j = 0; j < F.n; ++j) out[j] = boundary_extend(F, xi, v0, t_prime, j, opts).value;
    return out;
}

double chart_graph(const DomainSpec& dom, const LipschitzChart& c, const Vec& w) {
    const int m = dom.n;
    RVec x(2 * m - 1);
    for (int k = 0; k + 1 < m; ++k) x[2 * k] = w[k].real(), x[2 * k + 1] = w[k].imag();
    x[2 * m - 2] = w[m - 1].real();
    const double T = 3 * c.radius;
    const Vec top = c.unchart(chart_point(x, T));
    if (!(dom.rho(top) < 0)) throw Error(ErrorKind::invariant_violation, "vertical line misses the domain");
    const Vec down = c.U.adjoint() * (cd(0, -1) * Vec::Unit(m, m - 1));
    return T - first_exit(dom, top, down, 1e-13);
}

double chart_height(const DomainSpec& dom, const LipschitzChart& c, const Vec& z) {
    const Vec w = c.chart(z);
    return w[dom.n - 1].imag() - chart_graph(dom, c, w);
}

LipschitzChart lipschitz_chart_fit(const DomainSpec& dom, const Vec& p, const ChartOptions& opts) {
    if (p.size() != dom.n) throw Error(ErrorKind::invalid_argument, "point has the wrong dimension");
    if (!(std::abs(dom.rho(p)) < 1e-10)) throw Error(ErrorKind::invalid_argument, "p must lie on the boundary");
    if (!(opts.radius > 0)) throw Error(ErrorKind::invalid_argument, "chart radius must be positive");
    const int m = dom.n, dim = 2 * m - 1;
    const Vec normal = inward_direction(dom, p);
    const Vec towards = (dom.witness - p).normalized();
    const std::vector<Vec> frames{normal, (normal + 0.5 * towards).normalized(), towards};

    for (std::size_t attempt = 0; attempt < frames.size(); ++attempt) {
        LipschitzChart c;
        c.p = p;
        c.U = frame_for(frames[attempt]);
        c.radius = opts.radius;
        c.frame_retries = int(attempt);
        Rng rng(opts.seed);
        try {
            const double hs = 1e-5 * opts.radius;
            for (int k = 0; k < opts.graph_samples; ++k) {
                const RVec x = random_in_ball(dim, opts.radius, rng);
                const double psi = chart_graph(dom, c, chart_point(x, 0));
                RVec grad(dim);
                for (int a = 0; a < dim; ++a) {
                    RVec xp = x, xm = x;
                    xp[a] += hs, xm[a] -= hs;
                    grad[a] = (chart_graph(dom, c, chart_point(xp, 0)) - chart_graph(dom, c, chart_point(xm, 0))) / (2 * hs);
                }
                c.psi_lipschitz = std::max(c.psi_lipschitz, grad.norm());
                c.graph_x.push_back(x);
                c.graph_psi.push_back(psi);
            }
        } catch (const Error&) {
            continue;
        }
        c.C = std::sqrt(1 + c.psi_lipschitz * c.psi_lipschitz);
        for (int k = 0; k < opts.checks; ++k) {
            const RVec x = random_in_ball(dim, 0.5 * opts.radius, rng);
            const double y = uniform(rng, 0.02, 0.5) * opts.radius;
            const Vec z = c.unchart(chart_point(x, chart_graph(dom, c, chart_point(x, 0)) + y));
            if (!(dom.rho(z) < 0)) continue;
            const double d = boundary_distance(dom, z, opts.distance);
            ++c.checked;
            if (d > y * (1 + 1e-6) + 1e-9 || y > c.C * d * (1 + 1e-6) + 1e-9) ++c.violations;
        }
        return c;
    }
    throw Error(ErrorKind::invariant_violation, "boundary is not a graph near p in any tried frame");
}

double kappa_for(double eps, double M_star, double s_tilde) {
    if (!(s_tilde < 1)) throw Error(ErrorKind::invalid_argument, "s_tilde must be below 1");
    if (!(eps > 0) || !(M_star > 0)) throw Error(ErrorKind::invalid_argument, "eps and M* must be positive");
    return std::pow((1 - s_tilde) * eps / (3 * M_star), 1 / (1 - s_tilde));
}

ScanTable extension_continuity_scan(const HoloMap& F, const DomainSpec& D, const LipschitzChart& patch,
                                    const std::vector<double>& eps_list, const ScanOptions& opts) {
    if (!(opts.s_tilde < 1)) throw Error(ErrorKind::invalid_argument, "s_tilde must be below 1");
    const int m = D.n, dim = 2 * m - 1;
    const Vec v0 = patch.U.adjoint() * (cd(0, 1) * Vec::Unit(m, m - 1));
    Rng rng(opts.seed);
    std::vector<Vec> xi;
    for (int k = 0; k < opts.boundary_points; ++k) {
        const RVec x = random_in_ball(dim, 0.5 * patch.radius, rng);
        xi.push_back(patch.unchart(chart_point(x, chart_graph(D, patch, chart_point(x, 0)))));
    }
    ExtensionOptions eo;
    eo.s_tilde = opts.s_tilde;
    std::vector<Vec> ext;
    for (const auto& x : xi) ext.push_back(boundary_extend(F, x, v0, 0.5 * patch.radius, eo));

    ScanTable t;
    for (double eps : eps_list) {
        ScanRow row;
        row.eps = eps;
        row.kappa = kappa_for(eps, opts.M_star, opts.s_tilde);
        std::vector<Vec> pushed;
        for (const auto& x : xi) pushed.push_back(F(x + row.kappa * v0));
        double r = 0, bad = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < xi.size(); ++a)
            for (std::size_t b = a + 1; b < xi.size(); ++b) {
                const double d = (xi[a] - xi[b]).norm();
                r = std::max(r, d);
                if ((pushed[a] - pushed[b]).norm() >= eps / 3) bad = std::min(bad, d);
            }
        row.r = std::min(r, bad);
        for (std::size_t a = 0; a < xi.size(); ++a)
            for (std::size_t b = a + 1; b < xi.size(); ++b)
                if ((xi[a] - xi[b]).norm() < row.r) row.extension_osc = std::max(row.extension_osc, (ext[a] - ext[b]).norm());
        t.rows.push_back(row);
    }
    t.xi = std::move(xi);
    t.extension = std::move(ext);
    return t;
}

ConeCondition cone_probe(const DomainSpec& dom, const ConeOptions& opts) {
    if (!(opts.r0 > 0) || opts.membership < 1) throw Error(ErrorKind::invalid_argument, "cone probe options out of range");
    Rng rng(opts.seed);
    // Random layer points are anchored at their nearest boundary point; explicit
    // anchors are apexes with the axis along the inward direction.
    std::vector<std::pair<Vec, RVec>> apexes;
    for (const auto& z : boundary_layer_samples(dom, opts.samples, opts.t_min, opts.t_max, rng)) {
        const BoundaryPoint bp = nearest_boundary_point(dom, z, opts.distance);
        apexes.emplace_back(bp.point, -to_real(bp.direction).normalized());
    }
    for (const auto& a : opts.anchors) {
        if (!(std::abs(dom.rho(a.apex)) < 1e-10))
            throw Error(ErrorKind::invalid_argument, "cone anchors must lie on the boundary");
        const Vec axis = a.axis.size() ? a.axis : inward_direction(dom, a.apex);
        apexes.emplace_back(a.apex, to_real(axis).normalized());
    }

    ConeCondition cc;
    cc.r0 = opts.r0;
    cc.K_margin = opts.t_max;
    cc.theta = kPi;
    std::normal_distribution<double> gauss;
    for (std::size_t s = 0; s < apexes.size(); ++s) {
        const auto& [xi, v] = apexes[s];
        // Fixed membership probes: an orthogonal unit direction, an angle fraction and a radius.
        struct Probe {
            RVec perp;
            double frac, rad;
        };
        std::vector<Probe> probes;
        // Coordinate directions on the cone's edge catch axis-aligned narrowing.
        for (Eigen::Index a = 0; a < v.size(); ++a) {
            RVec u = RVec::Unit(v.size(), a);
            u -= u.dot(v) * v;
            if (u.norm() < 1e-8) continue;
            for (double sgn : {1.0, -1.0})
                for (double rad : {0.05, 0.2, 0.5, 1.0}) probes.push_back({sgn * u.normalized(), 1.0, rad * opts.r0});
        }
        for (int k = 0; k < opts.membership; ++k) {
            RVec u(v.size());
            for (Eigen::Index a = 0; a < u.size(); ++a) u[a] = gauss(rng);
            u -= u.dot(v) * v;
            probes.push_back({u.normalized(), 1 - std::pow(uniform(rng), 2), opts.r0 * uniform(rng, 1e-3, 1.0)});
        }
        auto fits = [&](double theta) {
            for (const auto& pr : probes) {
                const double phi = 0.5 * theta * pr.frac;
                const RVec d = std::cos(phi) * v + std::sin(phi) * pr.perp;
                if (!(dom.rho(xi + to_complex(pr.rad * d)) < 0)) return false;
            }
            return true;
        };
        double lo = 0.02, hi = kPi - 1e-6;
        if (!fits(lo)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "no cone found at sample %zu (apex %.4f%+.4fi, ...)", s, xi[0].real(), xi[0].imag());
            throw Error(ErrorKind::invariant_violation, buf);
        }
        if (fits(hi)) {
            lo = hi;
        } else {
            for (int it = 0; it < 25; ++it) {
                const double mid = 0.5 * (lo + hi);
                (fits(mid) ? lo : hi) = mid;
            }
        }
        cc.per_sample.push_back(lo);
        if (lo < cc.theta) cc.theta = lo, cc.worst = xi;
    }
    return cc;
}

}  // namespace plurilab
