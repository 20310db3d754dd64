#include "plurilab/domains.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace plurilab {

namespace {

constexpr double kBoundaryEps = 1e-14;

double ellipsoid_rho(const Ellipsoid& e, const Vec& z) {
    const RVec d = to_real(z - e.center);
    return d.dot(e.shape * d) - 1.0;
}

RVec box_from_radius(int n, double r, double sign) { return RVec::Constant(2 * n, sign * r); }

void set_box(DomainSpec& d, std::initializer_list<double> lo, std::initializer_list<double> hi) {
    d.box_lo = Eigen::Map<const RVec>(lo.begin(), static_cast<Eigen::Index>(lo.size()));
    d.box_hi = Eigen::Map<const RVec>(hi.begin(), static_cast<Eigen::Index>(hi.size()));
}

// Orthonormal basis of the real orthogonal complement of u in R^{2n}.
RMat tangent_basis(const RVec& u) {
    const RMat col = u;
    Eigen::HouseholderQR<RMat> qr(col);
    RMat q = qr.householderQ();
    return q.rightCols(u.size() - 1);
}

DomainSpec make_ball(int n, double r) {
    if (!(r > 0)) throw Error(ErrorKind::invalid_argument, "ball radius must be positive");
    DomainSpec d;
    d.name = "ball";
    d.n = n;
    d.rho = [r](const Vec& z) { return z.squaredNorm() - r * r; };
    d.flags = {true, true};
    d.witness = Vec::Zero(n);
    d.bound_radius = r;
    d.box_lo = box_from_radius(n, r, -1);
    d.box_hi = box_from_radius(n, r, 1);
    d.params = {{"n", n}, {"r", r}};
    return d;
}

DomainSpec make_polydisc(int n) {
    DomainSpec d;
    d.name = "polydisc";
    d.n = n;
    d.rho = [](const Vec& z) { return z.cwiseAbs2().maxCoeff() - 1.0; };
    for (int j = 0; j < n; ++j) d.pieces.push_back([j](const Vec& z) { return std::norm(z[j]) - 1.0; });
    d.flags = {true, true};
    d.witness = Vec::Zero(n);
    d.bound_radius = std::sqrt(double(n)) * (1 + 1e-9);
    d.box_lo = box_from_radius(n, 1, -1);
    d.box_hi = box_from_radius(n, 1, 1);
    d.params = {{"n", n}};
    return d;
}

DomainSpec make_omega_phi(int n) {
    DomainSpec d;
    d.name = "omega_phi";
    d.n = n;
    d.rho = [](const Vec& z) {
        double s = phi_flat(std::norm(z[0]));
        for (Eigen::Index j = 1; j < z.size(); ++j) s += std::norm(z[j]);
        return s - 1.0;
    };
    d.flags = {true, true};
    d.witness = Vec::Zero(n);
    d.bound_radius = std::sqrt(2.0) * (1 + 1e-9);
    d.box_lo = box_from_radius(n, 1, -1);
    d.box_hi = box_from_radius(n, 1, 1);
    d.params = {{"n", n}};
    return d;
}

DomainSpec make_example_D() {
    DomainSpec d;
    d.name = "example_D";
    d.n = 2;
    d.rho = [](const Vec& z) { return std::norm(z[0]) + h_profile(z[1]); };
    d.witness = Vec::Zero(2);
    d.witness[1] = cd(0, 0.5);
    d.bound_radius = 1.2;
    set_box(d, {-0.5, -0.5, -0.36, 0.0}, {0.5, 0.5, 0.36, 1.0});
    return d;
}

DomainSpec make_example_Omega() {
    DomainSpec d;
    d.name = "example_Omega";
    d.n = 3;
    // {rho_2 < 0} has two components, exchanged by w1 -> -w1 and separated by
    // Re w1 = 0 (where rho_2 >= 3/4). Keep the one with Re w1 > 0.
    d.rho = [](const Vec& w) {
        const cd w1 = w[0].real() >= 0.0 ? w[0] : cd(0.0, w[0].imag());
        const double extra = w[0].real() >= 0.0 ? 0.0 : -w[0].real();
        return std::norm(w1 * w1 - 1.0) + h_profile(w[1]) + std::norm(w[2]) + extra;
    };
    d.witness = Vec::Zero(3);
    d.witness[0] = 1.0;
    d.witness[1] = cd(0, 0.5);
    d.bound_radius = 1.75;
    set_box(d, {0.6, -0.4, -0.36, 0.0, -0.5, -0.5}, {1.3, 0.4, 0.36, 1.0, 0.5, 0.5});
    return d;
}

}  // namespace

double phi_flat(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 0.5) return std::exp(2.0 - 1.0 / x) / 3.0;
    return (4.0 * x - 1.0) / 3.0;
}

double phi_flat_inverse(double y) {
    if (y <= 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (phi_flat(hi) < y) hi *= 2.0;
    for (int it = 0; it < 2000 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi_flat(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double h_profile(cd w) {
    const double u = w.real(), v = w.imag();
    return 2.0 * u * u - v * std::abs(v) + v * v * v * v;
}

Ellipsoid ellipsoid_ball(const Vec& center, double radius) {
    const auto m = 2 * center.size();
    return {center, RMat::Identity(m, m) / (radius * radius)};
}

Ellipsoid ellipsoid_axes(const Vec& center, const RVec& semi_axes) {
    if (semi_axes.size() != 2 * center.size())
        throw Error(ErrorKind::invalid_argument, "ellipsoid needs one semi-axis per real coordinate");
    return {center, semi_axes.cwiseAbs2().cwiseInverse().asDiagonal()};
}

DomainSpec intersection_domain(const std::vector<Ellipsoid>& ellipsoids) {
    if (ellipsoids.empty()) throw Error(ErrorKind::invalid_argument, "ellipsoid list is empty");
    const int n = static_cast<int>(ellipsoids.front().center.size());
    double R = std::numeric_limits<double>::infinity();
    for (const auto& e : ellipsoids) {
        if (e.center.size() != n || e.shape.rows() != 2 * n || e.shape.cols() != 2 * n)
            throw Error(ErrorKind::invalid_argument, "ellipsoids must share one dimension");
        Eigen::SelfAdjointEigenSolver<RMat> es(e.shape);
        const double lmin = es.eigenvalues().minCoeff();
        if (!(lmin > 0)) throw Error(ErrorKind::invalid_argument, "ellipsoid shape must be positive definite");
        R = std::min(R, e.center.norm() + 1.0 / std::sqrt(lmin));
    }
    DomainSpec d;
    d.name = "strongly_convex_intersection";
    d.n = n;
    for (const auto& e : ellipsoids) d.pieces.push_back([e](const Vec& z) { return ellipsoid_rho(e, z); });
    d.rho = [pieces = d.pieces](const Vec& z) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& p : pieces) m = std::max(m, p(z));
        return m;
    };
    d.flags = {true, false};
    d.bound_radius = R * (1 + 1e-9);
    d.box_lo = box_from_radius(n, R, -1);
    d.box_hi = box_from_radius(n, R, 1);
    d.params = {{"n", n}, {"pieces", double(ellipsoids.size())}};

    // Witness: best of centers and their mean, then compass descent on max rho_j.
    std::vector<RVec> cands;
    RVec mean = RVec::Zero(2 * n);
    for (const auto& e : ellipsoids) {
        cands.push_back(to_real(e.center));
        mean += to_real(e.center);
    }
    cands.push_back(mean / double(ellipsoids.size()));
    auto f = [&](const RVec& x) { return d.rho(to_complex(x)); };
    RVec best = cands.front();
    for (const auto& c : cands)
        if (f(c) < f(best)) best = c;
    double fb = f(best);
    for (double step = R / 4; step > 1e-9 && fb >= -1e-3; ) {
        bool moved = false;
        for (int k = 0; k < 2 * n && !moved; ++k)
            for (double s : {step, -step}) {
                RVec x = best;
                x[k] += s;
                if (const double fx = f(x); fx < fb) {
                    best = x;
                    fb = fx;
                    moved = true;
                    break;
                }
            }
        if (!moved) step /= 2;
    }
    if (!(fb < 0)) throw Error(ErrorKind::invalid_argument, "ellipsoid intersection is empty");
    d.witness = to_complex(best);
    return d;
}

std::vector<std::string> builtin_names() {
    return {"ball", "polydisc", "omega_phi", "example_D", "example_Omega", "strongly_convex_intersection"};
}

DomainSpec make_builtin(const std::string& name, const BuiltinParams& p) {
    if (p.n < 1) throw Error(ErrorKind::invalid_argument, "dimension must be at least 1");
    DomainSpec d;
    if (name == "ball")
        d = make_ball(p.n, p.r);
    else if (name == "polydisc")
        d = make_polydisc(p.n);
    else if (name == "omega_phi")
        d = make_omega_phi(p.n);
    else if (name == "example_D")
        d = make_example_D();
    else if (name == "example_Omega")
        d = make_example_Omega();
    else if (name == "strongly_convex_intersection")
        d = intersection_domain(p.ellipsoids);
    else
        throw Error(ErrorKind::unknown_name, "unknown domain '" + name + "'");
    const auto rep = validate(d);
    if (!rep.ok) throw Error(ErrorKind::invariant_violation, name + ": " + rep.failures.front());
    return d;
}

ValidationReport validate(const DomainSpec& dom, std::uint64_t seed, int samples) {
    ValidationReport rep;
    auto fail = [&](std::string s) {
        rep.ok = false;
        rep.failures.push_back(std::move(s));
    };
    if (!(dom.rho(dom.witness) < 0)) fail("interior witness has rho >= 0");
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) {
        const Vec z = 2.0 * dom.bound_radius * random_unit(dom.n, rng);
        if (!(dom.rho(z) > 0)) {
            fail("rho not positive on the sphere of radius 2R");
            break;
        }
    }
    const auto inner = sample_interior(dom, samples, rng);
    if (dom.flags.convex) {
        for (std::size_t i = 0; i + 1 < inner.size() && rep.ok; i += 2)
            for (double t : {0.25, 0.5, 0.75})
                if (!(dom.rho(t * inner[i] + (1 - t) * inner[i + 1]) < 0)) {
                    fail("sampled convexity test failed");
                    break;
                }
    }
    if (dom.flags.reinhardt) {
        for (const auto& z : inner) {
            Vec w = z;
            for (int k = 0; k < dom.n; ++k) w[k] *= std::polar(1.0, uniform(rng, 0, 2 * kPi));
            const double a = dom.rho(z), b = dom.rho(w);
            if (std::abs(a - b) > 1e-10 * (1 + std::abs(a))) {
                fail("rotation invariance test failed");
                break;
            }
        }
    }
    return rep;
}

void require_interior(const DomainSpec& dom, const Vec& z) {
    if (z.size() != dom.n) throw Error(ErrorKind::invalid_argument, "point has wrong dimension");
    const double r = dom.rho(z);
    if (std::abs(r) < kBoundaryEps) throw Error(ErrorKind::not_interior, "point lies on the boundary");
    if (!(r < 0)) throw Error(ErrorKind::not_interior, "point is not interior");
}

double first_exit(const DomainSpec& dom, const Vec& z, const Vec& dir, double tol, double hint) {
    auto inside = [&](double t) { return dom.rho(z + t * dir) < 0.0; };
    const double tmax = 1.01 * (z.norm() + dom.bound_radius) + 1e-12;
    double lo = -1, hi = -1;
    if (hint > 0) {
        // Trust the bracket only if the approach to 0.7*hint is clean.
        bool clean = true;
        for (int k = 1; k <= 24 && clean; ++k) clean = inside(0.7 * hint * k / 24.0);
        if (clean) {
            double prev = 0.7 * hint;
            for (int k = 1; k <= 16; ++k) {
                const double t = 0.7 * hint + 0.8 * hint * k / 16.0;
                if (!inside(t)) {
                    lo = prev;
                    hi = t;
                    break;
                }
                prev = t;
            }
        }
    }
    if (hi < 0) {
        const int steps = 256;
        double prev = 0.0;
        for (int k = 1; k <= steps; ++k) {
            const double t = tmax * k / steps;
            if (!inside(t)) {
                lo = prev;
                hi = t;
                break;
            }
            prev = t;
        }
        if (hi < 0) throw Error(ErrorKind::bracket_failure, "ray does not leave the domain within 2R");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BoundaryPoint nearest_boundary_point(const DomainSpec& dom, const Vec& z, const DistanceOptions& opts) {
    require_interior(dom, z);
    const int m = 2 * dom.n;
    const double ray_tol = std::min(1e-12, opts.tol * 1e-2);
    auto exit_along = [&](const RVec& u, double hint) { return first_exit(dom, z, to_complex(u), ray_tol, hint); };

    Rng rng(opts.seed);
    std::vector<std::pair<double, RVec>> seeds;
    for (int k = 0; k < m; ++k)
        for (double s : {1.0, -1.0}) {
            RVec u = RVec::Zero(m);
            u[k] = s;
            seeds.emplace_back(exit_along(u, 0), u);
        }
    for (int k = 0; k < 24 * m; ++k) {
        const RVec u = to_real(random_unit(dom.n, rng));
        seeds.emplace_back(exit_along(u, 0), u);
    }
    std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    // Keep angularly distinct starts.
    std::vector<std::pair<double, RVec>> starts;
    for (const auto& s : seeds) {
        bool distinct = true;
        for (const auto& t : starts) distinct = distinct && (s.second - t.second).norm() > 0.2;
        if (distinct) starts.push_back(s);
        if (static_cast<int>(starts.size()) == opts.multistarts) break;
    }

    double best_t = std::numeric_limits<double>::infinity();
    RVec best_u;
    for (auto [t, u] : starts) {
        double step = 0.25;
        while (step > 1e-7) {
            const RMat basis = tangent_basis(u);
            bool moved = false;
            for (Eigen::Index k = 0; k < basis.cols() && !moved; ++k)
                for (double s : {step, -step}) {
                    const RVec cand = (u + s * basis.col(k)).normalized();
                    const double tc = exit_along(cand, t);
                    if (tc < t) {
                        t = tc;
                        u = cand;
                        moved = true;
                        break;
                    }
                }
            if (!moved) step *= 0.5;
        }
        if (t < best_t) {
            best_t = t;
            best_u = u;
        }
    }
    BoundaryPoint bp;
    bp.distance = best_t;
    bp.direction = to_complex(best_u);
    bp.point = z + best_t * bp.direction;
    bp.residual = std::abs(dom.rho(bp.point));
    if (!std::isfinite(best_t))
        throw Error(ErrorKind::no_convergence, "distance minimizer failed (residual " + std::to_string(bp.residual) + ")");
    return bp;
}

double boundary_distance(const DomainSpec& dom, const Vec& z, const DistanceOptions& opts) {
    return nearest_boundary_point(dom, z, opts).distance;
}

DirectionProbe disc_radius(const DomainSpec& dom, const Vec& z, const Vec& v, const DiscOptions& opts) {
    require_interior(dom, z);
    if (v.size() != dom.n || std::abs(v.norm() - 1.0) > 1e-12)
        throw Error(ErrorKind::invalid_argument, "direction must be a unit vector");
    DirectionProbe pr;
    pr.z = z;
    pr.v = v;
    const int N = opts.theta_samples;
    auto exit_at = [&](double th, double hint) { return first_exit(dom, z, std::polar(1.0, th) * v, opts.tol, hint); };
    pr.theta.resize(N);
    pr.exit_radius.resize(N);
    int imin = 0;
    for (int k = 0; k < N; ++k) {
        pr.theta[k] = 2 * kPi * k / N;
        pr.exit_radius[k] = exit_at(pr.theta[k], k > 0 ? pr.exit_radius[k - 1] : 0.0);
        if (pr.exit_radius[k] < pr.exit_radius[imin]) imin = k;
    }
    // Golden-section refinement between the neighbours of the grid minimum.
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = pr.theta[imin] - 2 * kPi / N, b = pr.theta[imin] + 2 * kPi / N;
    const double hint = pr.exit_radius[imin];
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = exit_at(c, hint), fd = exit_at(d, hint);
    while (b - a > 1e-9) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = exit_at(c, hint);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = exit_at(d, hint);
        }
    }
    pr.disc_radius = pr.exit_radius[imin];
    pr.theta_min = pr.theta[imin];
    if (const double fm = std::min(fc, fd); fm < pr.disc_radius) {
        pr.disc_radius = fm;
        pr.theta_min = fc < fd ? c : d;
    }
    if (opts.with_delta) pr.delta = boundary_distance(dom, z);
    return pr;
}

std::string DirectionProbe::to_csv() const {
    std::ostringstream os;
    os << "theta,t_theta\n";
    char buf[64];
    for (std::size_t k = 0; k < theta.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", theta[k], exit_radius[k]);
        os << buf;
    }
    return os.str();
}

std::vector<Vec> sample_interior(const DomainSpec& dom, int count, Rng& rng) {
    std::vector<Vec> out;
    const int m = 2 * dom.n;
    const long cap = 2000L * std::max(count, 1) + 100000;
    for (long tries = 0; static_cast<int>(out.size()) < count && tries < cap; ++tries) {
        RVec x(m);
        for (int k = 0; k < m; ++k) x[k] = uniform(rng, dom.box_lo[k], dom.box_hi[k]);
        Vec z = to_complex(x);
        if (dom.rho(z) < -kBoundaryEps) out.push_back(std::move(z));
    }
    if (static_cast<int>(out.size()) < count)
        throw Error(ErrorKind::no_convergence, "interior rejection sampling ran out of tries");
    return out;
}

std::vector<Vec> sample_boundary(const DomainSpec& dom, int count, Rng& rng) {
    std::vector<Vec> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const Vec u = random_unit(dom.n, rng);
        out.push_back(dom.witness + first_exit(dom, dom.witness, u, 1e-13) * u);
    }
    return out;
}

}  // namespace plurilab
