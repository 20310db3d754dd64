#include "plurilab/geodesics.hpp"

#include "graded_quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace plurilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, double x) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

void require_unit_ball(const Vec& z, const char* what) {
    if (!(z.norm() < 1)) throw Error(ErrorKind::invalid_argument, std::string(what) + " must lie in the unit ball");
}

// Half-plane distance for {Re w < 0}, consistent with disc_distance.
double half_plane_distance(cd w1, cd w2) {
    const double q = std::abs(w1 - w2) / std::abs(w1 + std::conj(w2));
    return std::atanh(std::min(q, 1.0));
}

}  // namespace

AnalyticDisc series_disc(std::vector<Vec> coefficients, std::string name) {
    if (coefficients.empty()) throw Error(ErrorKind::invalid_argument, "series needs at least one coefficient");
    const int n = int(coefficients.front().size());
    for (const auto& a : coefficients)
        if (a.size() != n) throw Error(ErrorKind::invalid_argument, "series coefficients must share one dimension");
    AnalyticDisc d;
    d.name = std::move(name);
    d.n = n;
    d.coefficients = coefficients;
    d.psi = [c = coefficients](cd z) {
        Vec s = c.back();
        for (std::size_t k = c.size() - 1; k-- > 0;) s = (s * z + c[k]).eval();
        return s;
    };
    d.dpsi = [c = std::move(coefficients), n](cd z) {
        Vec s = Vec::Zero(n);
        for (std::size_t k = c.size() - 1; k >= 1; --k) s = (s * z + double(k) * c[k]).eval();
        return s;
    };
    return d;
}

AnalyticDisc linear_disc(const Vec& center, const Vec& direction) {
    if (center.size() != direction.size()) throw Error(ErrorKind::invalid_argument, "dimension mismatch");
    return series_disc({center, direction}, "linear");
}

double series_radius_estimate(const std::vector<Vec>& coefficients) {
    double lim = 0;
    const std::size_t K = coefficients.size();
    for (std::size_t k = std::max<std::size_t>(1, K / 2); k < K; ++k)
        lim = std::max(lim, std::pow(coefficients[k].norm(), 1.0 / double(k)));
    return lim > 0 ? 1 / lim : kInf;
}

ValidationReport validate_disc(const AnalyticDisc& psi, const DomainSpec& Omega, int samples, std::uint64_t seed) {
    ValidationReport rep;
    if (psi.n != Omega.n) {
        rep.ok = false;
        rep.failures.push_back("disc and domain dimensions differ");
        return rep;
    }
    Rng rng(seed);
    for (int k = 0; k < samples; ++k) {
        // Every fourth sample sits on the limiting circle.
        const double r = k % 4 == 0 ? 1 - 1e-6 : (1 - 1e-6) * std::sqrt(uniform(rng));
        const cd zeta = std::polar(r, uniform(rng, 0, 2 * kPi));
        if (!(Omega.rho(psi(zeta)) < 0)) {
            rep.ok = false;
            rep.failures.push_back("disc leaves the domain at |zeta| = " + fmt("%.6f", r));
            break;
        }
    }
    if (!psi.coefficients.empty() && series_radius_estimate(psi.coefficients) < 1 - 1e-9) {
        rep.ok = false;
        rep.failures.push_back("series radius of convergence below 1");
    }
    return rep;
}

Vec ball_automorphism(const Vec& a, const Vec& z) {
    if (a.size() != z.size()) throw Error(ErrorKind::invalid_argument, "dimension mismatch");
    const double aa = a.squaredNorm();
    if (aa == 0) return -z;
    const cd za = a.dot(z);  // <z, a>
    const Vec P = (za / aa) * a;
    const double s = std::sqrt(1 - aa);
    return (a - P - s * (z - P)) / (1.0 - za);
}

double disc_distance(cd a, cd b) {
    if (!(std::abs(a) < 1 && std::abs(b) < 1)) throw Error(ErrorKind::invalid_argument, "points must lie in the disc");
    return std::atanh(std::abs(a - b) / std::abs(1.0 - std::conj(b) * a));
}

double ball_distance(const Vec& p, const Vec& q) {
    require_unit_ball(p, "p");
    require_unit_ball(q, "q");
    // |phi_p(q)|^2 = 1 - (1 - |p|^2)(1 - |q|^2) / |1 - <q, p>|^2
    const double den = std::norm(1.0 - p.dot(q));
    const double x = (1 - p.squaredNorm()) * (1 - q.squaredNorm()) / den;
    return std::atanh(std::sqrt(std::max(0.0, 1 - x)));
}

AnalyticDisc ball_geodesic(const Vec& p, const Vec& q) {
    if (p.size() != q.size()) throw Error(ErrorKind::invalid_argument, "dimension mismatch");
    require_unit_ball(p, "p");
    require_unit_ball(q, "q");
    if ((p - q).norm() < 1e-14) throw Error(ErrorKind::invalid_argument, "geodesic needs distinct points");
    const int n = int(p.size());
    const Vec u = ball_automorphism(p, q).normalized();
    // phi_p(zeta u) = (p - zeta w) / (1 - zeta c).
    Vec w;
    cd c = 0;
    const double pp = p.squaredNorm();
    if (pp == 0) {
        w = u;
    } else {
        c = p.dot(u);
        const Vec P = (c / pp) * p;
        w = P + std::sqrt(1 - pp) * (u - P);
    }
    AnalyticDisc d;
    d.name = "ball_geodesic";
    d.n = n;
    d.psi = [p, w, c](cd z) -> Vec { return (p - z * w) / (1.0 - z * c); };
    d.dpsi = [p, w, c](cd z) -> Vec {
        const cd den = 1.0 - z * c;
        return (c * p - w) / (den * den);
    };
    return d;
}

DistanceBracket kobayashi_distance(const DomainSpec& Omega, const Vec& a, const Vec& b, const BracketOptions& opts) {
    require_interior(Omega, a);
    require_interior(Omega, b);
    DistanceBracket br;
    if (Omega.name == "ball") {
        const double R = Omega.params.at("r");
        br.lower = br.upper = ball_distance(a / R, b / R);
        br.exact = true;
        return br;
    }
    if (!Omega.flags.convex)
        throw Error(ErrorKind::bracket_failure, "distance bracket is unbounded without convexity");
    const Vec d = b - a;
    if (d.norm() == 0) return br;

    // Supporting half-planes at boundary points seen from a and b.
    std::vector<Vec> support;
    for (const Vec& z : {a, b, Vec(0.5 * (a + b))}) support.push_back(nearest_boundary_point(Omega, z, opts.distance).point);
    const Vec e = d.normalized();
    for (const Vec& z : {a, b})
        for (const cd rot : {cd(1, 0), cd(-1, 0), cd(0, 1), cd(0, -1)})
            support.push_back(z + first_exit(Omega, z, rot * e) * (rot * e));
    for (const auto& q : support) {
        const Vec g = real_gradient(Omega.rho, q);
        if (!(g.norm() > 0)) continue;
        const cd wa = g.dot(a - q) / g.norm(), wb = g.dot(b - q) / g.norm();
        if (!(wa.real() < 0 && wb.real() < 0)) continue;
        br.lower = std::max(br.lower, half_plane_distance(wa, wb));
    }

    // K(z; v) <= |v| / r(z; v) along the segment.
    auto metric = [&](double t) {
        const Vec z = a + t * d;
        return d.norm() / disc_radius(Omega, z, e, {256, 1e-10, false}).disc_radius;
    };
    br.upper = boost::math::quadrature::gauss<double, 20>::integrate(metric, 0.0, 1.0);
    return br;
}

DefectReport isometry_defect(const AnalyticDisc& psi, const DomainSpec& Omega,
                             const std::vector<std::pair<cd, cd>>& pairs, const BracketOptions& opts) {
    if (pairs.empty()) throw Error(ErrorKind::invalid_argument, "no pairs given");
    DefectReport rep;
    rep.exact = true;
    for (const auto& [s, t] : pairs) {
        const double dd = disc_distance(s, t);
        const auto br = kobayashi_distance(Omega, psi(s), psi(t), opts);
        rep.lower = std::max({rep.lower, br.lower - dd, dd - br.upper});
        rep.upper = std::max({rep.upper, br.upper - dd, dd - br.lower});
        rep.exact = rep.exact && br.exact;
        ++rep.pairs;
    }
    return rep;
}

std::vector<double> default_mercer_radii() {
    std::vector<double> r;
    for (int k = 2; k <= 24; ++k) r.push_back(1 - std::pow(2.0, -0.5 * k));
    return r;
}

MercerFit mercer_fit(const AnalyticDisc& psi, const DomainSpec& Omega, const std::vector<double>& radii,
                     const MercerOptions& opts) {
    if (radii.size() < 4) throw Error(ErrorKind::invalid_argument, "mercer fit needs at least four radii");
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (!(radii[i] > 0 && radii[i] < 1) || (i && !(radii[i] > radii[i - 1])))
            throw Error(ErrorKind::invalid_argument, "radii must increase inside (0, 1)");
    if (opts.angles < 1) throw Error(ErrorKind::invalid_argument, "need at least one angle");

    struct Sample {
        double t, delta;
        bool fit;
    };
    std::vector<Sample> all;
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (int j = 0; j < opts.angles; ++j) {
            const cd zeta = std::polar(radii[i], 2 * kPi * j / opts.angles);
            const Vec z = psi(zeta);
            if (!(Omega.rho(z) < 0))
                throw Error(ErrorKind::not_interior, "disc leaves the domain at |zeta| = " + fmt("%.6f", radii[i]));
            all.push_back({1 - radii[i], boundary_distance(Omega, z, opts.distance), i % 2 == 0});
        }

    MercerFit f;
    std::vector<double> lx, ly;
    f.C1 = kInf;
    for (const auto& s : all)
        if (s.fit) {
            lx.push_back(std::log(s.t));
            ly.push_back(std::log(s.delta));
            f.C1 = std::min(f.C1, s.delta / s.t);
            ++f.fit_samples;
        }
    const auto line = fit_line(lx, ly);
    f.slope = line.slope;
    f.residual = line.residual;
    if (!(f.slope > 0)) throw Error(ErrorKind::no_convergence, "distance does not decay towards the circle");
    f.beta = std::max(1.0, 1 / f.slope);
    for (const auto& s : all)
        if (s.fit) f.C2 = std::max(f.C2, s.delta / std::pow(s.t, 1 / f.beta));
    f.C1 *= opts.safety;
    f.C2 /= opts.safety;
    for (const auto& s : all)
        if (!s.fit) {
            ++f.held_out;
            const bool ok = f.C1 * s.t * (1 - 1e-6) <= s.delta && s.delta <= f.C2 * std::pow(s.t, 1 / f.beta) * (1 + 1e-6);
            if (!ok) ++f.violations;
        }
    return f;
}

Majorant Majorant::power(double A, double a) {
    if (!(A >= 0) || !std::isfinite(a)) throw Error(ErrorKind::invalid_argument, "power majorant needs A >= 0");
    Majorant m;
    m.family = Family::power;
    m.A = A;
    m.a = a;
    return m;
}

Majorant Majorant::log(double A) {
    if (!(A >= 0)) throw Error(ErrorKind::invalid_argument, "log majorant needs A >= 0");
    Majorant m;
    m.family = Family::log;
    m.A = A;
    return m;
}

double Majorant::operator()(double t) const {
    if (family == Family::power) return A * std::pow(t, -a);
    return A * (1 + std::log(1 / t));
}

bool Majorant::integrable() const { return family == Family::log || a < 1; }

double Majorant::tail(double t) const {
    if (!integrable()) return kInf;
    if (family == Family::power) return A * std::pow(t, 1 - a) / (1 - a);
    return A * t * (2 + std::log(1 / t));
}

std::vector<double> uniform_angles(int count) {
    std::vector<double> th(count);
    for (int k = 0; k < count; ++k) th[k] = 2 * kPi * k / count;
    return th;
}

std::vector<BoundaryValue> hl_extend(const ScalarFunction& g, const ScalarFunction& dg, const Majorant& majorant,
                                     const std::vector<double>& angles, const HLOptions& opts) {
    if (!(opts.r0 > 0 && opts.r0 < 1)) throw Error(ErrorKind::invalid_argument, "r0 must lie in (0, 1)");
    if (!majorant.integrable()) throw Error(ErrorKind::invalid_argument, "majorant is not integrable at the circle");

    const double t0 = 1 - opts.r0;
    for (double th : angles)
        for (int k = 0; k < opts.check_radii; ++k) {
            const double t = t0 * std::pow(1e-6 / t0, double(k) / (opts.check_radii - 1));
            const double d = std::abs(dg(std::polar(1 - t, th)));
            if (!(d <= majorant(t) * (1 + 1e-9) + 1e-12))
                throw Error(ErrorKind::invariant_violation,
                            "derivative exceeds the majorant at distance " + fmt("%.3e", t) + " from the circle");
        }

    // x = y^k flattens the singular endpoint of the majorant.
    const double k = majorant.family == Majorant::Family::log ? 2.0 : 1 / (1 - std::max(0.0, majorant.a));
    std::vector<BoundaryValue> out;
    for (double th : angles) {
        const cd e = std::polar(1.0, th);
        auto f = [&](double y) -> cd {
            const double x = std::pow(y, k);
            // Below double resolution of 1 - x the majorant tail bounds what is dropped.
            if (1 - x == 1) return 0.0;
            return dg((1 - x) * e) * e * (k * std::pow(y, k - 1));
        };
        const auto q = detail::graded_integral(f, std::pow(t0, 1 / k), opts.tol, opts.max_depth);
        if (!(q.error <= std::max(1e-6, 100 * opts.tol) * std::max(1.0, std::abs(q.value))))
            throw Error(ErrorKind::no_convergence, "radial integral did not converge, error " + fmt("%.3e", q.error));
        out.push_back({th, g(opts.r0 * e) + q.value, q.error + majorant.tail(1e-16)});
    }
    return out;
}

double DiniReport::tau(double x) const { return std::sqrt(omega(C2 * std::pow(x, s))) / (c * x); }

DiniReport dini_check(const ModulusOfContinuity& omega, double C2, double s, double c, double eps0) {
    if (!(C2 > 0 && c > 0 && eps0 > 0)) throw Error(ErrorKind::invalid_argument, "Dini parameters must be positive");
    if (!(s > 0 && s <= 1)) throw Error(ErrorKind::invalid_argument, "s must lie in (0, 1]");
    DiniReport rep;
    rep.omega = omega;
    rep.s = s;
    rep.C2 = C2;
    rep.c = c;
    rep.eps0 = eps0;
    const double sqC = std::sqrt(omega.C());
    switch (omega.family()) {
        case ModulusOfContinuity::Family::power: {
            // int_0^eps0 x^{as/2 - 1} dx
            const double e = omega.exponent() * s / 2;
            rep.integral = sqC * std::pow(C2, omega.exponent() / 2) / c * std::pow(eps0, e) / e;
            break;
        }
        case ModulusOfContinuity::Family::power_log: {
            // omega is the constant C once C2 x^s >= 1/e, i.e. x >= xc.
            const double xc = std::pow(std::exp(-1.0) / C2, 1 / s);
            const double xu = std::min(xc, eps0);
            const double h = omega.exponent() / 2;
            if (omega.C() == 0) {
                rep.integral = 0;
            } else if (h <= 1) {
                rep.divergent = true;
                rep.integral = kInf;
            } else {
                // L = log(1 / (C2 x^s)), dx / x = -dL / s.
                const double Lu = std::log(1 / (C2 * std::pow(xu, s)));
                rep.integral = sqC / (c * s) * std::pow(Lu, 1 - h) / (h - 1);
                if (xc < eps0) rep.integral += sqC / c * std::log(eps0 / xc);
            }
            break;
        }
        case ModulusOfContinuity::Family::tabulated: {
            const auto& r = omega.radii();
            const auto& w = omega.values();
            // Below the first node omega is linear, so the head is a power integral.
            const double x1 = std::min(eps0, std::pow(r.front() / C2, 1 / s));
            rep.integral = std::sqrt(w.front() / r.front() * C2) / c * std::pow(x1, s / 2) / (s / 2);
            std::vector<double> cuts{x1};
            for (double ri : r) {
                const double x = std::pow(ri / C2, 1 / s);
                if (x > x1 && x < eps0) cuts.push_back(x);
            }
            cuts.push_back(eps0);
            auto f = [&rep](double x) { return rep.tau(x); };
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
                if (cuts[i + 1] > cuts[i])
                    rep.integral +=
                        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, cuts[i], cuts[i + 1], 10, 1e-12);
            break;
        }
    }
    return rep;
}

DerivativeBoundTable geodesic_derivative_bound(const AnalyticDisc& psi, const DomainSpec& Omega,
                                               const ModulusOfContinuity& omega, const MercerFit& fit,
                                               const std::vector<double>& radii, int angles, double c) {
    if (!(c >= 0)) throw Error(ErrorKind::invalid_argument, "c must be nonnegative");
    if (!(fit.C2 > 0 && fit.beta >= 1)) throw Error(ErrorKind::invalid_argument, "mercer fit is not usable");
    if (angles < 1) throw Error(ErrorKind::invalid_argument, "need at least one angle");
    DerivativeBoundTable tab;
    tab.c = c;
    tab.c_max = kInf;
    for (double r : radii) {
        if (!(r >= 0 && r < 1)) throw Error(ErrorKind::invalid_argument, "radii must lie in [0, 1)");
        for (int j = 0; j < angles; ++j) {
            const double th = 2 * kPi * j / angles;
            const cd zeta = std::polar(r, th);
            require_interior(Omega, psi(zeta));
            DerivativeRow row;
            row.r = r;
            row.theta = th;
            row.derivative = psi.derivative(zeta).norm();
            if (!std::isfinite(row.derivative))
                throw Error(ErrorKind::no_convergence, "derivative evaluation failed at |zeta| = " + fmt("%.6f", r));
            const double t = 1 - r;
            row.rhs = std::sqrt(omega(fit.C2 * std::pow(t, 1 / fit.beta))) / t;
            if (row.derivative > 0) tab.c_max = std::min(tab.c_max, row.rhs / row.derivative);
            tab.rows.push_back(row);
        }
    }
    return tab;
}

ConvexityReport convexity_spot_check(const DomainSpec& dom, int pairs, std::uint64_t seed) {
    Rng rng(seed);
    const auto pts = sample_interior(dom, 2 * pairs, rng);
    ConvexityReport rep;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
        for (double t : {0.25, 0.5, 0.75}) {
            ++rep.checked;
            if (!(dom.rho(t * pts[i] + (1 - t) * pts[i + 1]) < 0)) ++rep.violations;
        }
    return rep;
}

}  // namespace plurilab
