#include "plurilab/peaks.hpp"
#include "plurilab/monge_ampere.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace plurilab {

namespace {

constexpr double kTwoPi = 2 * kPi;

std::string fmt(const char* f, double x) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double cross(cd a, cd b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Maximizer of Re <z, u> over the closure, by steering the ray from the
// witness until the outward normal at its exit matches u.
Vec support_point(const DomainSpec& dom, const Vec& u) {
    const Vec& w = dom.witness;
    Vec d = u, best;
    double best_val = -std::numeric_limits<double>::infinity(), prev = best_val, step = 1;
    for (int it = 0; it < 60; ++it) {
        const Vec x = w + first_exit(dom, w, d, 1e-13) * d;
        const double val = real_dot(x, u);
        if (val > best_val) best_val = val, best = x;
        if (val < prev) step *= 0.5;
        prev = val;
        const Vec g = real_gradient(dom.rho, x);
        if (!(g.norm() > 0)) break;
        const Vec diff = u - g / g.norm();
        if (diff.norm() < 1e-12 || step < 1e-6) break;
        d = (d + step * diff).normalized();
    }
    return best;
}

double segment_distance(cd z, cd a, cd b) {
    const cd d = b - a;
    const double t = std::clamp(((z - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return std::abs(z - (a + t * d));
}

double loop_distance(const std::vector<cd>& loop, cd z) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < loop.size(); ++i) m = std::min(m, segment_distance(z, loop[i], loop[(i + 1) % loop.size()]));
    return m;
}

// Conjugate function of a real periodic sample vector: e^{ik phi} -> -i sign(k) e^{ik phi}.
std::vector<double> conjugate(Eigen::FFT<double>& fft, const std::vector<double>& x) {
    const int N = int(x.size());
    std::vector<cd> in(x.begin(), x.end()), spectrum, out;
    fft.fwd(spectrum, in);
    for (int k = 0; k < N; ++k) {
        const int f = k <= N / 2 ? k : k - N;
        spectrum[k] *= (f == 0 || 2 * k == N) ? cd(0) : cd(0, f > 0 ? -1.0 : 1.0);
    }
    fft.inv(out, spectrum);
    std::vector<double> y(N);
    for (int k = 0; k < N; ++k) y[k] = out[k].real();
    return y;
}

}  // namespace

SupportFrame support_frame(const DomainSpec& dom, const Vec& p, const FrameOptions& opts) {
    if (!dom.flags.convex) throw Error(ErrorKind::invalid_argument, "support frames need a convex domain");
    if (p.size() != dom.n) throw Error(ErrorKind::invalid_argument, "point has the wrong dimension");
    if (!(std::abs(dom.rho(p)) < 1e-8)) throw Error(ErrorKind::invalid_argument, "p must lie on the boundary");
    Rng rng(opts.seed);
    const auto inner = sample_interior(dom, opts.samples, rng);

    std::vector<Vec> candidates;
    const Vec g = real_gradient(dom.rho, p);
    if (g.norm() > 1e-8) candidates.push_back(g / g.norm());
    candidates.push_back((p - dom.witness).normalized());
    for (const auto& v : candidates) {
        SupportFrame f{p, v, 0};
        bool ok = true;
        for (const auto& z : inner) {
            ++f.checked;
            if (!(f.pi(z).real() < 0)) {
                ok = false;
                break;
            }
        }
        if (ok) return f;
    }
    throw Error(ErrorKind::invariant_violation, "no separating direction found at p");
}

Shadow planar_loop(const std::vector<cd>& points) {
    if (points.size() < 3) throw Error(ErrorKind::invalid_argument, "a loop needs at least three points");
    std::vector<cd> pts = points;
    std::sort(pts.begin(), pts.end(), [](cd a, cd b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
    // Andrew's monotone chain, collinear points dropped.
    std::vector<cd> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw Error(ErrorKind::invalid_argument, "loop is degenerate");

    Shadow s;
    s.loop = hull;
    double A = 0;
    cd C = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const cd a = hull[i], b = hull[(i + 1) % hull.size()];
        const double w = cross(a, b);
        A += w;
        C += w * (a + b);
    }
    s.anchor = C / (3 * A);
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) s.diameter = std::max(s.diameter, std::abs(hull[i] - hull[j]));
    return s;
}

Shadow complex_shadow(const DomainSpec& dom, const SupportFrame& frame, const ShadowOptions& opts) {
    if (opts.directions < 16) throw Error(ErrorKind::invalid_argument, "need at least 16 support directions");
    Rng rng(opts.seed);
    const Vec& v = frame.v;

    // A flat face through p shows up as closure points in the complex tangent plane.
    for (int k = 0; k < opts.flat_probes; ++k) {
        Vec w = random_unit(dom.n, rng);
        w -= v * v.dot(w);
        if (w.norm() < 1e-8) continue;
        w.normalize();
        for (double t : {0.05, 0.2})
            if (dom.rho(frame.p + t * dom.bound_radius * w) <= 0)
                throw Error(ErrorKind::invariant_violation, "complex tangent plane meets the closure away from p");
    }

    std::vector<cd> pts{cd(0)};
    for (int k = 0; k < opts.directions; ++k) {
        const Vec u = std::polar(1.0, kTwoPi * k / opts.directions) * v;
        pts.push_back(frame.pi(support_point(dom, u)));
    }
    for (const auto& z : sample_boundary(dom, opts.random_samples, rng)) pts.push_back(frame.pi(z));
    Shadow s = planar_loop(pts);
    if (loop_distance(s.loop, 0) > 1e-9 * s.diameter)
        throw Error(ErrorKind::invariant_violation, "0 lies inside the shadow: the frame does not support");
    return s;
}

double RiemannMapData::radius(double t) const {
    const auto& L = shadow.loop;
    const cd c = shadow.anchor;
    const cd e = std::polar(1.0, t);
    // The loop is star-shaped about the anchor: find the edge the ray crosses.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < L.size(); ++i) {
        const cd a = L[i] - c, d = L[(i + 1) % L.size()] - L[i];
        const double den = cross(e, d);
        if (den <= 0) continue;
        const double r = cross(a, d) / den;
        const double s = cross(a, e) / den;  // position along the edge
        if (r > 0 && s >= -1e-12 && s <= 1 + 1e-12) best = std::min(best, r);
    }
    return best;
}

namespace {

double theta_series(const std::vector<double>& c, double phi) {
    double s = c[0];
    for (std::size_t k = 1; 2 * k < c.size(); ++k) s += c[2 * k - 1] * std::cos(k * phi) + c[2 * k] * std::sin(k * phi);
    return s;
}

// phi with phi + Theta(phi) = t (mod 2 pi), from the monotone node angles.
double invert_theta(const RiemannMapData& m, double t) {
    const int N = int(m.phi.size());
    const double t0 = m.theta[0];
    const double tt = t0 + std::fmod(std::fmod(t - t0, kTwoPi) + kTwoPi, kTwoPi);
    int j = int(std::upper_bound(m.theta.begin(), m.theta.end(), tt) - m.theta.begin()) - 1;
    j = std::clamp(j, 0, N - 1);
    double lo = m.phi[j], hi = j + 1 < N ? m.phi[j + 1] : m.phi[0] + kTwoPi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid + theta_series(m.theta_coeffs, mid) < tt ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

cd barycentric(const RiemannMapData& m, cd zeta) {
    cd num = 0, den = 0;
    for (std::size_t j = 0; j < m.nodes.size(); ++j) {
        const cd d = m.nodes[j] - zeta;
        if (std::abs(d) < 1e-14) return std::polar(1.0, m.phi[j] - m.phi_zero);
        const cd w = m.weights[j] / d;
        num += w * std::polar(1.0, m.phi[j] - m.phi_zero);
        den += w;
    }
    return num / den;
}

}  // namespace

cd RiemannMapData::boundary_value(double t) const { return std::polar(1.0, invert_theta(*this, t) - phi_zero); }

cd RiemannMapData::operator()(cd zeta) const {
    const cd d = zeta - shadow.anchor;
    const double t = std::arg(d);
    if (std::abs(d) >= radius(t) * (1 - 1e-12)) return boundary_value(t);
    return barycentric(*this, zeta);
}

RiemannMapData riemann_map(const Shadow& omega, const RiemannOptions& opts) {
    if (omega.loop.size() < 8) throw Error(ErrorKind::invalid_argument, "loop has too few vertices");
    if (opts.nodes < 16 || opts.nodes % 2) throw Error(ErrorKind::invalid_argument, "node count must be even and >= 16");
    if (loop_distance(omega.loop, 0) > 1e-9 * omega.diameter)
        throw Error(ErrorKind::invalid_argument, "0 must lie on the loop");
    const int N = opts.nodes;
    RiemannMapData m;
    m.shadow = omega;
    m.phi.resize(N);
    for (int j = 0; j < N; ++j) m.phi[j] = kTwoPi * j / N;

    // Theodorsen: theta = phi + K[log r(theta)], relaxed when the update grows.
    Eigen::FFT<double> fft;
    std::vector<double> th = m.phi, L(N);
    double mu = 1, prev = std::numeric_limits<double>::infinity(), res = prev;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        for (int j = 0; j < N; ++j) L[j] = std::log(m.radius(th[j]));
        const auto K = conjugate(fft, L);
        res = 0;
        for (int j = 0; j < N; ++j) res = std::max(res, std::abs(m.phi[j] + K[j] - th[j]));
        if (res < opts.tol) break;
        if (res > prev) mu = std::max(mu / 2, 1.0 / 64);
        prev = res;
        for (int j = 0; j < N; ++j) th[j] += mu * (m.phi[j] + K[j] - th[j]);
    }
    m.quality.iterations = it;
    m.quality.residual = res;
    m.quality.relaxation = mu;
    if (!(res < opts.tol))
        throw Error(ErrorKind::no_convergence, "boundary correspondence stalled at residual " + fmt("%.3e", res));
    for (int j = 0; j + 1 < N; ++j)
        if (!(th[j + 1] > th[j])) throw Error(ErrorKind::no_convergence, "boundary correspondence is not monotone");
    m.theta = th;

    // Theta(phi) = theta - phi as a trigonometric series.
    std::vector<cd> in(N), spectrum;
    for (int j = 0; j < N; ++j) in[j] = th[j] - m.phi[j];
    fft.fwd(spectrum, in);
    m.theta_coeffs.assign(N, 0.0);
    m.theta_coeffs[0] = spectrum[0].real() / N;
    for (int k = 1; k < N / 2; ++k) {
        m.theta_coeffs[2 * k - 1] = 2 * spectrum[k].real() / N;
        m.theta_coeffs[2 * k] = -2 * spectrum[k].imag() / N;
    }

    for (int j = 0; j < N; ++j) m.nodes.push_back(omega.anchor + std::polar(m.radius(th[j]), th[j]));
    for (int j = 0; j < N; ++j) m.weights.push_back(0.5 * (m.nodes[(j + 1) % N] - m.nodes[(j + N - 1) % N]));
    m.phi_zero = invert_theta(m, std::arg(-omega.anchor));

    // Quality off the nodes: the interior evaluator at boundary midpoints.
    double wind = 0;
    cd last = 0;
    for (int j = 0; j <= N; ++j) {
        const double t = j < N ? 0.5 * (th[j] + (j + 1 < N ? th[j + 1] : th[0] + kTwoPi)) : 0.5 * (th[0] + th[1]);
        const cd val = barycentric(m, omega.anchor + std::polar(m.radius(t), t));
        if (j < N) m.quality.unimodularity = std::max(m.quality.unimodularity, std::abs(std::abs(val) - 1));
        if (j) wind += std::arg(val / last);
        last = val;
    }
    m.quality.winding = int(std::lround(wind / kTwoPi));
    m.quality.at_zero = std::abs(m(0.0) - 1.0);
    return m;
}

double PeakFunction::u(const Vec& z) const { return map(frame.pi(z)).real() - 1; }

cd PeakFunction::g(const Vec& z) const { return std::exp(map(frame.pi(z)) - 1.0); }

double peak_separation(const PeakFunction& peak, const DomainSpec& dom, int samples, double fraction, double diameter,
                       std::uint64_t seed) {
    Rng rng(seed);
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : sample_boundary(dom, samples, rng))
        if ((z - peak.frame.p).norm() >= fraction * diameter) m = std::max(m, peak.u(z));
    return -m;
}

PeakFunction peak_function(const DomainSpec& dom, const Vec& p, const PeakOptions& opts) {
    PeakFunction pf;
    pf.frame = support_frame(dom, p);
    pf.map = riemann_map(complex_shadow(dom, pf.frame, opts.shadow), opts.map);
    const auto& q = pf.map.quality;
    if (q.unimodularity > 1e-3 || q.winding != 1 || q.at_zero > 1e-6)
        throw Error(ErrorKind::invariant_violation, "Riemann map quality check failed, unimodularity " +
                                                        fmt("%.3e", q.unimodularity));

    auto& r = pf.report;
    Rng rng(opts.seed);
    const auto inner = sample_interior(dom, opts.samples, rng);
    const auto outer = sample_boundary(dom, opts.samples, rng);
    for (const auto& a : outer) {
        r.diameter = std::max(r.diameter, (a - p).norm());
        for (const auto& b : outer) r.diameter = std::max(r.diameter, (a - b).norm());
    }
    r.u_at_p = pf.u(p);
    if (!(std::abs(r.u_at_p) <= 1e-6)) throw Error(ErrorKind::invariant_violation, "u(p) is not 0");

    r.max_u = -std::numeric_limits<double>::infinity();
    r.eta = std::numeric_limits<double>::infinity();
    auto visit = [&](const Vec& z, bool boundary) {
        const double d = (z - p).norm();
        if (d < 1e-3 * r.diameter) return;
        const double u = pf.u(z);
        r.max_u = std::max(r.max_u, u);
        if (u >= 0) ++r.violations;
        if (boundary && d >= opts.separation * r.diameter) r.eta = std::min(r.eta, -u);
    };
    for (const auto& z : inner) visit(z, false), ++r.interior_samples;
    for (const auto& z : outer) visit(z, true), ++r.boundary_samples;

    r.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
    const RealField u = [&pf](const Vec& z) { return pf.u(z); };
    for (int k = 0; k < std::min<int>(opts.hessian_samples, int(inner.size())); ++k)
        r.min_hessian_eigenvalue = std::min(r.min_hessian_eigenvalue, min_eigenvalue(complex_hessian(u, inner[k])));

    if (r.violations > 0)
        throw Error(ErrorKind::invariant_violation, "u is nonnegative at " + std::to_string(r.violations) + " samples");
    return pf;
}

}  // namespace plurilab
