#include "plurilab/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace plurilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec modulus_point(double s1, double s2) {
    Vec z(2);
    z << s1, s2;
    return z;
}

template <class F>
double golden_max(F f, double lo, double hi, int iters) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iters; ++it) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        }
    }
    return std::max(fc, fd);
}

// Slopes searched over [1e-8, 1e8] in log scale, plus the slope 0 itself.
constexpr double kLogSlopeLo = -18.420680743952367;
constexpr double kLogSlopeHi = 18.420680743952367;
constexpr int kGoldenIters = 45;

double exit_along(const DomainSpec& dom, const Vec& from, double c, double s, double hint) {
    Vec dir(2);
    dir << c, s;
    return first_exit(dom, from, dir, 1e-13, hint);
}

struct Curve {
    std::vector<double> y1, y2, G;
    double gap = 0;
};

Curve sample_curve(const DomainSpec& dom, const BoundaryData& g, double X, int N, bool pin) {
    Curve cv;
    const double L = 2 * X + 4;
    double hint = 0, ps1 = -1, ps2 = -1;
    for (int k = 0; k < N; ++k) {
        const double d = -L + 2 * L * k / (N - 1);
        const double th = std::atan(std::exp(d));
        const double c = std::cos(th), s = std::sin(th);
        const double t = exit_along(dom, Vec::Zero(2), c, s, hint);
        hint = t;
        const double s1 = t * c, s2 = t * s;
        const double y1 = std::log(s1), y2 = std::log(s2);
        if (!std::isfinite(y1) || !std::isfinite(y2)) continue;
        if (pin && (y1 < -X || y2 < -X)) continue;
        if (ps1 >= 0) cv.gap = std::max(cv.gap, std::hypot(s1 - ps1, s2 - ps2));
        ps1 = s1, ps2 = s2;
        cv.y1.push_back(y1);
        cv.y2.push_back(y2);
        cv.G.push_back(g(modulus_point(s1, s2)));
    }
    if (pin) {
        const int M = std::max(16, N / 8);
        const double e = std::exp(-X);
        const double top2 = std::log(exit_along(dom, modulus_point(e, 0), 0, 1, 0));
        const double top1 = std::log(exit_along(dom, modulus_point(0, e), 1, 0, 0));
        for (int m = 0; m <= M; ++m) {
            const double y2 = -X + (top2 + X) * m / M;
            cv.y1.push_back(-X);
            cv.y2.push_back(y2);
            cv.G.push_back(g(modulus_point(e, std::exp(y2))));
            const double y1 = -X + (top1 + X) * m / M;
            cv.y1.push_back(y1);
            cv.y2.push_back(-X);
            cv.G.push_back(g(modulus_point(std::exp(y1), e)));
        }
    }
    return cv;
}

void check_invariance(const DomainSpec& dom, const BoundaryData& g, int samples, std::uint64_t seed) {
    Rng rng(seed);
    for (int k = 0; k < samples; ++k) {
        const double th = std::atan(std::exp(uniform(rng, -3, 3)));
        const double t = exit_along(dom, Vec::Zero(2), std::cos(th), std::sin(th), 0);
        const Vec z = modulus_point(t * std::cos(th), t * std::sin(th));
        Vec w = z;
        w[0] *= std::polar(1.0, uniform(rng, 0, 2 * kPi));
        w[1] *= std::polar(1.0, uniform(rng, 0, 2 * kPi));
        const double a = g(z), b = g(w);
        if (!(std::abs(a - b) <= 1e-9 * (1 + std::abs(a))))
            throw Error(ErrorKind::invalid_argument, "boundary data is not invariant under coordinate rotations");
    }
}

// A maximal run of interior nodes along one grid line; the ends either meet the
// boundary at a fractional step (data known there) or are free.
struct Run {
    std::vector<int> nodes;
    bool has_lo = false, has_hi = false;
    double lo_f = 0, hi_f = 0, lo_G = 0, hi_G = 0;
};

}  // namespace

std::vector<double> lower_convex_envelope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error(ErrorKind::invalid_argument, "envelope needs matching x and y");
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i && !(x[i] > x[i - 1])) throw Error(ErrorKind::invalid_argument, "envelope abscissae must increase");
        if (!std::isfinite(y[i])) continue;
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull.back();
            if ((y[b] - y[a]) * (x[i] - x[a]) >= (y[i] - y[a]) * (x[b] - x[a]))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    std::vector<double> out(x.size(), kInf);
    if (hull.empty()) return out;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < x[hull.front()] || x[i] > x[hull.back()]) continue;
        if (hull.size() == 1) {
            out[i] = y[hull[0]];
            continue;
        }
        while (seg + 2 < hull.size() && x[i] > x[hull[seg + 1]]) ++seg;
        const std::size_t a = hull[seg], b = hull[seg + 1];
        if (x[i] == x[a])
            out[i] = y[a];
        else if (x[i] == x[b])
            out[i] = y[b];
        else
            out[i] = y[a] + (y[b] - y[a]) * (x[i] - x[a]) / (x[b] - x[a]);
    }
    return out;
}

PointwiseEnvelope::PointwiseEnvelope(std::vector<double> y1, std::vector<double> y2, std::vector<double> G)
    : y1_(std::move(y1)), y2_(std::move(y2)), G_(std::move(G)) {
    if (y1_.size() != y2_.size() || y1_.size() != G_.size() || G_.empty())
        throw Error(ErrorKind::invalid_argument, "boundary samples are malformed");
}

double PointwiseEnvelope::min_term(double a, double b) const {
    double m = kInf;
    for (std::size_t i = 0; i < G_.size(); ++i) m = std::min(m, G_[i] - a * y1_[i] - b * y2_[i]);
    return m;
}

double PointwiseEnvelope::best_b(double a, double x1, double x2) const {
    const double base = a > 0 ? a * x1 : 0.0;
    const double at0 = base + min_term(a, 0.0);
    if (x2 == -kInf) return at0;
    auto f = [&](double t) {
        const double b = std::exp(t);
        return base + b * x2 + min_term(a, b);
    };
    return std::max(at0, golden_max(f, kLogSlopeLo, kLogSlopeHi, kGoldenIters));
}

double PointwiseEnvelope::operator()(double x1, double x2) const {
    const double at0 = best_b(0.0, x1, x2);
    if (x1 == -kInf) return at0;
    auto f = [&](double t) { return best_b(std::exp(t), x1, x2); };
    return std::max(at0, golden_max(f, kLogSlopeLo, kLogSlopeHi, kGoldenIters));
}

EnvelopeSolution reinhardt_envelope_solve(const DomainSpec& dom, const BoundaryData& g, const EnvelopeOptions& opts) {
    if (dom.n != 2 || !dom.flags.reinhardt)
        throw Error(ErrorKind::invalid_argument, "envelope solver needs a Reinhardt domain in C^2");
    if (!(dom.rho(Vec::Zero(2)) < 0))
        throw Error(ErrorKind::invalid_argument, "envelope solver needs the origin inside the domain");
    if (opts.nodes < 8 || opts.nodes > 4001 || !(opts.x_trunc > 0) || opts.curve_samples < 64)
        throw Error(ErrorKind::invalid_argument, "envelope grid options out of range");
    check_invariance(dom, g, opts.invariance_samples, opts.seed);

    const double X = opts.x_trunc;
    const int N1 = opts.nodes, N2 = opts.nodes;
    const double S1 = exit_along(dom, Vec::Zero(2), 1, 0, 0);
    const double S2 = exit_along(dom, Vec::Zero(2), 0, 1, 0);
    EnvelopeSolution sol;
    sol.method = "envelope";
    sol.coords = GridCoords::log_modulus;
    sol.x_trunc = X;
    sol.pinned = opts.pin_truncation;
    sol.g = g;
    sol.h1 = (std::log(S1) + X) / (N1 - 1);
    sol.h2 = (std::log(S2) + X) / (N2 - 1);
    for (int i = 0; i < N1; ++i) sol.axis1.push_back(-X + i * sol.h1);
    for (int j = 0; j < N2; ++j) sol.axis2.push_back(-X + j * sol.h2);

    auto id = [N2](int i, int j) { return i * N2 + j; };
    auto ingrid = [&](int i, int j) { return i >= 0 && i < N1 && j >= 0 && j < N2; };
    auto rho_at = [&](double x1, double x2) { return dom.rho(modulus_point(std::exp(x1), std::exp(x2))); };
    auto data_at = [&](double x1, double x2) { return g(modulus_point(std::exp(x1), std::exp(x2))); };

    std::vector<char> inside(N1 * N2), fixed(N1 * N2, 0);
    std::vector<double> U(N1 * N2, kInf);
    for (int i = 0; i < N1; ++i)
        for (int j = 0; j < N2; ++j) {
            // The last node on each axis sits on the boundary up to the exit tolerance.
            inside[id(i, j)] = i < N1 - 1 && j < N2 - 1 && rho_at(sol.axis1[i], sol.axis2[j]) < 0;
            if (inside[id(i, j)] && opts.pin_truncation && (i == 0 || j == 0)) {
                fixed[id(i, j)] = 1;
                U[id(i, j)] = data_at(sol.axis1[i], sol.axis2[j]);
            }
        }

    // Fraction of the step from node (i,j) towards (i+di, j+dj) where the boundary is crossed.
    auto crossing = [&](int i, int j, int di, int dj, double& G) {
        const double x1 = sol.axis1[i], x2 = sol.axis2[j];
        const double dx1 = di * sol.h1, dx2 = dj * sol.h2;
        double lo = 0, hi = 1;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (rho_at(x1 + mid * dx1, x2 + mid * dx2) < 0 ? lo = mid : hi = mid);
        }
        G = data_at(x1 + hi * dx1, x2 + hi * dx2);
        return hi;
    };

    std::vector<Run> runs;
    const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    for (const auto& dd : dirs) {
        const int di = dd[0], dj = dd[1];
        for (int i = 0; i < N1; ++i)
            for (int j = 0; j < N2; ++j) {
                if (ingrid(i - di, j - dj)) continue;
                int ci = i, cj = j;
                Run cur;
                bool lo_exterior = false;
                int pi = -1, pj = -1;
                while (ingrid(ci, cj)) {
                    if (inside[id(ci, cj)]) {
                        if (cur.nodes.empty() && lo_exterior) {
                            cur.has_lo = true;
                            cur.lo_f = crossing(ci, cj, -di, -dj, cur.lo_G);
                        }
                        cur.nodes.push_back(id(ci, cj));
                        pi = ci, pj = cj;
                    } else {
                        if (!cur.nodes.empty()) {
                            cur.has_hi = true;
                            cur.hi_f = crossing(pi, pj, di, dj, cur.hi_G);
                            runs.push_back(std::move(cur));
                            cur = Run{};
                        }
                        lo_exterior = true;
                    }
                    ci += di, cj += dj;
                }
                if (!cur.nodes.empty()) runs.push_back(std::move(cur));
            }
    }

    // Monotone sweep neighbours along +e1 and +e2.
    std::vector<int> next1(N1 * N2, -1), next2(N1 * N2, -1);
    std::vector<double> exit1(N1 * N2, kInf), exit2(N1 * N2, kInf);
    for (int i = 0; i < N1; ++i)
        for (int j = 0; j < N2; ++j) {
            if (!inside[id(i, j)]) continue;
            if (ingrid(i + 1, j)) {
                if (inside[id(i + 1, j)])
                    next1[id(i, j)] = id(i + 1, j);
                else
                    (void)crossing(i, j, 1, 0, exit1[id(i, j)]);
            }
            if (ingrid(i, j + 1)) {
                if (inside[id(i, j + 1)])
                    next2[id(i, j)] = id(i, j + 1);
                else
                    (void)crossing(i, j, 0, 1, exit2[id(i, j)]);
            }
        }

    std::vector<double> px, py;
    auto hull_pass = [&](const Run& r) {
        const int L = int(r.nodes.size());
        px.clear();
        py.clear();
        if (r.has_lo) px.push_back(-r.lo_f), py.push_back(r.lo_G);
        for (int k = 0; k < L; ++k) px.push_back(k), py.push_back(U[r.nodes[k]]);
        if (r.has_hi) px.push_back(L - 1 + r.hi_f), py.push_back(r.hi_G);
        const auto env = lower_convex_envelope(px, py);
        const int off = r.has_lo ? 1 : 0;
        double change = 0;
        for (int k = 0; k < L; ++k) {
            const int n = r.nodes[k];
            const double v = env[k + off];
            if (fixed[n] || !(v < U[n])) continue;
            change = std::max(change, U[n] - v);
            U[n] = v;
        }
        return change;
    };

    int it = 0;
    double change = kInf;
    for (; it < opts.max_iter && change > opts.tol; ++it) {
        change = 0;
        for (const auto& r : runs) change = std::max(change, hull_pass(r));
        for (int i = N1 - 1; i >= 0; --i)
            for (int j = N2 - 1; j >= 0; --j) {
                const int n = id(i, j);
                if (!inside[n] || fixed[n]) continue;
                const double c1 = next1[n] >= 0 ? U[next1[n]] : exit1[n];
                const double c2 = next2[n] >= 0 ? U[next2[n]] : exit2[n];
                const double c = std::min(c1, c2);
                if (c < U[n]) {
                    change = std::max(change, U[n] - c);
                    U[n] = c;
                }
            }
    }
    if (change > opts.tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "envelope iteration cap reached, residual %.3e", change);
        throw Error(ErrorKind::no_convergence, buf);
    }
    sol.iterations = it;
    sol.residual = change;

    sol.values = RMat::Constant(N1, N2, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < N1; ++i)
        for (int j = 0; j < N2; ++j)
            if (inside[id(i, j)]) sol.values(i, j) = U[id(i, j)];

    auto& inv = sol.invariants;
    inv.data_excess = -kInf;
    for (int n = 0; n < N1 * N2; ++n) {
        if (!inside[n]) continue;
        for (double e : {exit1[n], exit2[n]}) {
            if (!std::isfinite(e)) continue;
            inv.data_excess = std::max(inv.data_excess, U[n] - e);
            inv.data_gap = std::max(inv.data_gap, e - U[n]);
        }
        for (int nx : {next1[n], next2[n]})
            if (nx >= 0) inv.monotonicity_defect = std::max(inv.monotonicity_defect, U[n] - U[nx]);
    }
    for (const auto& r : runs)
        for (std::size_t k = 1; k + 1 < r.nodes.size(); ++k) {
            const double d2 = U[r.nodes[k - 1]] - 2 * U[r.nodes[k]] + U[r.nodes[k + 1]];
            inv.convexity_defect = std::max(inv.convexity_defect, -d2);
        }
    const double scale = 1e-9 * (1 + sol.values.cwiseAbs().unaryExpr([](double v) { return std::isnan(v) ? 0 : v; }).maxCoeff());
    inv.ok = inv.data_excess <= scale && inv.convexity_defect <= 1e3 * scale && inv.monotonicity_defect <= scale;

    const Curve cv = sample_curve(dom, g, X, opts.curve_samples, opts.pin_truncation);
    sol.pointwise = PointwiseEnvelope(cv.y1, cv.y2, cv.G);
    sol.curve_gap = cv.gap;
    return sol;
}

double EnvelopeSolution::u_pointwise(const Vec& z) const {
    if (pointwise.empty()) throw Error(ErrorKind::invalid_argument, "solution has no pointwise evaluator");
    if (z.size() != 2) throw Error(ErrorKind::invalid_argument, "point must lie in C^2");
    double x1 = std::log(std::abs(z[0])), x2 = std::log(std::abs(z[1]));
    if (pinned) x1 = std::max(x1, -x_trunc), x2 = std::max(x2, -x_trunc);
    return pointwise(x1, x2);
}

double EnvelopeSolution::u(const Vec& z) const {
    if (evaluator) return evaluator(z);
    if (z.size() != 2) throw Error(ErrorKind::invalid_argument, "point must lie in C^2");
    double c1 = std::abs(z[0]), c2 = std::abs(z[1]);
    if (coords == GridCoords::log_modulus) {
        c1 = std::max(std::log(c1), axis1.front());
        c2 = std::max(std::log(c2), axis2.front());
    }
    const int N1 = int(axis1.size()), N2 = int(axis2.size());
    if (c1 <= axis1.back() && c2 <= axis2.back()) {
        const int i = std::clamp(int((c1 - axis1.front()) / h1), 0, N1 - 2);
        const int j = std::clamp(int((c2 - axis2.front()) / h2), 0, N2 - 2);
        const double t = std::clamp((c1 - axis1[i]) / h1, 0.0, 1.0);
        const double s = std::clamp((c2 - axis2[j]) / h2, 0.0, 1.0);
        const double v00 = values(i, j), v10 = values(i + 1, j), v01 = values(i, j + 1), v11 = values(i + 1, j + 1);
        if (std::isfinite(v00) && std::isfinite(v10) && std::isfinite(v01) && std::isfinite(v11))
            return (1 - t) * (1 - s) * v00 + t * (1 - s) * v10 + (1 - t) * s * v01 + t * s * v11;
    }
    if (has_pointwise()) return u_pointwise(z);
    throw Error(ErrorKind::invalid_argument, "point lies outside the solved grid");
}

std::string EnvelopeSolution::to_csv_log() const {
    std::ostringstream os;
    os << "x1,x2,U\n";
    char buf[96];
    for (std::size_t i = 0; i < axis1.size(); ++i)
        for (std::size_t j = 0; j < axis2.size(); ++j) {
            const double v = values(Eigen::Index(i), Eigen::Index(j));
            if (std::isnan(v)) continue;
            double a = axis1[i], b = axis2[j];
            if (coords == GridCoords::modulus) a = std::log(a), b = std::log(b);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", a, b, v);
            os << buf;
        }
    return os.str();
}

std::string EnvelopeSolution::to_csv_modulus() const {
    std::ostringstream os;
    os << "abs_z1,abs_z2,u\n";
    char buf[96];
    for (std::size_t i = 0; i < axis1.size(); ++i)
        for (std::size_t j = 0; j < axis2.size(); ++j) {
            const double v = values(Eigen::Index(i), Eigen::Index(j));
            if (std::isnan(v)) continue;
            double a = axis1[i], b = axis2[j];
            if (coords == GridCoords::log_modulus) a = std::exp(a), b = std::exp(b);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", a, b, v);
            os << buf;
        }
    return os.str();
}

}  // namespace plurilab
