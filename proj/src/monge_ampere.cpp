#include "plurilab/monge_ampere.hpp"

#include <cmath>
#include <limits>

namespace plurilab {

namespace {

RMat real_hessian(const RealField& u, const Vec& z, double h) {
    const RVec x0 = to_real(z);
    const auto d = x0.size();
    auto f = [&](const RVec& x) { return u(to_complex(x)); };
    const double f0 = f(x0);
    RMat H(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        RVec p = x0, m = x0;
        p[i] += h;
        m[i] -= h;
        H(i, i) = (f(p) - 2 * f0 + f(m)) / (h * h);
        for (Eigen::Index j = i + 1; j < d; ++j) {
            RVec pp = x0, pm = x0, mp = x0, mm = x0;
            pp[i] += h, pp[j] += h;
            pm[i] += h, pm[j] -= h;
            mp[i] -= h, mp[j] += h;
            mm[i] -= h, mm[j] -= h;
            H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
        }
    }
    return H;
}

Mat complex_from_real(const RMat& H) {
    const auto n = H.rows() / 2;
    Mat a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double re = 0.25 * (H(2 * j, 2 * k) + H(2 * j + 1, 2 * k + 1));
            const double im = 0.25 * (H(2 * j, 2 * k + 1) - H(2 * j + 1, 2 * k));
            a(j, k) = cd(re, im);
        }
    return 0.5 * (a + a.adjoint());
}

// Generalized golden-ratio increments for a Kronecker sequence in d dimensions.
RVec kronecker_alpha(int d) {
    double g = 2.0;
    for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (d + 1));
    RVec a(d);
    for (int k = 0; k < d; ++k) a[k] = std::fmod(std::pow(1.0 / g, k + 1), 1.0);
    return a;
}

}  // namespace

HessianEstimate complex_hessian_checked(const RealField& u, const Vec& z, double h) {
    if (!(h > 0)) throw Error(ErrorKind::invalid_argument, "finite-difference step must be positive");
    const RMat H1 = real_hessian(u, z, h);
    const RMat H2 = real_hessian(u, z, h / 2);
    if (!H1.allFinite() || !H2.allFinite())
        throw Error(ErrorKind::invalid_argument, "function evaluation failed near the point");
    HessianEstimate e;
    e.value = complex_from_real((4.0 * H2 - H1) / 3.0);
    e.richardson_gap = (complex_from_real(H1) - complex_from_real(H2)).cwiseAbs().maxCoeff();
    return e;
}

Mat complex_hessian(const RealField& u, const Vec& z, double h) { return complex_hessian_checked(u, z, h).value; }

double ma_density(const Mat& a) {
    double fact = 1.0;
    for (Eigen::Index k = 2; k <= a.rows(); ++k) fact *= double(k);
    return fact * a.determinant().real();
}

double min_eigenvalue(const Mat& hermitian) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

HermitianField identity_field(int n) {
    return {n, [n](const Vec&) { return Mat(Mat::Identity(n, n)); }, 1.0, {}};
}

HermitianField hessian_field(const RealField& u, int n, double essential_bound,
                             std::function<bool(const Vec&)> defined_at) {
    return {n, [u](const Vec& w) { return complex_hessian(u, w); }, essential_bound, std::move(defined_at)};
}

FieldCheck check_field(const HermitianField& b, const std::vector<Vec>& samples) {
    FieldCheck c;
    for (const auto& w : samples) {
        const Mat B = b(w);
        c.symmetry_defect = std::max(c.symmetry_defect, (B - B.adjoint()).cwiseAbs().maxCoeff());
        c.max_entry = std::max(c.max_entry, B.cwiseAbs().maxCoeff());
    }
    c.ok = c.symmetry_defect <= 1e-10 && c.max_entry <= b.essential_bound * (1 + 1e-9);
    return c;
}

PullbackSample pullback_field(const HoloMap& F, const HermitianField& b, const Vec& z) {
    const Vec w = F(z);
    if (b.defined_at && !b.defined_at(w))
        throw Error(ErrorKind::invalid_argument, "F(z) lies outside the domain of the coefficient field");
    const Mat J = F.jac(z);
    PullbackSample s;
    s.z = z;
    s.a = J.transpose() * b(w) * J.conjugate();
    s.a = 0.5 * (s.a + s.a.adjoint());
    s.density = ma_density(s.a);
    return s;
}

std::vector<LpEstimate> lp_norm_estimates(const std::function<void(const Vec&, std::vector<double>&)>& g,
                                          int count, const DomainSpec& dom, double p, const LpOptions& opts) {
    if (!(p >= 1)) throw Error(ErrorKind::invalid_argument, "p must be at least 1");
    if (opts.budget < 1000) throw Error(ErrorKind::invalid_argument, "budget must be at least 1000");
    const int d = 2 * dom.n;
    int c = 1;
    while (std::pow(double(c + 1), d) <= opts.budget / 8.0) ++c;
    long cells = 1;
    for (int k = 0; k < d; ++k) cells *= c;
    const RVec width = (dom.box_hi - dom.box_lo) / double(c);
    const double cell_vol = width.prod();
    const RVec alpha = kronecker_alpha(d);
    Rng rng(opts.seed);

    struct Cell {
        RVec shift;
        long n = 0, inside = 0, next = 0;
        std::vector<double> sum, sumsq;
    };
    std::vector<Cell> cs(cells);
    long nonfinite = 0, total = 0;
    std::vector<double> vals(count);

    auto draw = [&](long idx, Cell& cell, long k) {
        RVec x(d);
        long rem = idx;
        for (int j = 0; j < d; ++j) {
            const long ij = rem % c;
            rem /= c;
            const double f = std::fmod(cell.shift[j] + double(k + 1) * alpha[j], 1.0);
            x[j] = dom.box_lo[j] + (double(ij) + f) * width[j];
        }
        const Vec z = to_complex(x);
        ++cell.n;
        ++total;
        if (!(dom.rho(z) < 0)) return;
        ++cell.inside;
        g(z, vals);
        for (int i = 0; i < count; ++i) {
            const double v = std::pow(std::abs(vals[i]), p);
            if (!std::isfinite(v)) {
                ++nonfinite;
                continue;
            }
            cell.sum[i] += v;
            cell.sumsq[i] += v * v;
        }
    };

    const long first = std::max(2L, long(opts.budget / 2 / cells));
    for (long idx = 0; idx < cells; ++idx) {
        Cell& cell = cs[idx];
        cell.shift = RVec(d);
        for (int j = 0; j < d; ++j) cell.shift[j] = uniform(rng);
        cell.sum.assign(count, 0.0);
        cell.sumsq.assign(count, 0.0);
        for (long k = 0; k < first; ++k) draw(idx, cell, cell.next++);
    }
    auto integral = [&](std::vector<double>& I, std::vector<double>& se) {
        I.assign(count, 0.0);
        se.assign(count, 0.0);
        for (const auto& cell : cs) {
            if (cell.n == 0) continue;
            for (int i = 0; i < count; ++i) {
                const double mean = cell.sum[i] / double(cell.n);
                const double var = std::max(0.0, cell.sumsq[i] / double(cell.n) - mean * mean);
                I[i] += cell_vol * mean;
                se[i] += cell_vol * cell_vol * var / double(cell.n);
            }
        }
    };
    std::vector<double> Ic, sec;
    integral(Ic, sec);

    std::vector<long> mixed;
    for (long idx = 0; idx < cells; ++idx)
        if (cs[idx].inside > 0 && cs[idx].inside < cs[idx].n) mixed.push_back(idx);
    const long rest = opts.budget - total;
    if (!mixed.empty() && rest > 0) {
        const long extra = rest / long(mixed.size());
        for (long idx : mixed)
            for (long k = 0; k < extra; ++k) draw(idx, cs[idx], cs[idx].next++);
    }
    std::vector<double> I, se;
    integral(I, se);
    if (double(nonfinite) > opts.nonfinite_tolerance * double(total) * count)
        throw Error(ErrorKind::invalid_argument, "too many non-finite integrand samples");

    std::vector<LpEstimate> out(count);
    for (int i = 0; i < count; ++i) {
        auto& e = out[i];
        e.value = std::pow(I[i], 1.0 / p);
        e.coarse = std::pow(Ic[i], 1.0 / p);
        const double dI = std::abs(I[i] - Ic[i]) + std::sqrt(se[i]);
        e.error_bar = I[i] > 0 ? e.value * dI / (p * I[i]) : 0.0;
        e.samples = total;
        e.nonfinite = nonfinite;
    }
    return out;
}

LpEstimate lp_norm_estimate(const RealField& g, const DomainSpec& dom, double p, const LpOptions& opts) {
    return lp_norm_estimates([&](const Vec& z, std::vector<double>& out) { out[0] = g(z); }, 1, dom, p, opts)
        .front();
}

}  // namespace plurilab
