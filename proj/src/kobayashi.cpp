#include "plurilab/kobayashi.hpp"

#include "plurilab/monge_ampere.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace plurilab {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::disc_embedding: return "disc-embedding";
        case Provenance::graham: return "graham";
        case Provenance::sibony: return "sibony";
        case Provenance::ma_modulus: return "ma-modulus";
    }
    return "unknown";
}

CertificateReport check_certificate(PshCertificate& cert, const std::vector<Vec>& samples, double tol) {
    CertificateReport r;
    for (const auto& z : samples) {
        r.max_u = std::max(r.max_u, cert.u(z));
        r.min_eigenvalue = std::min(r.min_eigenvalue, min_eigenvalue(complex_hessian(cert.u, z)));
        ++r.samples;
    }
    r.ok = r.max_u < 0 && r.min_eigenvalue >= cert.c_hessian - tol;
    cert.report = r;
    return r;
}

ModulusOfContinuity ModulusOfContinuity::power(double C, double a) {
    if (C < 0 || !(a > 0)) throw Error(ErrorKind::invalid_argument, "power modulus needs C >= 0, a > 0");
    ModulusOfContinuity m;
    m.family_ = Family::power;
    m.C_ = C;
    m.a_ = a;
    return m;
}

ModulusOfContinuity ModulusOfContinuity::power_log(double C, double k) {
    if (C < 0 || !(k > 0)) throw Error(ErrorKind::invalid_argument, "log modulus needs C >= 0, k > 0");
    ModulusOfContinuity m;
    m.family_ = Family::power_log;
    m.C_ = C;
    m.a_ = k;
    return m;
}

ModulusOfContinuity ModulusOfContinuity::tabulated(std::vector<double> r, std::vector<double> w) {
    if (r.empty() || r.size() != w.size()) throw Error(ErrorKind::invalid_argument, "modulus table is malformed");
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double rp = i ? r[i - 1] : 0.0, wp = i ? w[i - 1] : 0.0;
        if (!(r[i] > rp) || w[i] < wp) throw Error(ErrorKind::invalid_argument, "modulus table is not monotone");
    }
    ModulusOfContinuity m;
    m.family_ = Family::tabulated;
    m.r_ = std::move(r);
    m.w_ = std::move(w);
    return m;
}

double ModulusOfContinuity::operator()(double r) const {
    if (r <= 0) return 0.0;
    switch (family_) {
        case Family::power: return C_ * std::pow(r, a_);
        case Family::power_log: return r >= std::exp(-1.0) ? C_ : C_ * std::pow(std::log(1.0 / r), -a_);
        case Family::tabulated: {
            if (r >= r_.back()) return w_.back();
            const auto it = std::upper_bound(r_.begin(), r_.end(), r);
            const std::size_t i = std::size_t(it - r_.begin());
            const double r0 = i ? r_[i - 1] : 0.0, w0 = i ? w_[i - 1] : 0.0;
            return w0 + (w_[i] - w0) * (r - r0) / (r_[i] - r0);
        }
    }
    return 0.0;
}

namespace {

double require_nonzero(const Vec& v) {
    const double nv = v.norm();
    if (!(nv > 0)) throw Error(ErrorKind::invalid_argument, "tangent vector must be nonzero");
    return nv;
}

}  // namespace

KobayashiBound upper_disc(const DomainSpec& dom, const Vec& z, const Vec& v) {
    const double nv = require_nonzero(v);
    const double r = disc_radius(dom, z, v / nv, {256, 1e-10, false}).disc_radius;
    KobayashiBound b;
    b.upper = nv / r;
    b.provenance = Provenance::disc_embedding;
    return b;
}

KobayashiBound graham_bounds(const DomainSpec& dom, const Vec& z, const Vec& v) {
    if (!dom.flags.convex) throw Error(ErrorKind::invalid_argument, "graham bounds need a convex domain");
    KobayashiBound b = upper_disc(dom, z, v);
    b.lower = b.upper / 2;
    b.provenance = Provenance::graham;
    return b;
}

KobayashiBound sibony_lower(const DomainSpec& dom, const Vec& z, const Vec& v, PshCertificate& cert,
                            double alpha_universal) {
    require_interior(dom, z);
    if (!(alpha_universal > 0)) throw Error(ErrorKind::invalid_argument, "alpha_universal must be positive");
    const double uz = cert.u(z);
    if (!(uz < 0)) throw Error(ErrorKind::invariant_violation, "certificate function is not negative at z");
    const double lam = min_eigenvalue(complex_hessian(cert.u, z));
    if (lam < cert.c_hessian - 1e-6)
        throw Error(ErrorKind::invariant_violation, "certificate Hessian bound fails at z");
    KobayashiBound b;
    b.lower = std::sqrt(cert.c_hessian / alpha_universal) * v.norm() / std::sqrt(-uz);
    b.provenance = Provenance::sibony;
    b.constants.c_hessian = cert.c_hessian;
    b.constants.alpha_universal = alpha_universal;
    return b;
}

KobayashiBound ma_lower(const DomainSpec& dom, const Vec& z, const Vec& v, const ModulusOfContinuity& mod,
                        double epsilon, double c_prop33) {
    if (!(epsilon > 0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
    const double delta = boundary_distance(dom, z);
    const double w = mod(delta);
    if (!(w > 0)) throw Error(ErrorKind::invalid_argument, "modulus vanishes at an interior distance");
    KobayashiBound b;
    b.lower = c_prop33 * std::sqrt(epsilon) * v.norm() / std::sqrt(w);
    b.provenance = Provenance::ma_modulus;
    b.constants.epsilon = epsilon;
    b.constants.c_prop33 = c_prop33;
    return b;
}

double calibrate_alpha_universal(int samples, std::uint64_t seed) {
    PshCertificate cert{[](const Vec& z) { return z.squaredNorm() - 1.0; }, 1.0, {}};
    Rng rng(seed);
    std::vector<Vec> pts{Vec::Zero(1)};
    while (int(pts.size()) < samples) {
        Vec z(1);
        z[0] = std::polar(0.95 * std::sqrt(uniform(rng)), uniform(rng, 0, 2 * kPi));
        pts.push_back(z);
    }
    // The Hessian bound c is measured, not assumed.
    double c = std::numeric_limits<double>::infinity();
    for (const auto& z : pts) c = std::min(c, min_eigenvalue(complex_hessian(cert.u, z)));
    double alpha = 0.0;
    for (const auto& z : pts) {
        const double exact = 1.0 / (1.0 - z.squaredNorm());
        // sqrt(c/alpha)/sqrt(|u|) <= exact  <=>  alpha >= c / (|u| exact^2)
        alpha = std::max(alpha, c / (-cert.u(z) * exact * exact));
    }
    return alpha;
}

DivergenceSequence flat_approach_sequence(int kmin, int kmax) {
    DivergenceSequence s;
    for (int k = kmin; k <= kmax; ++k) {
        const double nu = std::ldexp(1.0, k);
        Vec z = Vec::Zero(2), u = Vec::Zero(2);
        z[1] = -1.0 + 1.0 / (nu + 2.0);
        u[0] = 1.0;
        s.nu.push_back(nu);
        s.z.push_back(z);
        s.u.push_back(u);
    }
    return s;
}

DivergenceTable holder_divergence(const DomainSpec& dom, const DivergenceSequence& seq,
                                  const std::vector<double>& alphas) {
    if (seq.nu.size() != seq.z.size() || seq.z.size() != seq.u.size() || seq.nu.size() < 2)
        throw Error(ErrorKind::invalid_argument, "sequence needs matching nu, z, u of length >= 2");
    for (double a : alphas)
        if (!(a > 0 && a <= 1)) throw Error(ErrorKind::invalid_argument, "exponents must lie in (0, 1]");
    DivergenceTable t;
    t.alphas = alphas;
    for (std::size_t i = 0; i < seq.nu.size(); ++i) {
        if (std::abs(seq.u[i].norm() - 1.0) > 1e-12)
            throw Error(ErrorKind::invalid_argument, "sequence directions must be unit vectors");
        const auto pr = disc_radius(dom, seq.z[i], seq.u[i]);
        DivergenceRow row{seq.nu[i], pr.delta, pr.disc_radius, {}, {}};
        for (double a : alphas) {
            row.ratio.push_back(pr.disc_radius / std::pow(pr.delta, a));
            row.half_ratio.push_back(pr.disc_radius / std::pow(pr.delta, a / 2));
        }
        t.rows.push_back(std::move(row));
    }
    t.enough_samples = t.rows.size() >= 12;
    std::vector<double> lx;
    for (const auto& r : t.rows) lx.push_back(std::log(r.nu));
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        std::vector<double> ly, lh;
        for (const auto& r : t.rows) {
            ly.push_back(std::log(r.ratio[j]));
            lh.push_back(std::log(r.half_ratio[j]));
        }
        DivergenceVerdict v;
        v.alpha = alphas[j];
        // A constant sequence has no spread in nu; its ratios cannot grow.
        const bool spread = lx.front() != lx.back();
        v.slope = spread ? fit_line(lx, ly).slope : 0.0;
        v.slope_half = spread ? fit_line(lx, lh).slope : 0.0;
        v.diverges = t.enough_samples && v.slope > kDivergenceSlope;
        v.diverges_half = t.enough_samples && v.slope_half > kDivergenceSlope;
        t.verdicts.push_back(v);
    }
    return t;
}

std::string DivergenceTable::to_csv() const {
    std::ostringstream os;
    os << "nu,delta,r";
    char buf[128];
    for (double a : alphas) {
        std::snprintf(buf, sizeof buf, ",ratio_%g,half_ratio_%g", a, a);
        os << buf;
    }
    os << '\n';
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.nu, r.delta, r.r);
        os << buf;
        for (std::size_t j = 0; j < alphas.size(); ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", r.ratio[j], r.half_ratio[j]);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace plurilab
