#pragma once

#include "plurilab/domains.hpp"

#include <limits>
#include <string>
#include <vector>

namespace plurilab {

enum class Provenance { disc_embedding, graham, sibony, ma_modulus };
[[nodiscard]] std::string to_string(Provenance p);

struct BoundConstants {
    double c_hessian = 0.0;
    double alpha_universal = 0.0;
    double epsilon = 0.0;
    double c_prop33 = 0.0;
};

struct KobayashiBound {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    Provenance provenance = Provenance::disc_embedding;
    BoundConstants constants;
};

struct CertificateReport {
    bool ok = true;
    double max_u = -std::numeric_limits<double>::infinity();
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    int samples = 0;
};

struct PshCertificate {
    RealField u;
    double c_hessian = 0.0;
    CertificateReport report;
};

// Negativity and Hessian-eigenvalue check at the given points; fills cert.report.
CertificateReport check_certificate(PshCertificate& cert, const std::vector<Vec>& samples, double tol = 1e-6);

class ModulusOfContinuity {
public:
    enum class Family { power, power_log, tabulated };

    // C r^a.
    static ModulusOfContinuity power(double C, double a);
    // C (log 1/r)^{-k} for r <= 1/e, constant C beyond.
    static ModulusOfContinuity power_log(double C, double k);
    // Piecewise linear through (0,0) and the table; must be nondecreasing.
    static ModulusOfContinuity tabulated(std::vector<double> r, std::vector<double> w);

    [[nodiscard]] double operator()(double r) const;
    [[nodiscard]] Family family() const { return family_; }
    [[nodiscard]] double C() const { return C_; }
    [[nodiscard]] double exponent() const { return a_; }
    [[nodiscard]] const std::vector<double>& radii() const { return r_; }
    [[nodiscard]] const std::vector<double>& values() const { return w_; }

private:
    Family family_ = Family::power;
    double C_ = 1.0, a_ = 1.0;
    std::vector<double> r_, w_;
};

[[nodiscard]] KobayashiBound upper_disc(const DomainSpec& dom, const Vec& z, const Vec& v);
[[nodiscard]] KobayashiBound graham_bounds(const DomainSpec& dom, const Vec& z, const Vec& v);
[[nodiscard]] KobayashiBound sibony_lower(const DomainSpec& dom, const Vec& z, const Vec& v, PshCertificate& cert,
                                          double alpha_universal);
[[nodiscard]] KobayashiBound ma_lower(const DomainSpec& dom, const Vec& z, const Vec& v,
                                      const ModulusOfContinuity& mod, double epsilon, double c_prop33 = 1.0);

// Smallest alpha with sibony_lower <= 1/(1-|z|^2) on the unit disc for the
// certificate |z|^2 - 1, over z = 0 and samples - 1 seeded points.
[[nodiscard]] double calibrate_alpha_universal(int samples = 100, std::uint64_t seed = 2024);

struct DivergenceSequence {
    std::vector<double> nu;
    std::vector<Vec> z;
    std::vector<Vec> u;
};

// z_nu = (0, -1 + 1/(nu + 2)), u_nu = e_1 for nu = 2^k.
[[nodiscard]] DivergenceSequence flat_approach_sequence(int kmin, int kmax);

struct DivergenceRow {
    double nu = 0, delta = 0, r = 0;
    std::vector<double> ratio;       // r / delta^alpha
    std::vector<double> half_ratio;  // r / delta^{alpha/2}
};

struct DivergenceVerdict {
    double alpha = 0;
    double slope = 0;
    bool diverges = false;
    double slope_half = 0;
    bool diverges_half = false;
};

struct DivergenceTable {
    std::vector<double> alphas;
    std::vector<DivergenceRow> rows;
    std::vector<DivergenceVerdict> verdicts;
    bool enough_samples = false;  // at least 12 sequence points

    [[nodiscard]] std::string to_csv() const;
};

inline constexpr double kDivergenceSlope = 0.05;

[[nodiscard]] DivergenceTable holder_divergence(const DomainSpec& dom, const DivergenceSequence& seq,
                                                const std::vector<double>& alphas);

}  // namespace plurilab
