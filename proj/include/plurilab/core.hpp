#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace plurilab {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

using RealField = std::function<double(const Vec&)>;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
    invalid_argument,
    not_interior,
    no_convergence,
    bracket_failure,
    invariant_violation,
    unknown_name,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Complex n-vectors are identified with R^{2n} by z_k = x_{2k} + i x_{2k+1}.
[[nodiscard]] RVec to_real(const Vec& z);
[[nodiscard]] Vec to_complex(const RVec& x);

// Real inner product on C^n = R^{2n}: Re <a, b>.
[[nodiscard]] inline double real_dot(const Vec& a, const Vec& b) { return a.dot(b).real(); }

[[nodiscard]] Vec random_unit(int n, Rng& rng);
[[nodiscard]] double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);

// Gradient of a real function on C^n in packed form d_k = df/dx_k + i df/dy_k,
// central differences with one Richardson step.
[[nodiscard]] Vec real_gradient(const RealField& f, const Vec& z, double h = 1e-6);

// Least-squares slope and intercept of y against x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // max |y - fit|
};
[[nodiscard]] LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace plurilab
