#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "plurilab/monge_ampere.hpp"

#include <cmath>

using namespace plurilab;
using testsupport::for_all;

namespace {

Vec pt(std::initializer_list<cd> xs) {
    Vec z(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (cd x : xs) z[k++] = x;
    return z;
}

Mat diag(std::initializer_list<double> d) {
    Mat a = Mat::Zero(Eigen::Index(d.size()), Eigen::Index(d.size()));
    Eigen::Index k = 0;
    for (double x : d) a(k, k) = x, ++k;
    return a;
}

double rho2(const Vec& w) { return std::norm(w[0] * w[0] - 1.0) + h_profile(w[1]) + std::norm(w[2]); }

}  // namespace

TEST_CASE("complex hessian oracles") {
    for (int n = 1; n <= 3; ++n) {
        Rng rng(n);
        const Vec z = testsupport::point_in_ball(n, 2.0, rng);
        const Mat a = complex_hessian([](const Vec& w) { return w.squaredNorm(); }, z);
        CHECK((a - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
    }
    // d^2/dz dzbar (z zbar)^2 = 4 z zbar.
    const Mat q = complex_hessian([](const Vec& w) { return std::pow(std::norm(w[0]), 2); }, pt({1.0}));
    CHECK(std::abs(q(0, 0) - 4.0) < 1e-7);
    // A pluriharmonic function has zero Hessian.
    const Mat ph = complex_hessian([](const Vec& w) { return (w[0] * w[1]).real() + w[0].imag(); }, pt({0.3, 0.2}));
    CHECK(ph.cwiseAbs().maxCoeff() < 1e-8);
    // Off-diagonal convention: u = |z1 + i z2|^2 has a_{12} = conj(i) = -i.
    const Mat od = complex_hessian([](const Vec& w) { return std::norm(w[0] + cd(0, 1) * w[1]); }, pt({0.1, 0.2}));
    CHECK(std::abs(od(0, 1) - cd(0, -1)) < 1e-8);
    CHECK(std::abs(od(1, 0) - cd(0, 1)) < 1e-8);
}

TEST_CASE("hessian of the target defining function") {
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        Vec w(3);
        w << std::polar(uniform(rng, 0.8, 1.2), uniform(rng, -0.3, 0.3)), cd(uniform(rng, -0.2, 0.2), uniform(rng, 0.1, 0.9)),
            cd(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3));
        const double v = w[1].imag();
        const Mat expect = diag({4 * std::norm(w[0]), 0.5 + 3 * v * v, 1.0});
        CHECK((complex_hessian(rho2, w) - expect).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("density normalization") {
    CHECK(ma_density(Mat::Identity(2, 2)) == doctest::Approx(2.0));
    CHECK(ma_density(diag({1.0, 0.37})) == doctest::Approx(0.74));
    CHECK(ma_density(Mat::Identity(3, 3)) == doctest::Approx(6.0));
    for (int m = 1; m <= 3; ++m) {
        const Mat a = complex_hessian([](const Vec& w) { return w.squaredNorm(); }, Vec::Constant(m, cd(0.2, -0.1)));
        double fact = 1;
        for (int k = 2; k <= m; ++k) fact *= k;
        CHECK(std::abs(ma_density(a) - fact) < 1e-6);
    }
}

TEST_CASE("property: PSD Hermitian matrices have nonnegative density") {
    for_all(
        200, 41,
        [](Rng& rng) {
            const int m = 1 + int(uniform(rng) * 3) % 3;
            Mat B(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) B(i, j) = cd(uniform(rng, -1, 1), uniform(rng, -1, 1));
            return Mat(B.adjoint() * B);
        },
        [](const Mat& a) {
            CHECK(ma_density(a) >= -1e-12);
            CHECK(min_eigenvalue(a) >= -1e-12);
        });
}

TEST_CASE("holomorphic maps") {
    const auto F = sqrt_embedding_map();
    const Vec z = pt({cd(0.1, 0.2), cd(0.05, 0.4)});
    CHECK(cauchy_riemann_residual(F, z) < 1e-8);
    HoloMap fd = F;
    fd.jacobian = nullptr;
    CHECK((fd.jac(z) - F.jac(z)).cwiseAbs().maxCoeff() < 1e-9);
    // A non-holomorphic map is flagged.
    HoloMap bad{"conj", 1, 1, [](const Vec& w) { return Vec(w.conjugate()); }, {}};
    CHECK(cauchy_riemann_residual(bad, pt({0.3})) > 1.0);
}

TEST_CASE("pullback field") {
    const Vec z = pt({cd(0.2, -0.1), cd(0.3, 0.7)});
    const auto id = pullback_field(identity_map(2), identity_field(2), z);
    CHECK((id.a - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    Mat A(3, 2);
    A << cd(1, 2), cd(0, 1), cd(-1, 0.5), 2.0, cd(0.3, -0.2), cd(1, 1);
    const auto lin = pullback_field(linear_map(A), identity_field(3), z);
    // Oracle: Hessian of |Az|^2, a_{jk} = sum_mu A_{mu j} conj(A_{mu k}).
    Mat expect(2, 2);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) expect(j, k) = (A.col(j).array() * A.col(k).conjugate().array()).sum();
    CHECK((lin.a - expect).cwiseAbs().maxCoeff() < 1e-12);
    const Mat viaHessian = complex_hessian([&](const Vec& w) { return (A * w).squaredNorm(); }, z);
    CHECK((lin.a - viaHessian).cwiseAbs().maxCoeff() < 1e-7);

    const auto Om = make_builtin("example_Omega");
    const auto b = hessian_field(rho2, 3, 8.0, [&](const Vec& w) { return Om.contains(w); });
    const auto D = make_builtin("example_D");
    Rng rng(8);
    for (const auto& p : sample_interior(D, 30, rng)) {
        const auto s = pullback_field(sqrt_embedding_map(), b, p);
        const double v = p[1].imag();
        CHECK((s.a - diag({1.0, 0.5 + 3 * v * v})).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(s.density >= 0);
    }
    // Density at Im z2 = 0.3 is 2 (1/2 + 0.27) = 1.54.
    const auto s = pullback_field(sqrt_embedding_map(), b, pt({0.0, cd(0.0, 0.3)}));
    CHECK(std::abs(s.density - 1.54) < 1e-6);

    CHECK_THROWS_AS((void)pullback_field(sqrt_embedding_map(), b, pt({0.0, cd(0.0, -0.3)})), Error);
    CHECK(check_field(b, {sqrt_embedding_map()(pt({0.0, cd(0.0, 0.3)}))}).ok);
}

TEST_CASE("lp norm estimates") {
    const auto disc = make_builtin("ball", {1, 1.0, {}});
    const auto one = lp_norm_estimate([](const Vec&) { return 1.0; }, disc, 2.0, {20000, 3});
    CHECK(std::abs(one.value / std::sqrt(kPi) - 1) < 0.02);
    const auto sing = lp_norm_estimate([](const Vec& z) { return std::pow(z.norm(), -0.5); }, disc, 2.0, {40000, 5});
    CHECK(std::abs(sing.value / std::sqrt(2 * kPi) - 1) < 0.05);
    CHECK(one.samples <= 20000);

    // z^2 on the disc, p = 2: int |z|^4 = pi/3.
    const auto sq = lp_norm_estimate([](const Vec& z) { return std::norm(z[0]); }, disc, 2.0, {20000, 7});
    CHECK(std::abs(sq.value / std::sqrt(kPi / 3) - 1) < 0.02);

    CHECK_THROWS_AS((void)lp_norm_estimate([](const Vec&) { return NAN; }, disc, 2.0, {2000, 1}), Error);
    CHECK_THROWS_AS((void)lp_norm_estimate([](const Vec&) { return 1.0; }, disc, 0.5, {2000, 1}), Error);
    CHECK_THROWS_AS((void)lp_norm_estimate([](const Vec&) { return 1.0; }, disc, 2.0, {100, 1}), Error);
}
