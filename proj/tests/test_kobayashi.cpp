#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "plurilab/kobayashi.hpp"

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

double poincare(const Vec& z) { return 1.0 / (1.0 - z.squaredNorm()); }

PshCertificate ball_certificate() { return {[](const Vec& z) { return z.squaredNorm() - 1.0; }, 1.0, {}}; }

}  // namespace

TEST_CASE("disc-embedding and graham bounds") {
    const auto ball2 = make_builtin("ball", {2, 1.0, {}});
    const Vec v = pt({0.3, cd(0, -0.4)});
    CHECK(upper_disc(ball2, Vec::Zero(2), v).upper == doctest::Approx(v.norm()).epsilon(1e-9));

    const auto disc = make_builtin("ball", {1, 1.0, {}});
    const auto up = upper_disc(disc, pt({0.5}), pt({1.0}));
    CHECK(up.upper == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(up.lower == 0.0);
    CHECK(to_string(up.provenance) == "disc-embedding");

    const auto g = graham_bounds(disc, pt({0.5}), pt({1.0}));
    CHECK(g.lower == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.lower <= 4.0 / 3.0);
    CHECK(4.0 / 3.0 <= g.upper);
    CHECK(g.upper == up.upper);

    CHECK_THROWS_AS((void)graham_bounds(make_builtin("example_D"), pt({0, cd(0, 0.5)}), pt({1, 0})), Error);
    CHECK_THROWS_AS((void)upper_disc(disc, pt({0.5}), pt({0.0})), Error);
}

TEST_CASE("graham bounds on the flat domain bracket the sandwich") {
    const auto om = make_builtin("omega_phi", {2, 1.0, {}});
    for (double eps : {-0.9, -0.75, -0.6}) {
        const double s = std::sqrt(phi_flat_inverse(1 + eps));
        const Vec v = pt({2.0, 0});
        const auto g = graham_bounds(om, pt({0, eps}), v);
        CHECK(g.lower >= v.norm() / (4 * s) - 1e-9);
        CHECK(g.upper <= v.norm() / s + 1e-9);
    }
}

TEST_CASE("sibony lower bound") {
    const auto ball2 = make_builtin("ball", {2, 1.0, {}});
    auto cert = ball_certificate();
    const Vec v = pt({0.6, 0.8});
    CHECK(sibony_lower(ball2, Vec::Zero(2), v, cert, 1.0).lower == doctest::Approx(1.0));
    CHECK(sibony_lower(ball2, Vec::Zero(2), Vec::Zero(2), cert, 1.0).lower == 0.0);

    const auto Om = make_builtin("example_Omega");
    PshCertificate c2{Om.rho, 0.5, {}};
    Rng rng(3);
    const auto pts = sample_interior(Om, 10, rng);
    CHECK(check_certificate(c2, pts).ok);
    for (const auto& w : pts) {
        const double lo = sibony_lower(Om, w, pt({1, 0, 0}), c2, 1.0).lower;
        CHECK(std::isfinite(lo));
        CHECK(lo > 0);
    }

    PshCertificate wrong{[](const Vec& z) { return z.squaredNorm() - 1.0; }, 2.0, {}};
    CHECK_THROWS_AS((void)sibony_lower(ball2, Vec::Zero(2), v, wrong, 1.0), Error);
    PshCertificate positive{[](const Vec& z) { return z.squaredNorm() + 1.0; }, 1.0, {}};
    CHECK_THROWS_AS((void)sibony_lower(ball2, Vec::Zero(2), v, positive, 1.0), Error);
}

TEST_CASE("alpha calibration and the sibony/upper invariant") {
    const double alpha = calibrate_alpha_universal();
    CHECK(alpha == doctest::Approx(1.0).epsilon(1e-6));
    const auto disc = make_builtin("ball", {1, 1.0, {}});
    auto cert = ball_certificate();
    for_all(
        20, 51, [](Rng& rng) { return testsupport::point_in_ball(1, 0.95, rng); },
        [&](const Vec& z) {
            const double lo = sibony_lower(disc, z, pt({1.0}), cert, alpha).lower;
            CHECK(lo <= poincare(z) * (1 + 1e-9));
            CHECK(lo <= upper_disc(disc, z, pt({1.0})).upper);
        });
}

TEST_CASE("modulus families") {
    const auto p = ModulusOfContinuity::power(2.0, 0.5);
    CHECK(p(0.25) == doctest::Approx(1.0));
    CHECK(p(0.0) == 0.0);
    const auto l = ModulusOfContinuity::power_log(1.0, 2.0);
    CHECK(l(std::exp(-3.0)) == doctest::Approx(1.0 / 9.0));
    CHECK(l(0.9) == 1.0);
    const auto t = ModulusOfContinuity::tabulated({0.5, 1.0}, {1.0, 1.5});
    CHECK(t(0.25) == doctest::Approx(0.5));
    CHECK(t(0.75) == doctest::Approx(1.25));
    CHECK(t(3.0) == 1.5);
    CHECK_THROWS_AS((void)ModulusOfContinuity::tabulated({0.5, 1.0}, {1.0, 0.5}), Error);
}

TEST_CASE("ma-modulus lower bound") {
    const auto ball2 = make_builtin("ball", {2, 1.0, {}});
    const Vec v = pt({0, 3.0});
    // delta = 1, omega(r) = r, c = eps = 1.
    CHECK(ma_lower(ball2, Vec::Zero(2), v, ModulusOfContinuity::power(1, 1), 1.0).lower ==
          doctest::Approx(3.0).epsilon(1e-7));
    // omega = r^a gives c sqrt(eps) |v| / delta^{a/2}.
    const auto b = ma_lower(ball2, pt({0.5, 0}), v, ModulusOfContinuity::power(1, 0.6), 0.25, 2.0);
    CHECK(b.lower == doctest::Approx(2.0 * 0.5 * 3.0 / std::pow(0.5, 0.3)).epsilon(1e-7));
    CHECK(to_string(b.provenance) == "ma-modulus");

    // Modulus of |z|^2 - 1 on the closed disc: omega(r) = 2r - r^2 (r <= 1).
    std::vector<double> rs, ws;
    for (int i = 1; i <= 64; ++i) {
        const double r = i / 64.0;
        rs.push_back(r);
        ws.push_back(2 * r - r * r);
    }
    const auto tab = ModulusOfContinuity::tabulated(rs, ws);
    const auto disc = make_builtin("ball", {1, 1.0, {}});
    for_all(
        20, 61, [](Rng& rng) { return testsupport::point_in_ball(1, 0.97, rng); },
        [&](const Vec& z) { CHECK(ma_lower(disc, z, pt({1.0}), tab, 1.0).lower <= poincare(z) * (1 + 1e-6)); });

    // With the true modulus of |z|^2 - 1, lower <= K <= |v|/r, so lower * r <= |v|.
    for_all(
        10, 67, [](Rng& rng) { return std::pair{testsupport::point_in_ball(2, 0.9, rng), random_unit(2, rng)}; },
        [&](const auto& s) {
            const double lo = ma_lower(ball2, s.first, s.second, tab, 1.0).lower;
            const double r = disc_radius(ball2, s.first, s.second, {128, 1e-10, false}).disc_radius;
            CHECK(lo * r <= 1.0 + 1e-9);
        });

    CHECK_THROWS_AS((void)ma_lower(ball2, Vec::Zero(2), v, ModulusOfContinuity::power(0, 1), 1.0), Error);
    CHECK_THROWS_AS((void)ma_lower(ball2, Vec::Zero(2), v, ModulusOfContinuity::power(1, 1), 0.0), Error);
}

TEST_CASE("property: bounds are 1-homogeneous in v") {
    const auto om = make_builtin("omega_phi", {2, 1.0, {}});
    auto cert = ball_certificate();
    const auto ball2 = make_builtin("ball", {2, 1.0, {}});
    for_all(
        6, 71, [](Rng& rng) { return std::pair{testsupport::point_in_ball(2, 0.5, rng), random_unit(2, rng)}; },
        [&](const auto& s) {
            const auto& [z, v] = s;
            CHECK(graham_bounds(om, z, 2.0 * v).upper == 2.0 * graham_bounds(om, z, v).upper);
            CHECK(graham_bounds(om, z, 2.0 * v).lower == 2.0 * graham_bounds(om, z, v).lower);
            CHECK(sibony_lower(ball2, z, 2.0 * v, cert, 1.0).lower ==
                  doctest::Approx(2.0 * sibony_lower(ball2, z, v, cert, 1.0).lower).epsilon(1e-15));
        });
}

TEST_CASE("holder divergence diagnostic") {
    const auto om = make_builtin("omega_phi", {2, 1.0, {}});
    const auto t = holder_divergence(om, flat_approach_sequence(2, 13), {0.5, 1.0});
    REQUIRE(t.enough_samples);
    for (const auto& v : t.verdicts) {
        CHECK(v.diverges);
        CHECK(v.diverges_half);
    }
    for (const auto& r : t.rows) {
        const double bound = 1.0 / std::sqrt(std::log(std::exp(2.0) / (3 * r.delta)));
        CHECK(r.r >= bound);
        CHECK(std::abs(r.delta - 1.0 / (r.nu + 2)) < 1e-8);
        CHECK(r.ratio[1] >= bound / r.delta);
    }
    CHECK(t.to_csv().rfind("nu,delta,r,ratio_0.5,half_ratio_0.5,ratio_1,half_ratio_1\n", 0) == 0);

    // Radial approach in the ball: r = delta, so alpha = 1 does not diverge.
    const auto ball2 = make_builtin("ball", {2, 1.0, {}});
    DivergenceSequence radial;
    for (int k = 2; k <= 13; ++k) {
        const double nu = std::ldexp(1.0, k);
        radial.nu.push_back(nu);
        radial.z.push_back(pt({1.0 - 1.0 / (nu + 2), 0}));
        radial.u.push_back(pt({1, 0}));
    }
    const auto tb = holder_divergence(ball2, radial, {1.0});
    CHECK_FALSE(tb.verdicts[0].diverges);
    for (const auto& r : tb.rows) CHECK(std::abs(r.r - r.delta) < 1e-8);

    DivergenceSequence still = radial;
    for (auto& z : still.z) z = pt({0.5, 0});
    const auto tc = holder_divergence(ball2, still, {0.5, 1.0});
    for (const auto& v : tc.verdicts) CHECK_FALSE(v.diverges);
    for (const auto& r : tc.rows) CHECK(r.ratio[1] == doctest::Approx(tc.rows[0].ratio[1]).epsilon(1e-9));
}
