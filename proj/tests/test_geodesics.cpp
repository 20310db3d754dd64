#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "plurilab/geodesics.hpp"

#include <cmath>

using namespace plurilab;
using testsupport::for_all;
using testsupport::point_in_ball;

namespace {

Vec pt(cd a, cd b) {
    Vec z(2);
    z << a, b;
    return z;
}

const DomainSpec& ball2() {
    static const DomainSpec d = make_builtin("ball", {2, 1.0, {}});
    return d;
}

const DomainSpec& lens() {
    static const DomainSpec d = intersection_domain({ellipsoid_ball(pt(0, 0), 1), ellipsoid_ball(pt(0.5, 0), 1)});
    return d;
}

AnalyticDisc radial() { return linear_disc(pt(0, 0), pt(1, 0)); }

struct PQ {
    Vec p, q;
};

PQ random_pair(Rng& rng) { return {point_in_ball(2, 0.9, rng), point_in_ball(2, 0.9, rng)}; }

// (1 - z) log(1 - z) + z, continuous up to the circle with value 1 at z = 1.
cd hl_g(cd z) { return z == 1.0 ? cd(1) : (1.0 - z) * std::log(1.0 - z) + z; }
cd hl_dg(cd z) { return -std::log(1.0 - z); }

}  // namespace

TEST_CASE("ball automorphisms exchange a and 0 and are involutions") {
    for_all(
        50, 101, [](Rng& rng) { return random_pair(rng); },
        [](const PQ& s) {
            CHECK(ball_automorphism(s.p, s.p).norm() < 1e-12);
            CHECK((ball_automorphism(s.p, Vec::Zero(2)) - s.p).norm() < 1e-12);
            CHECK((ball_automorphism(s.p, ball_automorphism(s.p, s.q)) - s.q).norm() < 1e-12);
            CHECK(ball_automorphism(s.p, s.q).norm() < 1);
        });
}

TEST_CASE("ball distance matches the Poincare distance on lines through the origin") {
    for_all(
        50, 103, [](Rng& rng) { return random_pair(rng); },
        [](const PQ& s) {
            const Vec u = s.q.normalized();
            const cd a(0.3, -0.2), b(-0.5, 0.4);
            CHECK(ball_distance(a * u, b * u) == doctest::Approx(disc_distance(a, b)).epsilon(1e-12));
            CHECK(ball_distance(Vec::Zero(2), s.q) == doctest::Approx(std::atanh(s.q.norm())).epsilon(1e-12));
            // Automorphisms are isometries.
            const Vec a2 = ball_automorphism(s.p, s.q), b2 = ball_automorphism(s.p, 0.5 * s.q);
            CHECK(ball_distance(a2, b2) == doctest::Approx(ball_distance(s.q, 0.5 * s.q)).epsilon(1e-9));
        });
    CHECK_THROWS_AS((void)ball_distance(pt(1, 0), pt(0, 0)), Error);
    CHECK(disc_distance(0, 0.5) == doctest::Approx(std::atanh(0.5)));
}

TEST_CASE("ball geodesics") {
    SUBCASE("through the origin along e1") {
        const auto g = ball_geodesic(pt(0, 0), pt(0.4, 0));
        for (const cd z : {cd(0.3, 0.1), cd(-0.7, 0.2), cd(0, 0.99)}) {
            CHECK((g(z) - pt(z, 0)).norm() < 1e-14);
            CHECK(boundary_distance(ball2(), g(z)) == doctest::Approx(1 - std::abs(z)).epsilon(1e-8));
        }
    }
    SUBCASE("passes through p at 0 and q on the positive axis, derivative by differences") {
        for_all(
            30, 107, [](Rng& rng) { return random_pair(rng); },
            [](const PQ& s) {
                const auto g = ball_geodesic(s.p, s.q);
                CHECK((g(0.0) - s.p).norm() < 1e-12);
                const double t = ball_automorphism(s.p, s.q).norm();
                CHECK((g(t) - s.q).norm() < 1e-10);
                const cd z(0.2, -0.3);
                const double h = 1e-6;
                const Vec fd = (g(z + h) - g(z - h)) / (2 * h);
                CHECK((g.derivative(z) - fd).norm() < 1e-7);
                CHECK(validate_disc(g, ball2()).ok);
            });
    }
    CHECK_THROWS_AS((void)ball_geodesic(pt(0.1, 0), pt(0.1, 0)), Error);
    CHECK_THROWS_AS((void)ball_geodesic(pt(0.1, 0), pt(1.2, 0)), Error);
}

TEST_CASE("isometry defect") {
    std::vector<std::pair<cd, cd>> pairs{{0.0, 0.5}, {cd(0.3, 0.4), cd(-0.6, 0.1)}, {cd(0, 0.9), cd(0.2, -0.95)}};
    const auto r = isometry_defect(radial(), ball2(), pairs);
    CHECK(r.exact);
    CHECK(r.upper < 1e-10);

    int worst = 0;
    double max_defect = 0;
    for_all(
        50, 109, [](Rng& rng) { return random_pair(rng); },
        [&](const PQ& s) {
            const auto d = isometry_defect(ball_geodesic(s.p, s.q), ball2(), pairs);
            max_defect = std::max(max_defect, d.upper);
            worst += d.upper >= 1e-8;
        });
    CHECK(worst == 0);
    MESSAGE("max geodesic defect " << max_defect);

    // zeta -> (zeta^2, 0) contracts: atanh(1/4) < atanh(1/2).
    const auto sq = series_disc({pt(0, 0), pt(0, 0), pt(1, 0)});
    const auto bad = isometry_defect(sq, ball2(), {{0.0, 0.5}});
    CHECK(bad.lower == doctest::Approx(std::atanh(0.5) - std::atanh(0.25)).epsilon(1e-12));
}

TEST_CASE("convex distance bracket") {
    // The unit ball written as an intersection takes the bracketed path.
    const auto asIntersection = intersection_domain({ellipsoid_ball(pt(0, 0), 1)});
    for_all(
        8, 113, [](Rng& rng) { return random_pair(rng); },
        [&](const PQ& s) {
            const auto br = kobayashi_distance(asIntersection, s.p, s.q);
            const double exact = ball_distance(s.p, s.q);
            CHECK_FALSE(br.exact);
            CHECK(br.lower <= exact * (1 + 1e-9));
            CHECK(br.upper >= exact * (1 - 1e-6));
        });

    const auto br = kobayashi_distance(lens(), pt(0.25, 0), pt(0.25, 0.3));
    CHECK(br.lower > 0);
    CHECK(br.lower <= br.upper);
    const auto same = kobayashi_distance(lens(), pt(0.25, 0), pt(0.25, 0));
    CHECK(same.upper == 0);

    CHECK_THROWS_AS((void)kobayashi_distance(make_builtin("example_D"), pt(0, cd(0, 0.5)), pt(0, cd(0, 0.6))),
                    Error);
    const auto geo = ball_geodesic(pt(0, 0), pt(0.3, 0));
    const auto d = isometry_defect(geo, asIntersection, {{0.0, 0.5}});
    CHECK(d.lower == 0);
    CHECK(d.upper > 0);
}

TEST_CASE("mercer fit") {
    const auto radii = default_mercer_radii();
    SUBCASE("radial disc of the ball") {
        const auto f = mercer_fit(radial(), ball2(), radii);
        CHECK(f.C1 == doctest::Approx(0.98).epsilon(1e-6));
        CHECK(f.C2 == doctest::Approx(1 / 0.98).epsilon(1e-6));
        CHECK(f.beta >= 1);
        CHECK(f.beta <= 1 + 1e-6);
        CHECK(f.validated());
        CHECK(f.held_out == 11 * 8);
    }
    SUBCASE("ball geodesics are linear in the distance to the circle") {
        for_all(
            10, 127, [](Rng& rng) { return random_pair(rng); },
            [&](const PQ& s) {
                const auto f = mercer_fit(ball_geodesic(s.p, s.q), ball2(), radii);
                CHECK(f.beta >= 1);
                CHECK(f.beta <= 1.05);
                CHECK(f.C1 > 0);
                CHECK(f.validated());
            });
    }
    SUBCASE("disc along the flat direction of omega_phi, report only") {
        const auto om = make_builtin("omega_phi", {2, 1.0, {}});
        const double eta = 0.05;
        const double R = std::sqrt(phi_flat_inverse(1 - (1 - eta) * (1 - eta)));
        const auto disc = linear_disc(pt(0, -(1 - eta)), pt(R * (1 - 1e-9), 0));
        const auto f = mercer_fit(disc, om, radii);
        MESSAGE("omega_phi flat disc: beta " << f.beta << " C1 " << f.C1 << " C2 " << f.C2 << " violations "
                                             << f.violations);
        CHECK(std::isfinite(f.beta));
        CHECK(f.C1 > 0);
    }
    CHECK_THROWS_AS((void)mercer_fit(linear_disc(pt(0, 0), pt(1.5, 0)), ball2(), radii), Error);
    CHECK_THROWS_AS((void)mercer_fit(radial(), ball2(), {0.9, 0.5, 0.7, 0.8}), Error);
}

TEST_CASE("Hardy-Littlewood extension") {
    const auto angles = uniform_angles(64);
    SUBCASE("entire function") {
        const auto v = hl_extend([](cd z) { return z * z; }, [](cd z) { return 2.0 * z; }, Majorant::power(2, 0),
                                 angles);
        for (const auto& b : v) CHECK(std::abs(b.value - std::polar(1.0, 2 * b.theta)) < 1e-10);
    }
    SUBCASE("logarithmic derivative") {
        // |log(1 - z)| <= log(1/(1-|z|)) + pi/2.
        const auto m = Majorant::log(2);
        const auto a = hl_extend(hl_g, hl_dg, m, angles, {0.5});
        const auto b = hl_extend(hl_g, hl_dg, m, angles, {0.75});
        double worst = 0, spread = 0;
        for (std::size_t k = 0; k < angles.size(); ++k) {
            worst = std::max(worst, std::abs(a[k].value - hl_g(std::polar(1.0, angles[k]))));
            spread = std::max(spread, std::abs(a[k].value - b[k].value));
        }
        CHECK(worst < 1e-4);
        CHECK(spread < 1e-6);
    }
    SUBCASE("components of a ball geodesic reach the closed-form boundary curve") {
        const auto g = ball_geodesic(pt(0.3, cd(0, 0.2)), pt(-0.1, 0.5));
        for (int j = 0; j < 2; ++j) {
            const auto v = hl_extend([&](cd z) { return g(z)[j]; }, [&](cd z) { return g.derivative(z)[j]; },
                                     Majorant::power(20, 0), uniform_angles(16));
            for (const auto& b : v) CHECK(std::abs(b.value - g(std::polar(1.0, b.theta))[j]) < 1e-6);
        }
    }
    SUBCASE("polynomials extend to their direct values") {
        for_all(
            20, 131,
            [](Rng& rng) {
                std::vector<cd> c(6);
                for (auto& x : c) x = cd(uniform(rng, -1, 1), uniform(rng, -1, 1));
                return c;
            },
            [&](const std::vector<cd>& c) {
                auto g = [&](cd z) {
                    cd s = 0;
                    for (std::size_t k = c.size(); k-- > 0;) s = s * z + c[k];
                    return s;
                };
                auto dg = [&](cd z) {
                    cd s = 0;
                    for (std::size_t k = c.size(); k-- > 1;) s = s * z + double(k) * c[k];
                    return s;
                };
                double A = 0;
                for (std::size_t k = 1; k < c.size(); ++k) A += double(k) * std::abs(c[k]);
                for (const auto& b : hl_extend(g, dg, Majorant::power(A, 0), uniform_angles(12)))
                    CHECK(std::abs(b.value - g(std::polar(1.0, b.theta))) < 1e-10);
            });
    }
    CHECK_THROWS_AS((void)hl_extend(hl_g, hl_dg, Majorant::power(1, 0), angles), Error);
    CHECK_THROWS_AS((void)hl_extend(hl_g, hl_dg, Majorant::power(1, 1), angles), Error);
    CHECK(Majorant::log(1).tail(0.01) == doctest::Approx(0.01 * (2 + std::log(100.0))));
}

TEST_CASE("Dini check") {
    for (const double sigma : {0.25, 1.0}) {
        const auto rep = dini_check(ModulusOfContinuity::power(1, sigma), 1, 1, 1);
        CHECK(rep.pass());
        // int_0^0.1 x^{sigma/2 - 1} dx = 0.1^{sigma/2} / (sigma/2)
        CHECK(rep.integral == doctest::Approx(std::pow(0.1, sigma / 2) / (sigma / 2)).epsilon(1e-12));
    }
    const auto slow = dini_check(ModulusOfContinuity::power_log(1, 2), 1, 1, 1);
    CHECK_FALSE(slow.pass());
    CHECK(slow.divergent);
    CHECK(dini_check(ModulusOfContinuity::power(0, 1), 1, 0.5, 1).integral == 0);
    CHECK(dini_check(ModulusOfContinuity::power(0, 1), 1, 0.5, 1).pass());

    SUBCASE("log family with k > 2 against substituted quadrature") {
        const double C2 = 2, s = 0.5, c = 3;
        const auto rep = dini_check(ModulusOfContinuity::power_log(1, 3), C2, s, c);
        CHECK(rep.pass());
        // x = e^{-u}: int tau(e^{-u}) e^{-u} du over [log 10, 400], midpoint rule on a fine grid.
        double I = 0;
        const int N = 400000;
        const double lo = std::log(10.0), hi = 400, h = (hi - lo) / N;
        for (int i = 0; i < N; ++i) {
            const double x = std::exp(-(lo + (i + 0.5) * h));
            I += rep.tau(x) * x * h;
        }
        // The neglected tail beyond u = 400 is below 2 / (c s) (s u)^{-1/2}.
        CHECK(rep.integral == doctest::Approx(I).epsilon(0.05));
        CHECK(rep.integral >= I);
    }
    SUBCASE("tabulated identity equals the power closed form") {
        const auto tab = ModulusOfContinuity::tabulated({0.5, 2, 10}, {0.5, 2, 10});
        const auto a = dini_check(tab, 1.5, 0.7, 2);
        const auto b = dini_check(ModulusOfContinuity::power(1, 1), 1.5, 0.7, 2);
        CHECK(a.integral == doctest::Approx(b.integral).epsilon(1e-9));
    }
    SUBCASE("monotone in the modulus") {
        for_all(
            40, 137,
            [](Rng& rng) {
                return std::array<double, 5>{uniform(rng, 0.05, 1), uniform(rng, 0.5, 4), uniform(rng, 0.1, 1),
                                             uniform(rng, 0, 1), uniform(rng, 0.1, 1)};
            },
            [](const std::array<double, 5>& a) {
                const double sigma = a[0], k = a[1], s = a[2], lam = a[3], C2 = a[4];
                // Scaled copies and chord interpolants of concave powers lie below.
                const auto w2 = ModulusOfContinuity::power(1, sigma);
                const auto w1 = ModulusOfContinuity::power(lam, sigma);
                const auto w1t = ModulusOfContinuity::tabulated({0.01, 0.1, 1}, {w2(0.01), w2(0.1), w2(1)});
                const auto r2 = dini_check(w2, C2, s, 1);
                CHECK(r2.pass());
                CHECK(dini_check(w1, C2, s, 1).pass());
                CHECK(dini_check(w1t, C2, s, 1).pass());
                const auto l2 = dini_check(ModulusOfContinuity::power_log(1, k), C2, s, 1);
                const auto l1 = dini_check(ModulusOfContinuity::power_log(lam, k), C2, s, 1);
                if (l2.pass()) CHECK(l1.pass());
                CHECK(l2.pass() == (k > 2));
            });
    }
    CHECK_THROWS_AS((void)dini_check(ModulusOfContinuity::power(1, 1), 1, 1.5, 1), Error);
    CHECK_THROWS_AS((void)dini_check(ModulusOfContinuity::power(1, 1), 1, 1, 0), Error);
}

TEST_CASE("geodesic derivative bound") {
    MercerFit fit;
    fit.C2 = 1;
    fit.beta = 1;
    const std::vector<double> radii{0.0, 0.5, 0.9, 0.99};
    SUBCASE("omega = r^2 gives rhs 1 and c_max 1") {
        const auto t = geodesic_derivative_bound(radial(), ball2(), ModulusOfContinuity::power(1, 2), fit, radii);
        CHECK(t.c_max == doctest::Approx(1).epsilon(1e-12));
        for (const auto& r : t.rows) CHECK(r.rhs == doctest::Approx(1).epsilon(1e-12));
        CHECK(geodesic_derivative_bound(radial(), ball2(), ModulusOfContinuity::power(1, 2), fit, radii, 4, 0.9).pass());
        CHECK_FALSE(
            geodesic_derivative_bound(radial(), ball2(), ModulusOfContinuity::power(1, 2), fit, radii, 4, 1.1).pass());
    }
    SUBCASE("omega = r gives rhs (1 - r)^{-1/2}") {
        const auto t = geodesic_derivative_bound(radial(), ball2(), ModulusOfContinuity::power(1, 1), fit, radii);
        for (const auto& r : t.rows) CHECK(r.rhs == doctest::Approx(1 / std::sqrt(1 - r.r)).epsilon(1e-12));
        CHECK(t.c_max == doctest::Approx(1).epsilon(1e-12));
    }
    SUBCASE("constant modulus: the admissible c grows towards the circle") {
        const auto t = geodesic_derivative_bound(ball_geodesic(pt(0.2, 0.1), pt(0, 0.4)), ball2(),
                                                 ModulusOfContinuity::tabulated({1e-12}, {1}), fit,
                                                 {0.9, 0.99, 0.999}, 1);
        CHECK(t.rows[2].rhs / t.rows[2].derivative > t.rows[0].rhs / t.rows[0].derivative);
    }
    CHECK_THROWS_AS((void)geodesic_derivative_bound(radial(), ball2(), ModulusOfContinuity::power(1, 1), fit, {1.0}),
                    Error);
}

TEST_CASE("intersection domains") {
    const auto single = intersection_domain({ellipsoid_ball(pt(0, 0), 1)});
    Rng rng(139);
    for (int i = 0; i < 50; ++i) {
        const Vec z = 1.5 * point_in_ball(2, 1, rng);
        CHECK((single.rho(z) < 0) == (ball2().rho(z) < 0));
    }
    CHECK(lens().rho(pt(0.25, 0)) < 0);
    CHECK(lens().rho(pt(-0.6, 0)) > 0);
    CHECK(lens().rho(pt(1.1, 0)) > 0);
    CHECK(lens().flags.convex);

    RVec axes(4);
    axes << 1, 0.8, 1.2, 0.9;
    const auto three = intersection_domain({ellipsoid_axes(pt(0, 0), axes), ellipsoid_ball(pt(0.3, 0), 1),
                                            ellipsoid_ball(pt(0, cd(0, 0.2)), 0.9)});
    const auto rep = convexity_spot_check(three);
    CHECK(rep.checked == 600);
    CHECK(rep.violations == 0);
    CHECK_THROWS_AS((void)intersection_domain({ellipsoid_ball(pt(0, 0), 0.3), ellipsoid_ball(pt(2, 0), 0.3)}), Error);
}
