#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "plurilab/domains.hpp"

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

// Brute-force distance from (0, i*v0) to the boundary of example_D. By the
// rotation symmetry in z1 only a = |z1| matters; boundary points solve
// v^2 - v^4 = a^2 + 2u^2 with two roots in v.
double example_D_distance_oracle(double v0) {
    double best = 1e9;
    auto scan = [&](double a0, double a1, double u0, double u1, int N) {
        double ba = 0, bu = 0;
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) {
                const double a = a0 + (a1 - a0) * i / N, u = u0 + (u1 - u0) * j / N;
                const double c = a * a + 2 * u * u;
                if (c < 0 || c > 0.25) continue;
                const double disc = std::sqrt(1 - 4 * c);
                for (double v2 : {(1 - disc) / 2, (1 + disc) / 2}) {
                    const double v = std::sqrt(v2);
                    const double d = std::sqrt(a * a + u * u + (v - v0) * (v - v0));
                    if (d < best) {
                        best = d;
                        ba = a;
                        bu = u;
                    }
                }
            }
        return std::pair{ba, bu};
    };
    auto [a, u] = scan(0, 0.5, -0.36, 0.36, 800);
    for (double w = 0.01; w > 1e-7; w /= 10) std::tie(a, u) = scan(std::max(0.0, a - w), a + w, u - w, u + w, 40);
    return best;
}

double ball_disc_radius(const Vec& c, double R, const Vec& z, const Vec& v) {
    const Vec w = z - c;
    const double b = std::abs(w.dot(v));
    return -b + std::sqrt(b * b + R * R - w.squaredNorm());
}

}  // namespace

TEST_CASE("builtin constructors") {
    const auto ball = make_builtin("ball", {2, 1.0, {}});
    CHECK(ball.rho(Vec::Zero(2)) == doctest::Approx(-1.0));
    CHECK(ball.bound_radius == 1.0);
    CHECK(ball.flags.convex);
    CHECK(ball.flags.reinhardt);

    const auto om = make_builtin("omega_phi", {2, 1.0, {}});
    CHECK(om.rho(pt({0, -0.75})) == doctest::Approx(0.5625 - 1.0));
    CHECK(om.contains(pt({0, -0.75})));

    const auto D = make_builtin("example_D");
    CHECK(h_profile(cd(0, 0.5)) == doctest::Approx(-0.1875));
    CHECK(D.rho(pt({0, cd(0, 0.5)})) == doctest::Approx(-0.1875));
    CHECK_FALSE(D.contains(pt({0, cd(0, -0.1)})));

    const auto Om = make_builtin("example_Omega");
    // The mirrored component around w1 = -1 is excluded.
    CHECK(Om.contains(pt({1.0, cd(0, 0.5), 0})));
    CHECK_FALSE(Om.contains(pt({-1.0, cd(0, 0.5), 0})));
}

TEST_CASE("phi profile") {
    CHECK(phi_flat(0.0) == 0.0);
    CHECK(phi_flat(1.0) == doctest::Approx(1.0));
    // Both branches meet at 1/2 with value 1/3.
    CHECK(phi_flat(0.5 - 1e-12) == doctest::Approx(1.0 / 3.0));
    for (double y : {1e-6, 0.01, 0.1, 1.0 / 3.0, 0.4, 0.9, 1.0})
        CHECK(phi_flat(phi_flat_inverse(y)) == doctest::Approx(y).epsilon(1e-12));
    CHECK(phi_flat_inverse(0.4) == doctest::Approx(0.55));
}

TEST_CASE("constructor errors") {
    CHECK_THROWS_AS((void)make_builtin("no_such_domain"), Error);
    CHECK_THROWS_AS((void)make_builtin("ball", {0, 1.0, {}}), Error);
    CHECK_THROWS_AS((void)make_builtin("strongly_convex_intersection", {2, 1.0, {}}), Error);
    const std::vector<Ellipsoid> apart = {ellipsoid_ball(pt({0, 0}), 1.0), ellipsoid_ball(pt({3.0, 0}), 1.0)};
    CHECK_THROWS_AS((void)intersection_domain(apart), Error);
}

TEST_CASE("validation flags") {
    for (const char* name : {"ball", "polydisc", "omega_phi"}) {
        const auto d = make_builtin(name, {2, 1.0, {}});
        CHECK(validate(d).ok);
    }
    auto d = make_builtin("example_D");
    d.flags.reinhardt = true;
    CHECK_FALSE(validate(d).ok);
}

TEST_CASE("boundary distance") {
    const auto ball = make_builtin("ball", {3, 1.0, {}});
    CHECK(boundary_distance(ball, Vec::Zero(3)) == doctest::Approx(1.0).epsilon(1e-8));

    const auto om = make_builtin("omega_phi", {2, 1.0, {}});
    for (double eps : {-0.9, -0.75, -0.6}) {
        INFO("eps = " << eps);
        CHECK(std::abs(boundary_distance(om, pt({0, eps})) - (1 + eps)) < 1e-8);
    }

    const auto D = make_builtin("example_D");
    const double oracle = example_D_distance_oracle(0.45);
    CHECK(std::abs(boundary_distance(D, pt({0, cd(0, 0.45)})) - oracle) < 1e-4);

    CHECK_THROWS_AS((void)boundary_distance(ball, pt({1.0, 0, 0})), Error);
    CHECK_THROWS_AS((void)boundary_distance(ball, pt({2.0, 0, 0})), Error);
}

TEST_CASE("disc radius examples") {
    const auto ball = make_builtin("ball", {2, 1.0, {}});
    CHECK(disc_radius(ball, Vec::Zero(2), pt({0, 1})).disc_radius == doctest::Approx(1.0).epsilon(1e-9));

    const auto poly = make_builtin("polydisc", {2, 1.0, {}});
    const auto pr = disc_radius(poly, pt({0.5, 0}), pt({1, 0}));
    CHECK(std::abs(pr.disc_radius - 0.5) < 1e-9);
    CHECK(pr.delta <= pr.disc_radius + 1e-9);

    const auto om = make_builtin("omega_phi", {2, 1.0, {}});
    for (double eps : {-0.9, -0.75, -0.6}) {
        const double lo = std::sqrt(phi_flat_inverse(1 + eps));
        const double r = disc_radius(om, pt({0, eps}), pt({1, 0}), {256, 1e-10, false}).disc_radius;
        CHECK(r >= lo);
        CHECK(r <= 2 * lo);
    }

    CHECK_THROWS_AS((void)disc_radius(ball, Vec::Zero(2), pt({1, 1})), Error);
}

TEST_CASE("probe table export") {
    const auto ball = make_builtin("ball", {1, 1.0, {}});
    const auto pr = disc_radius(ball, pt({0.5}), pt({1}), {16, 1e-10, true});
    const auto csv = pr.to_csv();
    CHECK(csv.rfind("theta,t_theta\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
    CHECK(pr.delta == doctest::Approx(0.5).epsilon(1e-8));
    // min over the table agrees with the reported radius up to refinement.
    const double tmin = *std::min_element(pr.exit_radius.begin(), pr.exit_radius.end());
    CHECK(pr.disc_radius <= tmin + 1e-12);
    CHECK(pr.disc_radius >= tmin - 1e-3);
}

TEST_CASE("property: delta <= disc radius") {
    for (const char* name : {"ball", "polydisc", "omega_phi", "example_D"}) {
        const auto dom = make_builtin(name, {2, 1.0, {}});
        INFO(name);
        Rng pts(3);
        const auto inner = sample_interior(dom, 6, pts);
        for_all(
            6, 17, [&](Rng& rng) { return std::pair{inner[std::size_t(uniform(rng) * 6) % 6], random_unit(2, rng)}; },
            [&](const auto& s) {
                const auto pr = disc_radius(dom, s.first, s.second, {64, 1e-10, true});
                CHECK(pr.delta <= pr.disc_radius + 1e-8);
                CHECK(pr.disc_radius <= 2 * dom.bound_radius);
            });
    }
}

TEST_CASE("property: inclusion monotonicity and phase invariance") {
    const auto small = make_builtin("ball", {2, 0.8, {}});
    const auto big = make_builtin("ball", {2, 1.0, {}});
    for_all(
        10, 23, [](Rng& rng) { return std::pair{testsupport::point_in_ball(2, 0.75, rng), random_unit(2, rng)}; },
        [&](const auto& s) {
            const double rs = disc_radius(small, s.first, s.second, {64, 1e-10, false}).disc_radius;
            const double rb = disc_radius(big, s.first, s.second, {64, 1e-10, false}).disc_radius;
            CHECK(rs <= rb + 1e-10);
        });

    const auto om = make_builtin("omega_phi", {2, 1.0, {}});
    for_all(
        5, 29, [](Rng& rng) {
            return std::tuple{testsupport::point_in_ball(2, 0.6, rng), random_unit(2, rng), uniform(rng, 0, 2 * kPi)};
        },
        [&](const auto& s) {
            const auto& [z, v, a] = s;
            const double r1 = disc_radius(om, z, v, {128, 1e-10, false}).disc_radius;
            const double r2 = disc_radius(om, z, std::polar(1.0, a) * v, {128, 1e-10, false}).disc_radius;
            CHECK(std::abs(r1 - r2) < 1e-6);
        });
}

TEST_CASE("property: convex disc radius matches closed forms") {
    // Off-centre balls via the intersection builder, and the polydisc.
    for_all(
        10, 31,
        [](Rng& rng) {
            const Vec c = 0.3 * random_unit(2, rng);
            const double R = uniform(rng, 0.5, 1.5);
            const Vec z = c + testsupport::point_in_ball(2, 0.9 * R, rng);
            return std::tuple{c, R, z, random_unit(2, rng)};
        },
        [](const auto& s) {
            const auto& [c, R, z, v] = s;
            const auto dom = intersection_domain({ellipsoid_ball(c, R)});
            const double r = disc_radius(dom, z, v, {256, 1e-10, false}).disc_radius;
            CHECK(std::abs(r - ball_disc_radius(c, R, z, v)) < 1e-6);
        });
    const auto poly = make_builtin("polydisc", {2, 1.0, {}});
    for_all(
        10, 37,
        [](Rng& rng) {
            Vec z(2);
            for (int k = 0; k < 2; ++k) z[k] = std::polar(uniform(rng, 0, 0.9), uniform(rng, 0, 2 * kPi));
            return std::pair{z, random_unit(2, rng)};
        },
        [&](const auto& s) {
            const auto& [z, v] = s;
            double expect = 1e9;
            for (int j = 0; j < 2; ++j) expect = std::min(expect, (1 - std::abs(z[j])) / std::abs(v[j]));
            CHECK(std::abs(disc_radius(poly, z, v, {256, 1e-10, false}).disc_radius - expect) < 1e-6);
        });
}

TEST_CASE("sampling") {
    const auto D = make_builtin("example_D");
    Rng rng(5);
    for (const auto& z : sample_interior(D, 50, rng)) CHECK(D.rho(z) < 0);
    for (const auto& z : sample_boundary(D, 20, rng)) CHECK(std::abs(D.rho(z)) < 1e-9);
}
