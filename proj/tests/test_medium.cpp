#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rdfront/medium.hpp"

using namespace rdfront;

namespace {

PeriodicMedium homogeneous_cubic(double theta, int dim = 2) {
    return make_cubic_medium([theta](Vec2) { return theta; },
                             [](Vec2) { return identity_mat(); }, {1.0, 1.0}, dim);
}

PeriodicMedium striped_cubic(double theta0, double contrast) {
    return make_preset_medium("cubic-striped", theta0, contrast, 1.0, {1.0, 1.0}, 2);
}

} // namespace

TEST_CASE("cubic reaction values match hand arithmetic") {
    auto m = homogeneous_cubic(0.25);
    CHECK(m.reaction({0.3, 0.7}, 0.0) == 0.0);
    CHECK(m.reaction({0.3, 0.7}, 1.0) == 0.0);

    // theta(x) = 0.3 + 0.1 sin(2 pi x), at x = 0, u = 0.5: 0.5*0.5*(0.5-0.3)
    auto striped = make_cubic_medium(
        [](Vec2 p) { return 0.3 + 0.1 * std::sin(2.0 * M_PI * p.x); },
        [](Vec2) { return identity_mat(); }, {1.0, 1.0}, 2);
    CHECK(striped.reaction({0.0, 0.0}, 0.5) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("construction rejects bad inputs with located witnesses") {
    CHECK_THROWS_AS(make_cubic_medium([](Vec2) { return 1.5; },
                                      [](Vec2) { return identity_mat(); }, {1.0, 1.0},
                                      2),
                    ValidationFault);
    // negative eigenvalue at every point
    CHECK_THROWS_AS(make_cubic_medium([](Vec2) { return 0.25; },
                                      [](Vec2) { return SymMat2{-1.0, 0.0, 1.0}; },
                                      {1.0, 1.0}, 2),
                    ValidationFault);
}

TEST_CASE("validation report on the homogeneous cubic") {
    auto m = homogeneous_cubic(0.25);
    auto rep = validate_medium(m, 16);
    CHECK(rep.all_pass());
    CHECK(rep.homogeneous);
    // analytic integral of u(1-u)(u-theta) over [0,1] is (1-2 theta)/12
    CHECK(rep.h1_integral == doctest::Approx((1.0 - 0.5) / 12.0).epsilon(1e-6));
    CHECK(rep.h1_positive);
}

TEST_CASE("balanced cubic flags the H1 boundary case") {
    auto m = homogeneous_cubic(0.5);
    auto rep = validate_medium(m, 16);
    CHECK(rep.h1_boundary);
    CHECK(!rep.h1_positive);
}

TEST_CASE("sampling density precondition") {
    auto m = homogeneous_cubic(0.25);
    CHECK_THROWS_AS(validate_medium(m, 4), ValidationFault);
}

TEST_CASE("periodicity of striped preset under random period shifts") {
    auto m = striped_cubic(0.3, 0.1);
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> ux(-5.0, 5.0), uu(0.0, 1.0);
    std::uniform_int_distribution<int> ki(-3, 3);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
        Vec2 p{ux(rng), ux(rng)};
        Vec2 q{p.x + ki(rng) * m.periods.x, p.y + ki(rng) * m.periods.y};
        double u = uu(rng);
        worst = std::max(worst, std::abs(m.reaction(p, u) - m.reaction(q, u)));
        SymMat2 Ap = m.diffusion(p), Aq = m.diffusion(q);
        worst = std::max(worst, std::abs(Ap.a11 - Aq.a11));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("sign pattern: single bistable zero located by bisection") {
    auto m = striped_cubic(0.3, 0.15);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int s = 0; s < 50; ++s) {
        Vec2 p{ux(rng), ux(rng)};
        double lo = 1e-6, hi = 1.0 - 1e-6;
        REQUIRE(m.reaction(p, lo) < 0.0);
        REQUIRE(m.reaction(p, hi) > 0.0);
        while (hi - lo > 1e-12) {
            double mid = 0.5 * (lo + hi);
            (m.reaction(p, mid) < 0 ? lo : hi) = mid;
        }
        double theta_x = 0.5 * (lo + hi);
        double expected = 0.3 + 0.15 * std::sin(2.0 * M_PI * p.x);
        CHECK(theta_x == doctest::Approx(expected).epsilon(1e-9));
        CHECK(std::abs(m.reaction(p, theta_x)) <= 1e-10);
        int changes = 0;
        double prev = m.reaction(p, 0.001);
        for (int k = 2; k < 1000; ++k) {
            double v = m.reaction(p, k / 1000.0);
            if (prev * v < 0) ++changes;
            if (v != 0) prev = v;
        }
        CHECK(changes == 1);
    }
}

TEST_CASE("fringe slope by central differences stays below -kappa/2") {
    auto m = striped_cubic(0.35, 0.1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    const double du = 1e-5;
    double worst = -1e300;
    for (int s = 0; s < 200; ++s) {
        Vec2 p{ux(rng), ux(rng)};
        for (double u : {-0.4, -0.1, 0.0, 0.5 * m.sigma, m.sigma, 1.0 - m.sigma,
                         1.0 - 0.5 * m.sigma, 1.0, 1.2, 1.5}) {
            double fu = (m.reaction(p, u + du) - m.reaction(p, u - du)) / (2 * du);
            worst = std::max(worst, fu);
        }
    }
    CHECK(worst <= -0.5 * m.kappa);
}

TEST_CASE("A4 violation is reported, not silently accepted") {
    // hand-built medium with an indefinite matrix; bypasses the cubic factory
    PeriodicMedium m = homogeneous_cubic(0.25);
    m.diffusion = [](Vec2 p) {
        if (std::abs(p.x - 0.5) < 0.05 && std::abs(p.y - 0.5) < 0.05)
            return SymMat2{1.0, 2.0, 1.0}; // eigenvalues -1 and 3
        return identity_mat();
    };
    auto rep = validate_medium(m, 16);
    bool a4_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "A4 uniform ellipticity" && !c.pass) a4_failed = true;
    CHECK(a4_failed);
}

TEST_CASE("checkerboard preset stays elliptic and periodic") {
    auto m = make_preset_medium("checkerboard-diffusion", 0.25, 0.4, 1.0, {1.0, 1.0}, 2);
    auto rep = validate_medium(m, 16);
    CHECK(rep.all_pass());
    CHECK(!rep.homogeneous);
}

TEST_CASE("unknown preset rejected") {
    CHECK_THROWS_AS(make_preset_medium("nope", 0.25, 0.0, 1.0, {1.0, 1.0}, 2),
                    ConfigFault);
}
