#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rdfront/speed_map.hpp"

using namespace rdfront;

namespace {

const double kC = std::sqrt(2.0) / 2.0;
const double c_f = 0.3535533905932738;

SpeedMap homogeneous_override() {
    return override_speed_map({0.0, 1.0}, [](Vec2) { return c_f; });
}

// g carries a strict interior extremum over the cap; beta > 0 reverses the
// facet gradient signs (the W-variant synthetic instance).
SpeedMap bump_override(double beta) {
    return override_speed_map({0.0, 1.0}, [beta](Vec2 e) {
        double sin_gamma_sq = e.x * e.x; // e0 = (0,1)
        double g = c_f * (1.0 + beta * (0.5 - sin_gamma_sq));
        return g * e.y;
    });
}

// Synthetic sampled map with equal speeds plus a fixed stderr.
SpeedMap sampled_map(int count, double sigma) {
    SpeedMap map;
    map.e0 = {0.0, 1.0};
    for (int k = 1; k <= count; ++k) {
        double b = M_PI * k / (count + 1);
        SpeedSample s;
        s.e = {std::cos(b), std::sin(b)};
        s.c = c_f;
        s.stderr_ = sigma;
        s.outcome = FrontOutcome::converged;
        map.samples.push_back(s);
    }
    return map;
}

PolytopeSpec pair45() { return build_polytope({0, 1}, {{kC, kC}, {-kC, kC}}); }

} // namespace

TEST_CASE("eval_g basics: value, guard, homogeneity") {
    SpeedMap map = homogeneous_override();
    CHECK(eval_g(map, {0.0, 1.0}) == doctest::Approx(c_f));
    CHECK(eval_g(map, {kC, kC}) == doctest::Approx(c_f * std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(eval_g(map, {0.0, 0.0}), ValidationFault);
    CHECK_THROWS_AS(eval_g(map, {1.0, 0.04}), ValidationFault);
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int s = 0; s < 100; ++s) {
        Vec2 x{u(rng), 0.3 + std::abs(u(rng))};
        CHECK(std::abs(eval_g(map, x * 2.0) - eval_g(map, x)) <= 1e-14);
    }
}

TEST_CASE("grad_g matches the analytic homogeneous gradient") {
    SpeedMap map = homogeneous_override();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ang(0.4, M_PI - 0.4);
    for (int s = 0; s < 50; ++s) {
        double b = ang(rng);
        Vec2 e{std::cos(b), std::sin(b)};
        Vec2 grad = grad_g(map, e);
        double dot = e.dot(map.e0);
        Vec2 exact = (e * dot - map.e0) * (c_f / (dot * dot));
        CHECK(std::abs(grad.x - exact.x) <= 1e-4);
        CHECK(std::abs(grad.y - exact.y) <= 1e-4);
        CHECK(std::abs(grad.dot(e)) <= 1e-6 * (1.0 + grad.norm()));
    }
    // 45-degree pair: grad g(e1) . e2 = -sqrt(2) c_f
    Vec2 g1 = grad_g(map, {kC, kC});
    CHECK(g1.dot({-kC, kC}) ==
          doctest::Approx(-std::sqrt(2.0) * c_f).epsilon(0.02));
}

TEST_CASE("grad_g rejects steps at or above twice the sample spacing") {
    SpeedMap map = sampled_map(8, 1e-3);
    CHECK_THROWS_AS(grad_g(map, {0.0, 1.0}, 2.0 * map.angular_spacing()), ConfigFault);
    CHECK_NOTHROW(grad_g(map, {0.0, 1.0}, 1e-3));
}

TEST_CASE("sampled map interpolation and extrapolation fault") {
    SpeedMap map = sampled_map(16, 1e-3);
    CHECK(map.speed_at({0.0, 1.0}) == doctest::Approx(c_f));
    CHECK(map.speed_at({kC, kC}) == doctest::Approx(c_f));
    CHECK_THROWS_AS(map.speed_at({1.0, 1e-4}), ValidationFault);
    CHECK_THROWS_AS(map.speed_at({-1.0, 1e-4}), ValidationFault);
}

TEST_CASE("partial maps refuse evaluation") {
    SpeedMap map = sampled_map(8, 1e-3);
    map.partial = true;
    CHECK_THROWS_AS(map.speed_at({0.0, 1.0}), ValidationFault);
    CHECK_THROWS_AS(check_theorem_conditions(map, pair45(),
                                             TheoremVariant::existence_V),
                    ValidationFault);
}

TEST_CASE("homogeneous 45-degree pair passes the V-variant conditions") {
    SpeedMap map = homogeneous_override();
    ConditionReport rep =
        check_theorem_conditions(map, pair45(), TheoremVariant::existence_V);
    CHECK(rep.cond_i == Verdict::pass);
    CHECK(rep.cond_ii == Verdict::pass);
    CHECK(rep.cond_iii == Verdict::pass);
    CHECK(rep.cond_iv == Verdict::pass);
    CHECK(rep.pass());
    CHECK(rep.chat == doctest::Approx(c_f * std::sqrt(2.0)).epsilon(1e-10));
    CHECK(rep.margin_iii > 0.0);
    // every pair sign strictly negative
    for (const auto& p : rep.pair_signs) CHECK(p.value < 0.0);
}

TEST_CASE("reversed override passes W and fails V at (iii)/(iv)") {
    SpeedMap wmap = bump_override(0.4);
    ConditionReport w =
        check_theorem_conditions(wmap, pair45(), TheoremVariant::existence_W);
    CHECK(w.pass());
    ConditionReport v =
        check_theorem_conditions(wmap, pair45(), TheoremVariant::existence_V);
    CHECK(v.cond_iii == Verdict::fail);
    CHECK(v.cond_iv == Verdict::fail);
    CHECK(!v.pass());
}

TEST_CASE("variant exclusivity on strict-margin instances") {
    for (double beta : {-0.4, -0.2, 0.2, 0.4}) {
        SpeedMap map = bump_override(beta);
        bool v = check_theorem_conditions(map, pair45(), TheoremVariant::existence_V)
                     .pass();
        bool w = check_theorem_conditions(map, pair45(), TheoremVariant::existence_W)
                     .pass();
        CHECK(!(v && w));
    }
    SpeedMap flat = homogeneous_override();
    bool v = check_theorem_conditions(flat, pair45(), TheoremVariant::existence_V).pass();
    bool w = check_theorem_conditions(flat, pair45(), TheoremVariant::existence_W).pass();
    CHECK(!(v && w));
}

TEST_CASE("duplicate facet directions fail condition (i)") {
    PolytopeSpec p = pair45();
    p.facets[1] = p.facets[0]; // force the degenerate set past the builder
    SpeedMap map = homogeneous_override();
    ConditionReport rep =
        check_theorem_conditions(map, p, TheoremVariant::existence_V);
    CHECK(rep.cond_i == Verdict::fail);
}

TEST_CASE("measured-noise maps report indeterminate rather than invent signs") {
    // speeds equal to c_f but with large claimed stderr: the (iv) margins sit
    // inside the noise floor
    SpeedMap map = sampled_map(16, 0.05);
    ConditionReport rep =
        check_theorem_conditions(map, pair45(), TheoremVariant::existence_V);
    CHECK(rep.cond_iv == Verdict::indeterminate);
}

TEST_CASE("refining the sampling moves comparable margins within stderr") {
    SpeedMap coarse = sampled_map(16, 1e-3);
    SpeedMap fine = sampled_map(32, 1e-3);
    ConditionReport a =
        check_theorem_conditions(coarse, pair45(), TheoremVariant::existence_V);
    ConditionReport b =
        check_theorem_conditions(fine, pair45(), TheoremVariant::existence_V);
    // the facet-value deviation and the gradient pair values are measured at
    // fixed points; the cap margin's exclusion radius shrinks with spacing
    // and is reported with its resolution instead
    CHECK(std::abs(a.dev_ii - b.dev_ii) <= coarse.max_stderr());
    REQUIRE(a.pair_signs.size() == b.pair_signs.size());
    for (std::size_t k = 0; k < a.pair_signs.size(); ++k)
        CHECK(std::abs(a.pair_signs[k].value - b.pair_signs[k].value) <=
              coarse.max_stderr() + 1e-9);
    CHECK(b.cap_resolution < a.cap_resolution);
}
