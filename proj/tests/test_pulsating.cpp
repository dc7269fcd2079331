#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rdfront/medium.hpp"
#include "rdfront/pulsating.hpp"

using namespace rdfront;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PeriodicMedium cubic1d(double theta) {
    return make_cubic_medium([theta](Vec2) { return theta; },
                             [](Vec2) { return identity_mat(); }, {1.0, 1.0}, 1);
}

double logistic_profile(double xi) { return 1.0 / (1.0 + std::exp(xi * kInvSqrt2)); }

// Synthetic trajectory: a profile translating at exactly the given speed.
Trajectory translated_profile(double c, int snapshots) {
    Grid g = Grid::make_1d(0.0, 40.0, 0.05, BC::zero_flux, BC::zero_flux);
    Trajectory traj;
    for (int k = 0; k < snapshots; ++k) {
        double t = 0.5 * k;
        traj.snapshots.push_back(sample_field(
            g, [&](Vec2 p) { return logistic_profile(p.x - 10.0 - c * t); }, t));
    }
    return traj;
}

// Dense synthetic table straight from a closed form.
ProfileTable logistic_table(double xi_lo, double xi_hi, double dxi,
                            double rate = kInvSqrt2) {
    ProfileTable tab;
    tab.xi0 = xi_lo;
    tab.dxi = dxi;
    tab.n_xi = int(std::lround((xi_hi - xi_lo) / dxi)) + 1;
    tab.dim = 1;
    tab.periods = {1.0, 1.0};
    tab.cell_h = {1.0, 0.0};
    tab.U.resize(tab.n_xi);
    for (int k = 0; k < tab.n_xi; ++k)
        tab.U[k] = 1.0 / (1.0 + std::exp((tab.xi0 + k * dxi) * rate));
    return tab;
}

} // namespace

TEST_CASE("measure_speed recovers an injected translation speed") {
    Trajectory traj = translated_profile(0.3, 40);
    SpeedFit fit = measure_speed(traj, {1.0, 0.0});
    CHECK(std::abs(fit.c - 0.3) <= 1e-4);
    CHECK(fit.stderr_ <= 1e-4);
}

TEST_CASE("measure_speed preconditions and truncation fault") {
    Trajectory traj = translated_profile(0.3, 5);
    CHECK_THROWS_AS(measure_speed(traj, {1.0, 0.0}), ValidationFault);
    // level set pushed out of the box
    Trajectory gone = translated_profile(0.3, 12);
    for (auto& f : gone.snapshots)
        for (auto& v : f.v) v = 1.0;
    CHECK_THROWS_AS(measure_speed(gone, {1.0, 0.0}), NumericsFault);
}

TEST_CASE("homogeneous cubic front: speed, profile, decay, interior bounds") {
    auto m = cubic1d(0.25);
    FrontRunConfig cfg;
    cfg.h = 0.05;
    cfg.strip_length = 70.0;
    cfg.T_max = 120.0;
    PulsatingFront f = compute_front(m, {1.0, 0.0}, cfg);
    REQUIRE(f.outcome == FrontOutcome::converged);

    const double c_exact = 0.5 * std::sqrt(2.0) * 0.5; // (1-2*0.25)/sqrt(2)
    CHECK(std::abs(f.speed - c_exact) <= 0.02 * c_exact);

    REQUIRE(f.has_profile());
    // profile matches the closed form up to a shift; fit the shift at U=1/2
    const ProfileTable& tab = f.table;
    double s_mid = 0.0;
    for (int k = 0; k + 1 < tab.n_xi; ++k)
        if (tab.U[k] >= 0.5 && tab.U[k + 1] < 0.5) {
            double w = (tab.U[k] - 0.5) / (tab.U[k] - tab.U[k + 1]);
            s_mid = tab.xi(k) + w * tab.dxi;
        }
    double sup_err = 0.0;
    for (int k = 0; k < tab.n_xi; ++k)
        sup_err = std::max(sup_err,
                           std::abs(tab.U[k] - logistic_profile(tab.xi(k) - s_mid)));
    CHECK(sup_err <= 0.01);

    // normalization integral equals 1 on the shifted table
    CHECK(std::abs(f.norm_value - 1.0) <= 1e-6);

    // monotone table
    for (int k = 0; k + 1 < tab.n_xi; ++k) CHECK(tab.U[k + 1] <= tab.U[k] + 1e-12);

    // decay rate of |dU/dxi| is 1/sqrt(2) within 10%
    CHECK(f.decay_ok);
    CHECK(std::abs(f.decay_mu - kInvSqrt2) <= 0.1 * kInvSqrt2);

    // interior bounds on |xi| <= 2 of the normalized table: the closed-form
    // minimum sits at the window end farther from the (shifted) midpoint
    double r_exact = std::min(
        logistic_profile(-2.0 - s_mid) * (1 - logistic_profile(-2.0 - s_mid)),
        logistic_profile(2.0 - s_mid) * (1 - logistic_profile(2.0 - s_mid))) *
        kInvSqrt2;
    CHECK(f.interior_r == doctest::Approx(r_exact).epsilon(0.1));
    CHECK(f.delta > 0.0);
}

TEST_CASE("balanced cubic is near-stationary") {
    auto m = cubic1d(0.5);
    FrontRunConfig cfg;
    cfg.h = 0.05;
    cfg.strip_length = 40.0;
    cfg.T_max = 40.0;
    PulsatingFront f = compute_front(m, {1.0, 0.0}, cfg);
    CHECK(f.outcome == FrontOutcome::near_stationary);
    CHECK(std::abs(f.speed) <= 1e-2);
}

TEST_CASE("too-short horizon reports no front, not a guess") {
    auto m = cubic1d(0.25);
    FrontRunConfig cfg;
    cfg.h = 0.05;
    cfg.strip_length = 40.0;
    cfg.T_max = 2.0;
    PulsatingFront f = compute_front(m, {1.0, 0.0}, cfg);
    CHECK(f.outcome == FrontOutcome::no_front);
}

TEST_CASE("striped medium: speed between the frozen-theta envelopes") {
    auto striped = make_preset_medium("cubic-striped", 0.3, 0.05, 1.0, {1.0, 1.0}, 1);
    FrontRunConfig cfg;
    cfg.h = 0.05;
    cfg.strip_length = 70.0;
    cfg.T_max = 160.0;
    PulsatingFront f = compute_front(striped, {1.0, 0.0}, cfg);
    REQUIRE(f.outcome == FrontOutcome::converged);
    double c_lo = (1.0 - 2.0 * 0.35) / std::sqrt(2.0); // slowest frozen theta
    double c_hi = (1.0 - 2.0 * 0.25) / std::sqrt(2.0); // fastest frozen theta
    CHECK(f.speed > c_lo - 0.01);
    CHECK(f.speed < c_hi + 0.01);
    REQUIRE(f.has_profile());
    CHECK(f.table.cells[0] > 1); // cell-resolved profile
}

TEST_CASE("speed sign matches the sign of the H1 integral") {
    FrontRunConfig cfg;
    cfg.h = 0.05;
    cfg.strip_length = 60.0;
    cfg.T_max = 120.0;
    cfg.want_profile = false;
    auto fast = compute_front(cubic1d(0.3), {1.0, 0.0}, cfg);
    auto slow = compute_front(cubic1d(0.7), {1.0, 0.0}, cfg);
    REQUIRE(fast.outcome == FrontOutcome::converged);
    REQUIRE(slow.outcome == FrontOutcome::converged);
    CHECK(fast.speed > 0.0);
    CHECK(slow.speed < 0.0);
}

TEST_CASE("shift equivariance: translated start changes s, not c") {
    auto m = make_preset_medium("cubic-striped", 0.3, 0.05, 1.0, {1.0, 1.0}, 1);
    // run twice with the initial interface shifted by one whole period; the
    // measured speeds agree within their standard errors
    FrontRunConfig cfg;
    cfg.h = 0.05;
    cfg.strip_length = 64.0;
    cfg.T_max = 140.0;
    cfg.want_profile = false;
    PulsatingFront a = compute_front(m, {1.0, 0.0}, cfg);
    cfg.strip_length = 66.0; // lattice-aligned shift of the whole window
    PulsatingFront b = compute_front(m, {1.0, 0.0}, cfg);
    REQUIRE(a.outcome == FrontOutcome::converged);
    REQUIRE(b.outcome == FrontOutcome::converged);
    CHECK(std::abs(a.speed - b.speed) <=
          3.0 * (a.speed_stderr + b.speed_stderr) + 2e-4);
}

TEST_CASE("normalize_shift against an independent quadrature oracle") {
    // oracle: Simpson quadrature of the closed form plus bisection on s
    auto mass = [&](double s) {
        const int n = 4000;
        const double hi = 60.0;
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) {
            double xi = hi * k / n;
            double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            double u = logistic_profile(xi + s);
            acc += w * u * u;
        }
        return acc * hi / (3.0 * n);
    };
    double lo = -10, hi = 10;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (mass(mid) > 1.0 ? lo : hi) = mid;
    }
    double s_oracle = 0.5 * (lo + hi);

    PulsatingFront f;
    f.table = logistic_table(-30.0, 30.0, 0.02);
    f.outcome = FrontOutcome::converged;
    PulsatingFront g = normalize_shift(std::move(f));
    CHECK(std::abs(g.shift - s_oracle) <= 1e-4);

    // idempotence: a second call shifts by nothing
    double first = g.shift;
    PulsatingFront h = normalize_shift(std::move(g));
    CHECK(std::abs(h.shift - first) <= 1e-8);

    // doubling the cell measure moves the shift right
    PulsatingFront wide;
    wide.table = logistic_table(-30.0, 30.0, 0.02);
    wide.table.periods.x = 2.0;
    PulsatingFront wn = normalize_shift(std::move(wide));
    CHECK(wn.shift > s_oracle);
}

TEST_CASE("normalize_shift faults on unresolved tails") {
    PulsatingFront f;
    f.table = logistic_table(-3.0, 3.0, 0.02); // tails only ~0.1 resolved
    CHECK_THROWS_AS(normalize_shift(std::move(f)), NumericsFault);
}

TEST_CASE("estimate_decay on constructed tails") {
    PulsatingFront f;
    f.table = logistic_table(-12.0, 12.0, 0.01, 2.0); // |U'| ~ e^{-2|xi|}
    estimate_decay(f);
    CHECK(f.decay_ok);
    CHECK(std::abs(f.decay_mu - 2.0) <= 0.05 * 2.0);

    PulsatingFront g;
    g.table = logistic_table(-1.5, 1.5, 0.01); // tail unresolved
    estimate_decay(g);
    CHECK(!g.decay_ok);
}

TEST_CASE("interior_bounds windows and faults") {
    PulsatingFront f;
    f.table = logistic_table(-15.0, 15.0, 0.01);
    interior_bounds(f, 2.0);
    double r_exact = logistic_profile(2.0) * (1.0 - logistic_profile(2.0)) * kInvSqrt2;
    CHECK(f.interior_r == doctest::Approx(r_exact).epsilon(2e-3));
    CHECK(f.delta == doctest::Approx(logistic_profile(2.0)).epsilon(2e-3));

    interior_bounds(f, 0.0); // degenerate window: the node at xi = 0
    CHECK(f.interior_r == doctest::Approx(0.25 * kInvSqrt2).epsilon(1e-2));

    CHECK_THROWS_AS(interior_bounds(f, 50.0), ValidationFault);

    // non-monotone data is a monotonicity fault
    PulsatingFront bad;
    bad.table = logistic_table(-15.0, 15.0, 0.01);
    for (int k = 0; k < bad.table.n_xi; ++k) bad.table.U[k] = 0.5;
    CHECK_THROWS_AS(interior_bounds(bad, 1.0), NumericsFault);
}

TEST_CASE("extract_profile bins modulo the period") {
    auto m = cubic1d(0.25);
    Trajectory traj = translated_profile(0.35, 30);
    ProfileTable tab = extract_profile(m, traj, {1.0, 0.0}, 0.35);
    // homogeneous medium collapses the cell dimension entirely
    CHECK(tab.cells[0] == 1);
    // values still agree with the generator profile
    double worst = 0.0;
    for (int k = 0; k < tab.n_xi; ++k)
        worst = std::max(worst,
                         std::abs(tab.U[k] - logistic_profile(tab.xi(k) + 10.0)));
    CHECK(worst <= 2e-3);
}

TEST_CASE("extract_profile enforces the stderr precondition") {
    auto m = cubic1d(0.25);
    Trajectory traj = translated_profile(0.35, 30);
    CHECK_THROWS_AS(extract_profile(m, traj, {1.0, 0.0}, 0.35, 0.01),
                    ValidationFault);
}

TEST_CASE("lattice commensurability") {
    auto m2 = make_preset_medium("cubic-homogeneous", 0.25, 0.0, 1.0, {1.0, 1.0}, 2);
    CHECK(lattice_commensurate(m2, {1.0, 0.0}));
    CHECK(lattice_commensurate(m2, {0.0, 1.0}));
    Vec2 diag{1.0, 1.0};
    CHECK(lattice_commensurate(m2, diag.normalized()));
    Vec2 odd{1.0, M_PI};
    CHECK(!lattice_commensurate(m2, odd.normalized()));
}
