#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "rdfront/medium.hpp"
#include "rdfront/snapshot_io.hpp"
#include "rdfront/solver.hpp"

using namespace rdfront;

namespace {

PeriodicMedium cubic(double theta, int dim = 2) {
    return make_cubic_medium([theta](Vec2) { return theta; },
                             [](Vec2) { return identity_mat(); }, {1.0, 1.0}, dim);
}

// Scalar ODE u' = f(u) integrated by RK4; the x-independent oracle.
double ode_endpoint(const PeriodicMedium& m, double u0, double T, double dt) {
    auto f = [&](double u) { return m.reaction({0, 0}, u); };
    double u = u0;
    long n = long(std::ceil(T / dt));
    for (long s = 0; s < n; ++s) {
        double k1 = f(u);
        double k2 = f(u + 0.5 * dt * k1);
        double k3 = f(u + 0.5 * dt * k2);
        double k4 = f(u + dt * k3);
        u += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return u;
}

Grid small_grid() {
    return Grid::make_2d(0, 2, 0.1, 0, 2, 0.1, BC::zero_flux, BC::zero_flux,
                         BC::zero_flux, BC::zero_flux);
}

} // namespace

TEST_CASE("equilibria are exact fixed points") {
    auto m = cubic(0.25);
    SolverConfig cfg;
    for (double level : {0.0, 1.0, 0.25}) { // 0.25 = theta, interior equilibrium
        Field u(small_grid(), level);
        Field next = u;
        Stepper st(m, u.grid, cfg);
        for (int s = 0; s < 50; ++s) st.advance(next);
        for (double v : next.v) CHECK(v == doctest::Approx(level).epsilon(1e-14));
    }
}

TEST_CASE("constant initial data follows the scalar ODE oracle") {
    auto m = cubic(0.25);
    SolverConfig cfg;
    cfg.T = 40.0;
    for (double u0 : {0.9, 0.1}) {
        Field f(small_grid(), u0);
        Trajectory traj = solve_cauchy(m, f, cfg);
        double target = u0 > 0.25 ? 1.0 : 0.0;
        double oracle = ode_endpoint(m, u0, cfg.T, 1e-3);
        double got = traj.snapshots.back().v[40];
        CHECK(std::abs(got - oracle) <= 2e-4);
        CHECK(std::abs(got - target) < 1e-3);
        // final time lands within one step of T
        CHECK(std::abs(traj.snapshots.back().t - cfg.T) <= traj.dt);
    }
}

TEST_CASE("CFL violation is a configuration fault") {
    auto m = cubic(0.25);
    SolverConfig cfg;
    cfg.dt = 1.0; // far above the bound at h = 0.1
    Field u(small_grid(), 0.5);
    CHECK_THROWS_AS(step(m, u, cfg), ConfigFault);
}

TEST_CASE("divergence guard names the offending location") {
    auto m = cubic(0.25);
    SolverConfig cfg;
    cfg.allow_range_override = true;
    Field u(small_grid(), 3.0); // beyond the guard band
    try {
        step(m, u, cfg);
        CHECK(false);
    } catch (const NumericsFault& e) {
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
}

TEST_CASE("initial data outside [0,1] rejected unless overridden") {
    auto m = cubic(0.25);
    SolverConfig cfg;
    cfg.T = 0.01;
    Field u(small_grid(), -0.05);
    CHECK_THROWS_AS(solve_cauchy(m, u, cfg), ValidationFault);
    cfg.allow_range_override = true;
    CHECK_NOTHROW(solve_cauchy(m, u, cfg));
}

TEST_CASE("range [0,1] is invariant") {
    auto m = cubic(0.3);
    SolverConfig cfg;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    Field u(small_grid());
    for (auto& v : u.v) v = uu(rng);
    Stepper st(m, u.grid, cfg);
    for (int s = 0; s < 400; ++s) st.advance(u);
    CHECK(u.min() >= -1e-10);
    CHECK(u.max() <= 1.0 + 1e-10);
}

TEST_CASE("zero-flux faces conserve mass when the reaction vanishes") {
    PeriodicMedium m = cubic(0.25);
    m.cubic_theta.reset();
    m.reaction = [](Vec2, double) { return 0.0; };
    m.reaction_du = [](Vec2, double) { return 0.0; };
    m.max_reaction_slope = 0.0;
    // nonuniform diffusion to exercise the face averaging
    m.diffusion = [](Vec2 p) {
        double a = 1.0 + 0.5 * std::cos(2 * M_PI * p.x) * std::cos(2 * M_PI * p.y);
        return SymMat2{a, 0.0, a};
    };
    m.lambda1 = 0.5;
    m.lambda2 = 1.5;
    SolverConfig cfg;
    Field u(small_grid());
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uu(0.2, 0.8);
    for (auto& v : u.v) v = uu(rng);
    double mass0 = 0.0;
    for (double v : u.v) mass0 += v;
    Stepper st(m, u.grid, cfg);
    for (int s = 0; s < 200; ++s) {
        st.advance(u);
        double mass = 0.0;
        for (double v : u.v) mass += v;
        CHECK(std::abs(mass - mass0) / u.v.size() <= 1e-10);
    }
}

TEST_CASE("residual vanishes on exact equilibria") {
    auto m = cubic(0.25);
    Field a(small_grid(), 1.0, 0.0), b(small_grid(), 1.0, 0.1),
        c(small_grid(), 1.0, 0.2);
    Field res = residual(m, a, b, c);
    for (double v : res.v) CHECK(v == 0.0);
}

TEST_CASE("residual matches the analytic substitution to second order") {
    auto m = cubic(0.25);
    const double c0 = 0.6, t = 0.5;
    auto snap = [&](double tt) {
        Field f(small_grid(), c0 * std::exp(-tt), tt);
        return f;
    };
    for (double dt : {0.02, 0.01}) {
        Field res = residual(m, snap(t - dt), snap(t), snap(t + dt));
        double u = c0 * std::exp(-t);
        double exact = -u - m.reaction({0, 0}, u);
        double worst = 0.0;
        const Grid& g = res.grid;
        for (int j = 1; j + 1 < g.ny(); ++j)
            for (int i = 1; i + 1 < g.nx(); ++i)
                worst = std::max(worst, std::abs(res.at(i, j) - exact));
        CHECK(worst <= u * dt * dt / 5.0);
    }
}

TEST_CASE("residual self-convergence under refinement") {
    auto m = cubic(0.4, 1);
    auto sup_residual = [&](double h) {
        Grid g = Grid::make_1d(0.0, 2.0, h, BC::zero_flux, BC::zero_flux);
        Field u0 = sample_field(g, [](Vec2 p) {
            return 0.5 + 0.3 * std::cos(M_PI * p.x);
        });
        SolverConfig cfg;
        cfg.T = 0.5;
        cfg.snapshot_dt = h; // snapshot spacing tied to h
        Trajectory traj = solve_cauchy(m, u0, cfg);
        // evaluate at the same physical time on every resolution
        std::size_t mid = 1;
        for (std::size_t k = 1; k + 1 < traj.snapshots.size(); ++k)
            if (std::abs(traj.snapshots[k].t - 0.25) <
                std::abs(traj.snapshots[mid].t - 0.25))
                mid = k;
        Field res = residual(m, traj.snapshots[mid - 1], traj.snapshots[mid],
                             traj.snapshots[mid + 1]);
        double worst = 0.0;
        for (int i = 1; i + 1 < g.nx(); ++i)
            worst = std::max(worst, std::abs(res.at(i, 0)));
        return worst;
    };
    double coarse = sup_residual(0.05);
    double fine = sup_residual(0.025);
    CHECK(coarse / fine >= 3.0);
}

TEST_CASE("residual rejects mismatched grids and uneven spacing") {
    auto m = cubic(0.25);
    Field a(small_grid(), 0.5, 0.0), b(small_grid(), 0.5, 0.1), c(small_grid(), 0.5, 0.3);
    CHECK_THROWS_AS(residual(m, a, b, c), ConfigFault);
    Grid other = Grid::make_2d(0, 1, 0.1, 0, 1, 0.1, BC::zero_flux, BC::zero_flux,
                               BC::zero_flux, BC::zero_flux);
    Field d(other, 0.5, 0.2);
    CHECK_THROWS_AS(residual(m, a, b, d), ConfigFault);
}

TEST_CASE("comparison principle: trivial ordered pair stays ordered") {
    auto m = cubic(0.25);
    SolverConfig cfg;
    cfg.T = 2.0;
    Field lo(small_grid(), 0.0), hi(small_grid(), 1.0);
    auto rep = check_comparison(m, lo, hi, cfg);
    CHECK(rep.pass);
    CHECK(rep.min_gap >= 1.0 - 1e-12); // fringes never meet
}

TEST_CASE("comparison principle: random smooth ordered pairs") {
    auto m = cubic(0.3);
    SolverConfig cfg;
    cfg.T = 1.0;
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    Grid g = Grid::make_2d(0, 1, 0.1, 0, 1, 0.1, BC::zero_flux, BC::zero_flux,
                           BC::zero_flux, BC::zero_flux);
    for (int trial = 0; trial < 20; ++trial) {
        double a1 = amp(rng), a2 = amp(rng), p1 = amp(rng), p2 = amp(rng);
        Field lo = sample_field(g, [&](Vec2 p) {
            return 0.3 * (1.0 + a1 * std::cos(2 * M_PI * (p.x + p1)) *
                                    std::cos(2 * M_PI * p.y)) * 0.5;
        });
        Field hi = sample_field(g, [&](Vec2 p) {
            return lo.at(int(std::lround(p.x / 0.1)), int(std::lround(p.y / 0.1))) +
                   0.2 + 0.2 * a2 * std::cos(2 * M_PI * (p.y + p2));
        });
        auto rep = check_comparison(m, lo, hi, cfg);
        CHECK(rep.pass);
    }
}

TEST_CASE("over-large dt breaks the discrete comparison principle") {
    auto m = cubic(0.25);
    SolverConfig cfg;
    cfg.T = 2.0;
    cfg.dt = 8.0 * stable_dt(small_grid(), m, Scheme::explicit_euler);
    cfg.enforce_bounds = false;
    Grid g = small_grid();
    Field lo = sample_field(g, [](Vec2 p) {
        return 0.45 + 0.45 * std::cos(M_PI * p.x) * std::cos(M_PI * p.y);
    });
    Field hi = sample_field(g, [&](Vec2 p) {
        (void)p;
        return 0.0;
    });
    for (std::size_t k = 0; k < hi.v.size(); ++k) hi.v[k] = lo.v[k] + 0.05;
    auto rep = check_comparison(m, lo, hi, cfg);
    CHECK(!rep.pass);
}

TEST_CASE("imex scheme matches explicit on a smooth run") {
    auto m = cubic(0.3);
    Grid g = small_grid();
    Field u0 = sample_field(g, [](Vec2 p) {
        return 0.5 + 0.4 * std::cos(M_PI * p.x / 2.0) * std::cos(M_PI * p.y / 2.0);
    });
    SolverConfig ce;
    ce.T = 0.5;
    Trajectory te = solve_cauchy(m, u0, ce);
    SolverConfig ci;
    ci.T = 0.5;
    ci.scheme = Scheme::imex;
    ci.dt = 0.002;
    Trajectory ti = solve_cauchy(m, u0, ci);
    double worst = 0.0;
    for (std::size_t k = 0; k < u0.v.size(); ++k)
        worst = std::max(worst, std::abs(te.snapshots.back().v[k] -
                                         ti.snapshots.back().v[k]));
    CHECK(worst <= 5e-3);
}

TEST_CASE("clamped faces impose the boundary function") {
    auto m = cubic(0.25);
    Grid g = Grid::make_2d(0, 2, 0.1, 0, 2, 0.1, BC::clamped, BC::clamped,
                           BC::zero_flux, BC::zero_flux);
    SolverConfig cfg;
    cfg.boundary = [](double, Vec2 p) { return p.x < 1.0 ? 1.0 : 0.0; };
    Field u(g, 0.5);
    Stepper st(m, g, cfg);
    st.apply_boundary(u);
    for (int s = 0; s < 10; ++s) st.advance(u);
    for (int j = 0; j < g.ny(); ++j) {
        CHECK(u.at(0, j) == 1.0);
        CHECK(u.at(g.nx() - 1, j) == 0.0);
    }
}

TEST_CASE("snapshot round trip preserves bits and metadata") {
    Grid g = Grid::make_2d(-1, 1, 0.25, 0, 2, 0.5, BC::zero_flux, BC::zero_flux,
                           BC::zero_flux, BC::zero_flux);
    Field u(g, 0.0, 1.25);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    for (auto& v : u.v) v = uu(rng);
    auto path = std::filesystem::temp_directory_path() / "rdfront_snap_test.bin";
    write_snapshot(u, path.string());
    Field back = read_snapshot(path.string());
    REQUIRE(back.grid.same_layout(u.grid));
    CHECK(back.t == u.t);
    for (std::size_t k = 0; k < u.v.size(); ++k) CHECK(back.v[k] == u.v[k]);
    std::filesystem::remove(path);
}
