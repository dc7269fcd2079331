#include <benchmark/benchmark.h>

#include <cmath>

#include "rdfront/medium.hpp"
#include "rdfront/solver.hpp"

using namespace rdfront;

namespace {

PeriodicMedium bench_medium() {
    return make_cubic_medium([](Vec2 p) { return 0.3 + 0.1 * std::sin(2 * M_PI * p.x); },
                             [](Vec2) { return identity_mat(); }, {1.0, 1.0}, 2);
}

} // namespace

static void BM_ExplicitStep(benchmark::State& state) {
    const int n = int(state.range(0));
    PeriodicMedium m = bench_medium();
    Grid g = Grid::make_2d(0, n * 0.1, 0.1, 0, n * 0.1, 0.1, BC::zero_flux,
                           BC::zero_flux, BC::zero_flux, BC::zero_flux);
    Field u = sample_field(g, [](Vec2 p) {
        return 1.0 / (1.0 + std::exp((p.x + p.y - 5.0) / std::sqrt(2.0)));
    });
    SolverConfig cfg;
    Stepper st(m, g, cfg);
    for (auto _ : state) {
        st.advance(u);
        benchmark::DoNotOptimize(u.v.data());
    }
    state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_ExplicitStep)->Arg(128)->Arg(256)->Arg(512);

static void BM_ImexStep(benchmark::State& state) {
    const int n = int(state.range(0));
    PeriodicMedium m = bench_medium();
    Grid g = Grid::make_2d(0, n * 0.1, 0.1, 0, n * 0.1, 0.1, BC::zero_flux,
                           BC::zero_flux, BC::zero_flux, BC::zero_flux);
    Field u = sample_field(g, [](Vec2 p) {
        return 1.0 / (1.0 + std::exp((p.x + p.y - 5.0) / std::sqrt(2.0)));
    });
    SolverConfig cfg;
    cfg.scheme = Scheme::imex;
    cfg.dt = 0.05;
    Stepper st(m, g, cfg);
    for (auto _ : state) {
        st.advance(u);
        benchmark::DoNotOptimize(u.v.data());
    }
    state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_ImexStep)->Arg(128)->Arg(256);

static void BM_Residual(benchmark::State& state) {
    PeriodicMedium m = bench_medium();
    Grid g = Grid::make_2d(0, 25.6, 0.1, 0, 25.6, 0.1, BC::zero_flux, BC::zero_flux,
                           BC::zero_flux, BC::zero_flux);
    auto snap = [&](double t) {
        return sample_field(g, [t](Vec2 p) {
            return 1.0 / (1.0 + std::exp((p.x - 0.35 * t - 8.0) / std::sqrt(2.0)));
        }, t);
    };
    Field a = snap(0.0), b = snap(0.01), c = snap(0.02);
    for (auto _ : state) {
        Field r = residual(m, a, b, c);
        benchmark::DoNotOptimize(r.v.data());
    }
    state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_Residual);
