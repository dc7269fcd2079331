#include <benchmark/benchmark.h>

#include <cmath>

#include "rdfront/fronts.hpp"
#include "rdfront/geometry.hpp"

using namespace rdfront;

namespace {

const double kC = std::sqrt(2.0) / 2.0;

PolytopeSpec make_poly(int facets) {
    std::vector<double> degrees;
    for (int k = 0; k < facets; ++k)
        degrees.push_back(30.0 + 120.0 * k / std::max(1, facets - 1));
    return build_polytope_from_angles({0, 1}, degrees);
}

} // namespace

static void BM_SurfaceHeight(benchmark::State& state) {
    PolytopeSpec poly = make_poly(int(state.range(0)));
    double x = -12.0;
    for (auto _ : state) {
        SurfaceEval ev = surface_height(poly, x, 0.2);
        benchmark::DoNotOptimize(ev.phi);
        x += 0.37;
        if (x > 12.0) x = -12.0;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SurfaceHeight)->Arg(2)->Arg(4)->Arg(8);

static void BM_CurvedBound(benchmark::State& state) {
    PeriodicMedium med = make_cubic_medium([](Vec2) { return 0.25; },
                                           [](Vec2) { return identity_mat(); },
                                           {1.0, 1.0}, 2);
    PolytopeSpec poly = build_polytope({0, 1}, {{kC, kC}, {-kC, kC}});
    SpeedMap map = override_speed_map({0, 1}, [](Vec2) { return 0.3535533905932738; });
    PulsatingFront seed;
    seed.direction = {kC, kC};
    seed.speed = 0.3535533905932738;
    seed.outcome = FrontOutcome::converged;
    FrontAssembly A =
        FrontAssembly::build(med, poly, map, {seed}, FrontVariant::V_family);
    A.set_eps_alpha(0.02, 0.2);
    double x = -15.0, y = 0.0;
    for (auto _ : state) {
        double v = A.curved_bound(0.0, {x, y}, BoundFamily::super_V);
        benchmark::DoNotOptimize(v);
        x += 0.41;
        y += 0.29;
        if (x > 15.0) x = -15.0;
        if (y > 20.0) y = -5.0;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CurvedBound);

BENCHMARK_MAIN();
