#include "ckelab/energies.hpp"
#include "ckelab/geodesics.hpp"
#include "ckelab/ma_solver.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace ckelab;

namespace {

const RadialGrid& grid_of(int n) {
    static std::map<int, RadialGrid> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, RadialGrid::make(n)).first;
    return it->second;
}

void BM_calabi_yau_quadrature(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const RadialGrid& g = grid_of(n);
    const BackgroundGeometry bg = BackgroundGeometry::make(g);
    const SmoothVolumeForm svf = smooth_volume_form(0.5, 1e-3, g);
    for (auto _ : state) {
        CalabiYauProblem prob;
        prob.rhs = svf.density;
        benchmark::DoNotOptimize(solve_calabi_yau(g, bg, prob));
    }
}
BENCHMARK(BM_calabi_yau_quadrature)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_continuity_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const RadialGrid& g = grid_of(n);
    const BackgroundGeometry bg = BackgroundGeometry::make(g);
    SmoothVolumeForm svf = smooth_volume_form(0.5, 0.1, g);
    CalabiYauProblem prob;
    prob.rhs = std::move(svf.density);
    const CalabiYauResult cy = solve_calabi_yau(g, bg, prob);
    ConeParameters params;
    params.beta = 0.5;
    params.beta0 = 0.5;
    params.epsilon = 0.1;
    const RicciStageResult sk = solve_ricci_stage(g, bg, cy.profile, params);
    const FluxOperator op(g);
    NewtonConfig ncfg;
    TwistedProblem tp;
    tp.t = 0.25;
    tp.beta = 0.5;
    tp.epsilon = 0.1;
    tp.reference = &sk.phi_normalized;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_continuity_step(g, bg, tp, sk.psi, op, ncfg));
}
BENCHMARK(BM_continuity_step)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_k_energy(benchmark::State& state) {
    const RadialGrid& g = grid_of(2048);
    const BackgroundGeometry bg = BackgroundGeometry::make(g);
    const auto fields = random_potential_family(1, 0.6, 3);
    const PotentialProfile p = make_potential(g, bg, fields[0], Normalization::None);
    for (auto _ : state) benchmark::DoNotOptimize(k_energy_path(p));
}
BENCHMARK(BM_k_energy)->Unit(benchmark::kMillisecond);

void BM_dijkstra_pass(benchmark::State& state) {
    const int rings = static_cast<int>(state.range(0));
    const RadialGrid& g = grid_of(2048);
    const BackgroundGeometry bg = BackgroundGeometry::make(g);
    const MetricProfile m = metric_of(g, football_potential(0.5, g).normalized_profile(g, bg));
    ThetaProfile theta(g, m);
    GeodesicGraphConfig cfg;
    cfg.rings = rings;
    cfg.sectors = rings;
    cfg.stencil = 3;
    const GeodesicGraph graph(theta, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(graph.dijkstra(graph.pole(0)));
}
BENCHMARK(BM_dijkstra_pass)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
