#include "cmcglue/assembly.hpp"
#include "cmcglue/blocks.hpp"
#include "cmcglue/delaunay.hpp"
#include "cmcglue/jacobi.hpp"
#include "cmcglue/mesh.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace cmcglue;

static void BM_ProfileSolve(benchmark::State& state)
{
    const double tau = std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(DelaunayProfile::solve(tau).quarter_period());
}
BENCHMARK(BM_ProfileSolve)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

static void BM_ProfileState(benchmark::State& state)
{
    const DelaunayProfile p = DelaunayProfile::solve(1e-4);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(p.state(t));
        t += 0.013;
    }
}
BENCHMARK(BM_ProfileState);

static void BM_HErrorField(benchmark::State& state)
{
    EdgeBlockSpec spec;
    spec.tau_domain = spec.tau_target = 1e-6;
    spec.zeta_plus = Vec3(1e-7, 2e-7, 0.0);
    const DelaunayBlock b = DelaunayBlock::edge(spec);
    const int spu = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(h_error_field(b, b.a(), b.a() + 6.0, spu, 32).sup_gluing);
}
BENCHMARK(BM_HErrorField)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_BuildInitialSurface(benchmark::State& state)
{
    const Graph g = tetra_chain(static_cast<int>(state.range(0)));
    const auto [d, z] = random_parameters(g, 1e-3, 1.0, 1.0, 1u);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_initial_surface(g, 1e-3, d, z).elements.size());
}
BENCHMARK(BM_BuildInitialSurface)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_Tessellate(benchmark::State& state)
{
    const InitialSurface s = build_initial_surface(triangle_genus1(), 1e-3, {}, {});
    const int res = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(tessellate(s, res).triangles.size());
}
BENCHMARK(BM_Tessellate)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_SelfIntersection(benchmark::State& state)
{
    const InitialSurface s = build_initial_surface(triangle_genus1(), 1e-3, {}, {});
    const TriangleMesh m = tessellate(s, 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(self_intersection_check(m).count);
    state.counters["triangles"] = static_cast<double>(m.triangles.size());
}
BENCHMARK(BM_SelfIntersection)->Unit(benchmark::kMillisecond);

static void BM_FluxBalance(benchmark::State& state)
{
    const Graph g = star_symmetric(4);
    const auto [d, z] = random_parameters(g, 1e-3, 1.0, 1.0, 5u);
    const InitialSurface s = build_initial_surface(g, 1e-3, d, z);
    for (auto _ : state)
        benchmark::DoNotOptimize(flux_balance_check(s, 0, 32, 128).relative_error);
}
BENCHMARK(BM_FluxBalance)->Unit(benchmark::kMillisecond);

static void BM_LowestEigenvalue(benchmark::State& state)
{
    const TransitionProblem p(std::pow(10.0, -static_cast<double>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(lowest_eigenvalue(p).lambda_min);
}
BENCHMARK(BM_LowestEigenvalue)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_KernelSolutions(benchmark::State& state)
{
    const TransitionProblem p(1e-4);
    for (auto _ : state)
        benchmark::DoNotOptimize(kernel_solutions(p).A1_plus);
}
BENCHMARK(BM_KernelSolutions)->Unit(benchmark::kMillisecond);

static void BM_ApproxKernelStandard(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(approx_kernel_standard(1e-4, 1).count_window);
}
BENCHMARK(BM_ApproxKernelStandard)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
