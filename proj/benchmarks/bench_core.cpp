#include <benchmark/benchmark.h>

#include <cmath>

#include "gridwaves/coefficients.hpp"
#include "gridwaves/mesh.hpp"
#include "gridwaves/rays.hpp"
#include "gridwaves/solver1d.hpp"
#include "gridwaves/wave2d.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

static void BM_Apply1D(benchmark::State& state) {
    using namespace gridwaves;
    const int n = static_cast<int>(state.range(0));
    TransformedGrid1D grid = transform_grid(uniform_grid(n), tan_center_map());
    WaveEquation1D equation(grid, oscillatory_sigma(2.0, 5));
    auto [u0, v0] = gaussian_packet(grid, {0.0, kPi / 2.0, 0.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(equation.apply(u0));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_Apply1D)->RangeMultiplier(4)->Range(250, 16000)->Complexity();

static void BM_Leapfrog1D(benchmark::State& state) {
    using namespace gridwaves;
    const int n = static_cast<int>(state.range(0));
    TransformedGrid1D grid = transform_grid(uniform_grid(n), tan_center_map());
    WaveEquation1D equation(grid, unit_coefficients());
    auto [u0, v0] = gaussian_packet(grid, {0.0, kPi / 2.0, 0.0});
    LeapfrogOptions options;
    options.cfl = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(equation.integrate(u0, v0, 0.1, options));
    }
}
BENCHMARK(BM_Leapfrog1D)->Arg(200)->Arg(800);

static void BM_RayTrace1D(benchmark::State& state) {
    using namespace gridwaves;
    RaySystem1D system =
        make_physical_ray_system(tan_center_map(), unit_coefficients(), Branch::plus);
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_ray(system, 0.3, 7.0 * kPi / 4.0, 5.0, 1e-3));
    }
}
BENCHMARK(BM_RayTrace1D);

static void BM_EquilibriumScan(benchmark::State& state) {
    using namespace gridwaves;
    RaySystem1D system = make_variable_coefficient_ray_system(2.0, 1, Branch::plus);
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_equilibria(system));
    }
}
BENCHMARK(BM_EquilibriumScan);

static void BM_AxisEigendecomposition(benchmark::State& state) {
    using namespace gridwaves;
    const int n = static_cast<int>(state.range(0));
    TransformedGrid1D axis = transform_grid(uniform_grid(n), tan_center_map());
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigendecompose_axis(axis));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_AxisEigendecomposition)->RangeMultiplier(2)->Range(50, 800)->Complexity();

static void BM_SpectralSolve2D(benchmark::State& state) {
    using namespace gridwaves;
    const int n = static_cast<int>(state.range(0));
    Grid2D grid = make_grid_2d(n, n, tan_center_map(), tan_center_map());
    SpectralSolver2D solver(grid);
    ComplexGrid u0 = gaussian_packet_2d(grid, 0.0, 0.5, kPi / 4.0, kPi / 4.0, 18.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.solve(u0, 1.0));
    }
}
BENCHMARK(BM_SpectralSolve2D)->Arg(60)->Arg(120);

static void BM_Leapfrog2DStep(benchmark::State& state) {
    using namespace gridwaves;
    const int n = static_cast<int>(state.range(0));
    Grid2D grid = make_grid_2d(n, n, tan_center_map(), tan_center_map());
    WaveEquation2D equation(grid, unit_coefficients_2d());
    ComplexGrid u0 = gaussian_packet_2d(grid, 0.0, 0.5, kPi / 4.0, kPi / 4.0, 18.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(equation.apply(u0));
    }
    state.SetComplexityN(static_cast<int64_t>(n) * n);
}
BENCHMARK(BM_Leapfrog2DStep)->RangeMultiplier(2)->Range(30, 240)->Complexity();

}  // namespace

BENCHMARK_MAIN();
