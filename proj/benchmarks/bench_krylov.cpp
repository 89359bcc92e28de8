#include <benchmark/benchmark.h>

#include <random>

#include <simm/contour.hpp>
#include <simm/krylov.hpp>
#include <simm/oracle.hpp>
#include <simm/search.hpp>

using namespace simm;

namespace
{

MatrixPencil test_pencil(Index n)
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> spectrum;
    for (int k = 0; k < 12; ++k)
        spectrum.emplace_back(u(gen), u(gen));
    return oracle::synth_pencil(spectrum, n, 12).pencil;
}

} // namespace

static void BM_Factorize(benchmark::State& state)
{
    const MatrixPencil p = test_pencil(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(ShiftedOperator(p, Complex(0.1, 0.2)));
}
BENCHMARK(BM_Factorize)->Arg(200)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_BuildShift(benchmark::State& state)
{
    const MatrixPencil p = test_pencil(state.range(0));
    const ShiftedOperator op(p, Complex(0.1, 0.2));
    const Vector f = random_vector(p.size(), 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_shift(op, f, static_cast<int>(state.range(1)), false));
}
BENCHMARK(BM_BuildShift)->Args({1000, 30})->Args({1000, 50})->Args({4000, 50})
    ->Unit(benchmark::kMillisecond);

static void BM_ResidualEstimate(benchmark::State& state)
{
    const MatrixPencil p = test_pencil(500);
    const ShiftData sd   = build_shift(p, Complex(0.1, 0.2), random_vector(p.size(), 1),
                                       static_cast<int>(state.range(0)), false);
    const Complex z(0.15, 0.25);
    for (auto _ : state)
        benchmark::DoNotOptimize(residual_estimate(sd, z));
}
BENCHMARK(BM_ResidualEstimate)->Arg(30)->Arg(50)->Arg(100);

static void BM_ReducedSolve(benchmark::State& state)
{
    const MatrixPencil p = test_pencil(500);
    ShiftData sd = build_shift(p, Complex(0.1, 0.2), random_vector(p.size(), 1), 50, false);
    sd.slow_path = state.range(0) != 0;
    const Complex z(0.15, 0.25);
    for (auto _ : state)
        benchmark::DoNotOptimize(reduced_solve(sd, z));
    state.SetLabel(sd.slow_path ? "direct" : "eigen-coordinates");
}
BENCHMARK(BM_ReducedSolve)->Arg(0)->Arg(1);

static void BM_IndicatorRatio(benchmark::State& state)
{
    const MatrixPencil p = test_pencil(500);
    const ShiftData sd   = build_shift(p, Complex(0.1, 0.2), random_vector(p.size(), 1), 50, false);
    const QuadratureSet q = quadrature(Square{Complex(0.12, 0.21), 0.01}, 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(indicator_ratio(sd, q));
}
BENCHMARK(BM_IndicatorRatio);

BENCHMARK_MAIN();
