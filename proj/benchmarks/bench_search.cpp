#include <benchmark/benchmark.h>

#include <random>

#include <simm/oracle.hpp>
#include <simm/search.hpp>

using namespace simm;

// Full search on a synthetic pencil with 12 eigenvalues in the unit box.
static void BM_SimM(benchmark::State& state)
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> re(0.0, 1.0), im(-0.5, 0.5);
    std::vector<Complex> spectrum;
    for (int k = 0; k < 12; ++k)
        spectrum.emplace_back(re(gen), im(gen));
    oracle::SynthOptions o;
    o.similarity = true;
    const auto sp = oracle::synth_pencil(spectrum, state.range(0), 6, o);

    SearchConfig c;
    c.region  = Region{0.0, 1.0, -0.5, 0.5};
    c.threads = static_cast<int>(state.range(1));
    std::size_t records = 0, shifts = 0;
    for (auto _ : state)
    {
        const SearchResult r = sim_m(sp.pencil, c);
        records              = r.records.size();
        shifts               = r.stats.num_shifts;
    }
    state.counters["records"] = static_cast<double>(records);
    state.counters["shifts"]  = static_cast<double>(shifts);
}
BENCHMARK(BM_SimM)->Args({200, 0})->Args({2000, 0})->Args({2000, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
