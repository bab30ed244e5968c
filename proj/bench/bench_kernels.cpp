// Serial reference vs OpenMP kernels. Thread counts above the core count
// only measure scheduling overhead.
#include "lepage/kernels.hpp"
#include "lepage/processes.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace lepage;

namespace {

SlicedProjections pooled(std::size_t n, std::size_t k) {
    RandomStream s(1);
    std::vector<double> rows(2 * n * k);
    for (auto& v : rows) v = s.normal();
    std::vector<std::vector<double>> dirs;
    for (std::size_t d = 0; d < k + 8; ++d) {
        std::vector<double> u(k);
        for (auto& v : u) v = s.normal();
        dirs.push_back(u);
    }
    return SlicedProjections::build(rows, k, n, dirs);
}

void permutations_serial(benchmark::State& st) {
    const auto sp = pooled(static_cast<std::size_t>(st.range(0)), 3);
    for (auto _ : st) benchmark::DoNotOptimize(permutation_statistics_serial(sp, 99, RandomStream(2)));
    st.SetItemsProcessed(st.iterations() * 99);
}

void permutations_parallel(benchmark::State& st) {
    const auto sp = pooled(static_cast<std::size_t>(st.range(0)), 3);
    const int threads = static_cast<int>(st.range(1));
    for (auto _ : st) benchmark::DoNotOptimize(permutation_statistics_parallel(sp, 99, RandomStream(2), threads));
    st.SetItemsProcessed(st.iterations() * 99);
}

void batch(benchmark::State& st) {
    const auto p = lepage_process(EpsilonSpec::jump_at_eta(ScalarLaw::uniform(0.5, 2.0)));
    const std::vector<double> grid = {0.5, 1.0, 2.0, 4.0};
    const int threads = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(sample_batch(p, grid, 2000, RandomStream(3), threads));
    st.SetItemsProcessed(st.iterations() * 2000);
}

}  // namespace

BENCHMARK(permutations_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(permutations_parallel)->Args({1000, 2})->Args({10000, 2})->Args({10000, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(batch)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
