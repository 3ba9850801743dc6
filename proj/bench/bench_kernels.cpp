// Serial-reference vs OpenMP comparison for the heavy kernels.
// Run manually: ./build/bench/bench_kernels

#include <benchmark/benchmark.h>

#include "qkd/algoinfo.hpp"
#include "qkd/analysis.hpp"
#include "qkd/lincode.hpp"
#include "qkd/protocol.hpp"
#include "qkd/qsim.hpp"
#include "qkd/synthetic.hpp"

using namespace qkd;

namespace {

Gf2Matrix bench_generators(int n, int m) {
    Rng rng(4711);
    for (;;) {
        std::vector<BitString> rows;
        for (int r = 0; r < m; ++r) rows.push_back(BitString::random(n, rng));
        Gf2Matrix g(std::move(rows));
        if (g.rank() == m) return g;
    }
}

void min_distance_serial_bench(benchmark::State& state) {
    const Gf2Matrix g = bench_generators(128, int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(min_distance_serial(g));
}

void min_distance_omp_bench(benchmark::State& state) {
    const Gf2Matrix g = bench_generators(128, int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(min_distance(g));
}

void sampling_tail_serial_bench(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(sampling_tail_mc_serial(200, 0.11, 0.1, 20000, 7));
}

void sampling_tail_omp_bench(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sampling_tail_mc(200, 0.11, 0.1, 20000, 7));
}

void perturbation_serial_bench(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(run_perturbation_sweep_serial(200, 2, 16, 11));
}

void perturbation_omp_bench(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(run_perturbation_sweep(200, 2, 16, 11));
}

void counting_serial_bench(benchmark::State& state) {
    Lz78Model model;
    for (auto _ : state) benchmark::DoNotOptimize(counting_check_serial(model, 14, 30));
}

void counting_omp_bench(benchmark::State& state) {
    Lz78Model model;
    for (auto _ : state) benchmark::DoNotOptimize(counting_check(model, 14, 30));
}

void character_sum_serial_bench(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(run_character_sum_sweep_serial(10, 200, 13));
}

void character_sum_omp_bench(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(run_character_sum_sweep(10, 200, 13));
}

void session_batch_serial_bench(benchmark::State& state) {
    ProtocolConfig cfg;
    cfg.n = 1024;
    cfg.p = 0.11;
    cfg.epsilon = 0.01;
    cfg.delta = 0.05;
    cfg.seed = 17;
    cfg.code = construct_code({1024, 8, int(2 * 1024 * 0.12)}, 17);
    for (auto _ : state) {
        KeyPool pool(reconcile_cost(cfg.n, cfg.p) * 100);
        benchmark::DoNotOptimize(
            run_session_batch_serial(cfg, AttackStrategy::none(), pool, 100));
    }
}

void session_batch_omp_bench(benchmark::State& state) {
    ProtocolConfig cfg;
    cfg.n = 1024;
    cfg.p = 0.11;
    cfg.epsilon = 0.01;
    cfg.delta = 0.05;
    cfg.seed = 17;
    cfg.code = construct_code({1024, 8, int(2 * 1024 * 0.12)}, 17);
    for (auto _ : state) {
        KeyPool pool(reconcile_cost(cfg.n, cfg.p) * 100);
        benchmark::DoNotOptimize(run_session_batch(cfg, AttackStrategy::none(), pool, 100));
    }
}

} // namespace

BENCHMARK(min_distance_serial_bench)->Arg(18)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(min_distance_omp_bench)->Arg(18)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(sampling_tail_serial_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(sampling_tail_omp_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(perturbation_serial_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(perturbation_omp_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(counting_serial_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(counting_omp_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(character_sum_serial_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(character_sum_omp_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(session_batch_serial_bench)->Unit(benchmark::kMillisecond);
BENCHMARK(session_batch_omp_bench)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
