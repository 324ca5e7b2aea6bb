// Parallel kernels against their serial references. Run with --benchmark_filter to pick
// a pair; OMP_NUM_THREADS controls the worker count of the parallel side.
#include <benchmark/benchmark.h>

#include <vector>

#include "chargefcs/coupled.hpp"
#include "chargefcs/magnon.hpp"
#include "chargefcs/quantum.hpp"
#include "chargefcs/sep.hpp"

using namespace chargefcs;

namespace {

sep::SepRunConfig sep_config(int L) {
    sep::SepRunConfig c;
    c.params.L = L;
    c.params.t = 100;
    c.params.mu = ChemicalPotential(0.0);
    c.n_samples = 20000;
    return c;
}

void BM_SepPacked(benchmark::State& state) {
    const auto cfg = sep_config(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sep::run_sep_fcs(cfg));
    state.SetItemsProcessed(state.iterations() * std::int64_t(cfg.n_samples));
}

void BM_SepReference(benchmark::State& state) {
    const auto cfg = sep_config(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sep::run_sep_fcs_reference(cfg));
    state.SetItemsProcessed(state.iterations() * std::int64_t(cfg.n_samples));
}

ModelParams coupled_params(int n) {
    ModelParams p;
    p.n_chains = n;
    p.L = 64;
    p.t = 50;
    p.d = 1.5;
    p.mu = ChemicalPotential(0.1);
    return p;
}

void BM_CoupledParallel(benchmark::State& state) {
    const auto p = coupled_params(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(coupled::coupled_mc_run(p, 5000));
    state.SetItemsProcessed(state.iterations() * 5000);
}

void BM_CoupledReference(benchmark::State& state) {
    const auto p = coupled_params(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(coupled::coupled_mc_run_reference(p, 5000));
    state.SetItemsProcessed(state.iterations() * 5000);
}

void BM_MagnonLayerParallel(benchmark::State& state) {
    const int L = int(state.range(0));
    std::vector<double> v(std::size_t(L) * L, 1.0);
    for (auto _ : state) {
        magnon::layer_apply_two_magnon(v, L, Parity::even, 0.05);
        magnon::layer_apply_two_magnon(v, L, Parity::odd, 0.05);
        benchmark::ClobberMemory();
    }
    state.SetBytesProcessed(state.iterations() * std::int64_t(v.size() * sizeof(double)) * 2);
}

void BM_MagnonLayerReference(benchmark::State& state) {
    const int L = int(state.range(0));
    std::vector<double> v(std::size_t(L) * L, 1.0);
    for (auto _ : state) {
        magnon::layer_apply_two_magnon_reference(v, L, Parity::even, 0.05);
        magnon::layer_apply_two_magnon_reference(v, L, Parity::odd, 0.05);
        benchmark::ClobberMemory();
    }
    state.SetBytesProcessed(state.iterations() * std::int64_t(v.size() * sizeof(double)) * 2);
}

void BM_QuantumSector(benchmark::State& state) {
    const int L = int(state.range(0));
    const quantum::Circuit c(L, 8, 1, 0);
    const std::vector<double> lambdas{-1.0, -0.5, 0.5, 1.0};
    const int times[] = {8};
    for (auto _ : state) benchmark::DoNotOptimize(quantum::cgf_pure(c, lambdas, times));
}

void BM_QuantumReference(benchmark::State& state) {
    const int L = int(state.range(0));
    const quantum::Circuit c(L, 8, 1, 0);
    const std::vector<double> lambdas{-1.0, -0.5, 0.5, 1.0};
    const int times[] = {8};
    for (auto _ : state) benchmark::DoNotOptimize(quantum::cgf_pure_reference(c, lambdas, times));
}

}  // namespace

BENCHMARK(BM_SepPacked)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SepReference)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CoupledParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CoupledReference)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MagnonLayerParallel)->Arg(160)->Arg(400)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_MagnonLayerReference)->Arg(160)->Arg(400)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_QuantumSector)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_QuantumReference)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
