// bench.cpp — Serial vs OpenMP timings for the data-parallel kernels

#include "fermidyn/generators.hpp"
#include "fermidyn/kernels.hpp"
#include "fermidyn/run.hpp"
#include "fermidyn/scenario.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace fermidyn;

namespace {

Execution mode(const benchmark::State& state) {
    return state.range(0) ? Execution::parallel : Execution::serial;
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) ? "openmp x" + std::to_string(worker_count()) : "serial");
}

std::vector<double> grid(int n, double half_width) {
    std::vector<double> w;
    for (int k = 0; k < n; ++k) {
        w.push_back(-half_width + 2.0 * half_width * k / (n - 1));
    }
    return w;
}

void BM_RedfieldTable(benchmark::State& state) {
    const BathModel bath = make_bath(0.01, 50.0, 0.5);
    const std::vector<double> w = grid(32, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(redfield_table(w, bath, true, mode(state)));
    }
    label(state);
}

void BM_KroneckerSuperoperator(benchmark::State& state) {
    const Scenario b = builtin_benzene(MasterEquation::redfield);
    const GeneratorSpec spec = build_generator(b, Execution::serial);
    const Matrix h = b.hamiltonian.matrix();
    for (auto _ : state) {
        benchmark::DoNotOptimize(superoperator_matrix(h, spec, mode(state)));
    }
    label(state);
}

void BM_SpectralGrid(benchmark::State& state) {
    const std::vector<double> w = grid(41, 0.6);
    const std::vector<double> t = {10.0, 50.0, 300.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_grid(w, t, 0.01, true, 24, mode(state)));
    }
    label(state);
}

void BM_TemperatureSweep(benchmark::State& state) {
    std::vector<Scenario> runs;
    for (double t : {10.0, 50.0, 100.0, 300.0}) {
        Scenario s = builtin_three_level(MasterEquation::universal);
        s.temperature = t;
        s.schedule.t_end = 2000.0;
        s.schedule.copropagate_hole = false;
        runs.push_back(std::move(s));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep(runs, mode(state)));
    }
    label(state);
}

}  // namespace

BENCHMARK(BM_RedfieldTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KroneckerSuperoperator)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectralGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TemperatureSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
