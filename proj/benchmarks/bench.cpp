#include <benchmark/benchmark.h>

#include "qsc/agents.hpp"
#include "qsc/env.hpp"
#include "qsc/net.hpp"
#include "qsc/quantum.hpp"
#include "qsc/rng.hpp"

using namespace qsc;

static void BM_PauliExponential(benchmark::State& state) {
    Rng rng(1);
    double ax = rng.uniform(-3.0, 3.0), ay = rng.uniform(-3.0, 3.0), az = rng.uniform(-3.0, 3.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantum::pauli_exponential(ax, ay, az));
    }
}
BENCHMARK(BM_PauliExponential);

static void BM_ApplyControl(benchmark::State& state) {
    const auto controls = quantum::build_control_set();
    quantum::PureState s = quantum::bloch_to_state({0.3, 1.1});
    int a = 0;
    for (auto _ : state) {
        s = quantum::apply(controls[a], s);
        a = (a + 1) % 3;
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_ApplyControl);

static void BM_FidelityDensity(benchmark::State& state) {
    const quantum::DensityMatrix rho = quantum::projector(quantum::bloch_to_state({0.4, 0.9}));
    const quantum::DensityMatrix sigma = quantum::projector(quantum::bloch_to_state({2.1, 5.0}));
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantum::fidelity_density(rho, sigma));
    }
}
BENCHMARK(BM_FidelityDensity);

static void BM_EnvStep(benchmark::State& state) {
    env::Environment e(env::default_config());
    e.reset();
    int a = 0;
    for (auto _ : state) {
        if (e.done()) e.reset();
        benchmark::DoNotOptimize(e.step(a));
        a = (a + 1) % 3;
    }
}
BENCHMARK(BM_EnvStep);

static void BM_NetForward(benchmark::State& state) {
    const net::NetworkParameters p = net::init_network(net::NetworkSpec{}, 7);
    const net::Features x{0.1, -0.4, 0.9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(net::forward(p, x));
    }
}
BENCHMARK(BM_NetForward);

static void BM_VGradient(benchmark::State& state) {
    const net::NetworkParameters p = net::init_network(net::NetworkSpec{}, 7);
    const net::Features x{0.1, -0.4, 0.9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(net::v_gradient(p, x));
    }
}
BENCHMARK(BM_VGradient);

static void BM_ErlEpisode(benchmark::State& state) {
    const env::EnvConfig cfg = env::default_config();
    const agents::AgentConfig acfg;
    for (auto _ : state) {
        state.PauseTiming();
        env::Environment e(cfg);
        agents::QTable q = agents::zero_table(cfg);
        net::NetworkParameters params = net::init_network(net::NetworkSpec{}, 3);
        net::EligibilityTrace trace = net::zero_trace(params);
        Rng rng(3);
        state.ResumeTiming();
        benchmark::DoNotOptimize(agents::run_episode_erl(e, q, params, trace, acfg, rng));
    }
}
BENCHMARK(BM_ErlEpisode)->Unit(benchmark::kMillisecond);

static void BM_TqlEpisode(benchmark::State& state) {
    const env::EnvConfig cfg = env::default_config();
    const agents::AgentConfig acfg;
    for (auto _ : state) {
        state.PauseTiming();
        env::Environment e(cfg);
        agents::QTable q = agents::zero_table(cfg);
        Rng rng(3);
        state.ResumeTiming();
        benchmark::DoNotOptimize(agents::run_episode_tql(e, q, acfg, rng));
    }
}
BENCHMARK(BM_TqlEpisode)->Unit(benchmark::kMicrosecond);

static void BM_Oracle(benchmark::State& state) {
    const env::EnvConfig cfg = env::default_config();
    const int horizon = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(agents::brute_force_optimal(cfg, horizon, 256));
    }
}
BENCHMARK(BM_Oracle)->Arg(8)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
