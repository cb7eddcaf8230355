#include <benchmark/benchmark.h>

#include "rmm/adversary.hpp"
#include "rmm/environment.hpp"
#include "rmm/neural.hpp"
#include "rmm/replay.hpp"
#include "rmm/sac.hpp"

namespace {

void BM_EnvStep(benchmark::State& state) {
    rmm::EnvConfig env;
    rmm::Rng rng(1);
    rmm::FixedAdversary adversary;
    const auto action = rmm::QuoteAction::two_sided(0.75, 0.75);
    rmm::EnvState s = rmm::reset(env, rng);
    for (auto _ : state) {
        if (s.terminal()) s = rmm::reset(env, rng);
        s = rmm::step(env, s, action, adversary, rng).next;
        benchmark::DoNotOptimize(s.portfolio.cash);
    }
}
BENCHMARK(BM_EnvStep);

void BM_MlpForwardBackward(benchmark::State& state) {
    rmm::Rng rng(2);
    const int batch = static_cast<int>(state.range(0));
    rmm::Mlp net({2, 64, 64, 4}, rmm::Activation::Tanh, rng);
    rmm::Matrix x = rmm::Matrix::Random(2, batch);
    rmm::Matrix upstream = rmm::Matrix::Ones(4, batch);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.forward(x).data());
        auto g = net.backward(upstream);
        benchmark::DoNotOptimize(g.input.data());
    }
}
BENCHMARK(BM_MlpForwardBackward)->Arg(1)->Arg(64)->Arg(256);

void BM_SacUpdate(benchmark::State& state) {
    rmm::Rng rng(3);
    rmm::SacConfig cfg;
    rmm::SacAgent agent(2, rmm::ActionBox::symmetric(2, 3.0), cfg, rng);
    rmm::ReplayBuffer buffer(10000, 2, 2);
    for (int i = 0; i < 10000; ++i) {
        const double obs[2] = {rmm::uniform01(rng), rmm::uniform01(rng) - 0.5};
        const double act[2] = {2 * rmm::uniform01(rng) - 1, 2 * rmm::uniform01(rng) - 1};
        buffer.add(obs, act, rmm::standard_normal(rng), obs, i % 200 == 199);
    }
    for (auto _ : state) benchmark::DoNotOptimize(agent.update(buffer, rng));
}
BENCHMARK(BM_SacUpdate);

}  // namespace

BENCHMARK_MAIN();
