#include <benchmark/benchmark.h>

#include <cmath>

#include "survbma/bridge.hpp"
#include "survbma/sampler.hpp"

using namespace survbma;

namespace {

SurvivalData make_data(int n, std::uint64_t seed) {
    Rng rng(seed);
    SurvivalData data;
    for (int i = 0; i < n; ++i) {
        const double t = sample_time(Family::Weibull, 6.0, 1.2, rng);
        const double c = 50.0 + 1500.0 * rng.uniform01();
        data.add(std::min(t, c), t <= c, i % 2);
    }
    return data;
}

ModelSpec weibull_model() {
    ModelSpec m;
    m.family = Family::Weibull;
    m.beta = PriorSpec::truncated_normal(0.3, 0.15, 0.0,
                                         std::numeric_limits<double>::infinity());
    m.alpha = PriorSpec::normal(6.0, 2.0);
    m.gamma = PriorSpec::log_normal(0.0, 0.3);
    m.weight = 1.0;
    return m;
}

void BM_SamplePosterior(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)), 7);
    const auto model = weibull_model();
    SamplerSettings settings;
    settings.burnin = 300;
    settings.samples = 1500;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        settings.seed = seed++;
        benchmark::DoNotOptimize(sample_posterior(model, data, settings));
    }
}

void BM_BridgeMarglik(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)), 7);
    const auto model = weibull_model();
    SamplerSettings settings;
    settings.burnin = 300;
    settings.samples = 1500;
    settings.seed = 11;
    const auto fit = sample_posterior(model, data, settings);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bridge_marglik(fit, model, data, seed++));
    }
}

}  // namespace

BENCHMARK(BM_SamplePosterior)->Arg(200)->Arg(2070)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BridgeMarglik)->Arg(200)->Arg(2070)->Unit(benchmark::kMillisecond);
