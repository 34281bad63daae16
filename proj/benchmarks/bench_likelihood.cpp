#include <benchmark/benchmark.h>

#include <cmath>

#include "survbma/families.hpp"
#include "survbma/rng.hpp"

using namespace survbma;

namespace {

SurvivalData make_data(int n, std::uint64_t seed) {
    Rng rng(seed);
    SurvivalData data;
    for (int i = 0; i < n; ++i) {
        const double t = sample_time(Family::LogNormal, 6.5, 1.5, rng);
        const double c = sample_time(Family::Weibull, std::log(2250.0), 1.5, rng);
        const double cut = std::min(c, 1825.0);
        data.add(std::min(t, cut), t <= cut, i % 2);
    }
    return data;
}

void BM_LogLikelihood(benchmark::State& state, Family family) {
    const auto data = make_data(static_cast<int>(state.range(0)), 42);
    ParamVector p;
    p.beta = 0.2;
    p.alpha = 6.5;
    if (family_has_shape(family)) p.gamma = 1.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_likelihood(data, family, p));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LikelihoodContext(benchmark::State& state, Family family) {
    // Administrative censoring collapses duplicates; grouped evaluation is
    // the sampler's hot path.
    auto data = make_data(static_cast<int>(state.range(0)), 42);
    SurvivalData censored;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const bool within = data.time(i) <= 270.0;
        censored.add(within ? data.time(i) : 270.0, data.event(i) && within, data.treatment(i));
    }
    const LikelihoodContext ctx(censored, family);
    ParamVector p;
    p.beta = 0.2;
    p.alpha = 6.5;
    if (family_has_shape(family)) p.gamma = 1.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctx(p));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int>(ctx.num_groups()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_LogLikelihood, exponential, Family::Exponential)->Arg(200)->Arg(2070);
BENCHMARK_CAPTURE(BM_LogLikelihood, weibull, Family::Weibull)->Arg(200)->Arg(2070);
BENCHMARK_CAPTURE(BM_LogLikelihood, lognormal, Family::LogNormal)->Arg(200)->Arg(2070);
BENCHMARK_CAPTURE(BM_LogLikelihood, loglogistic, Family::LogLogistic)->Arg(200)->Arg(2070);
BENCHMARK_CAPTURE(BM_LogLikelihood, gamma, Family::Gamma)->Arg(200)->Arg(2070);
BENCHMARK_CAPTURE(BM_LikelihoodContext, lognormal_censored, Family::LogNormal)->Arg(2070);
BENCHMARK_CAPTURE(BM_LikelihoodContext, gamma_censored, Family::Gamma)->Arg(2070);
