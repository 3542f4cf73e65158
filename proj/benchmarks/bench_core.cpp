#include <benchmark/benchmark.h>

#include <random>

#include "demandcast/diagnostics.hpp"
#include "demandcast/estimation.hpp"

using namespace demandcast;

namespace {

TimeSeries sample(const SarimaSpec& spec, std::size_t n) {
    auto p = SarimaParams::zeros(spec);
    if (!p.phi.empty()) p.phi[0] = 0.5;
    if (!p.theta.empty()) p.theta[0] = 0.3;
    if (!p.seasonal_phi.empty()) p.seasonal_phi[0] = 0.4;
    if (!p.seasonal_theta.empty()) p.seasonal_theta[0] = 0.2;
    p.intercept = spec.with_intercept ? 100.0 : 0.0;
    return simulate(spec, p, n, 1);
}

void BM_LogLikelihood(benchmark::State& state) {
    const auto spec = SarimaSpec::seasonal(1, 0, 1, 1, 0, 1, 7);
    const auto y = sample(spec, static_cast<std::size_t>(state.range(0)));
    auto p = SarimaParams::zeros(spec);
    p.phi = {0.4};
    p.theta = {0.2};
    p.seasonal_phi = {0.3};
    p.seasonal_theta = {0.1};
    p.intercept = 100.0;
    for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(spec, p, y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogLikelihood)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oN);

void BM_Adf(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    double level = 0.0;
    for (auto& v : x) v = level += z(rng);
    for (auto _ : state) benchmark::DoNotOptimize(adf_test(std::span<const double>(x)));
}
BENCHMARK(BM_Adf)->Arg(500)->Arg(3640);

void BM_FitArma11(benchmark::State& state) {
    const auto spec = SarimaSpec::arima(1, 0, 1);
    const auto y = sample(spec, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit(spec, y));
}
BENCHMARK(BM_FitArma11)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitSeasonal(benchmark::State& state) {
    const auto spec = SarimaSpec::seasonal(1, 0, 0, 1, 0, 1, 7);
    const auto y = sample(spec, 1000);
    for (auto _ : state) benchmark::DoNotOptimize(fit(spec, y));
}
BENCHMARK(BM_FitSeasonal)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
