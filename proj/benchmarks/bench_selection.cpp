#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "phcs/conformal.hpp"
#include "phcs/rng.hpp"
#include "phcs/selection.hpp"

namespace {

std::vector<double> exp_scores(std::size_t n, std::uint64_t seed) {
    phcs::Rng rng(seed, 0);
    std::vector<double> out(n);
    for (double& v : out) v = -std::log(rng.uniform_open());
    return out;
}

phcs::EVector evalues(std::size_t m) {
    phcs::EVector e;
    e.values = exp_scores(m, 2);
    for (double& v : e.values) v *= 5.0;
    return e;
}

void BM_ConformalEBatch(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const phcs::CalibrationScores cal(exp_scores(n, 1));
    const auto tests = exp_scores(n / 10, 3);
    for (auto _ : state) benchmark::DoNotOptimize(phcs::conformal_e_batch(cal, tests));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tests.size()));
}
BENCHMARK(BM_ConformalEBatch)->Range(1 << 10, 1 << 16);

void BM_ConformalPBatch(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const phcs::CalibrationScores cal(exp_scores(n, 1));
    const auto tests = exp_scores(n / 10, 3);
    const std::vector<double> draws(tests.size(), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(phcs::conformal_p_batch(cal, tests, draws));
}
BENCHMARK(BM_ConformalPBatch)->Range(1 << 10, 1 << 16);

void BM_EbhSelect(benchmark::State& state) {
    const auto e = evalues(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(phcs::ebh_select(e, 0.1));
}
BENCHMARK(BM_EbhSelect)->Range(64, 1 << 16);

void BM_BuildPath(benchmark::State& state) {
    const auto e = evalues(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(phcs::build_path(e));
}
BENCHMARK(BM_BuildPath)->Range(64, 1 << 16);

void BM_PathArgmax(benchmark::State& state) {
    const auto path = phcs::build_path(evalues(static_cast<std::size_t>(state.range(0))));
    phcs::UtilitySpec u;
    u.kind = phcs::UtilityKind::linear_tradeoff;
    u.lambda = 100.0;
    for (auto _ : state) benchmark::DoNotOptimize(phcs::maximize_utility(path, u));
}
BENCHMARK(BM_PathArgmax)->Range(64, 1 << 16);

} // namespace
BENCHMARK_MAIN();
