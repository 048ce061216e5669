#include <benchmark/benchmark.h>

#include "stratanet/backbone.hpp"
#include "stratanet/blockmodel.hpp"
#include "stratanet/bootstrap.hpp"
#include "stratanet/ergm.hpp"
#include "stratanet/metrics.hpp"
#include "stratanet/random.hpp"
#include "stratanet/synthetic.hpp"

using namespace stratanet;

namespace {

WeightedDigraph weighted_random(std::size_t n, double p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    std::vector<Edge> edges;
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = 0; j < n; ++j)
            if (i != j && rng.bernoulli(p)) edges.push_back({i, j, 1 + static_cast<Weight>(rng.below(20))});
    return WeightedDigraph(names, edges);
}

std::vector<Sector> sectors_for(std::size_t n) {
    std::vector<Sector> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<Sector>(i % kSectorCount);
    return s;
}

}  // namespace

static void BM_ScoreEdges(benchmark::State& state) {
    const auto g = weighted_random(static_cast<std::size_t>(state.range(0)), 0.1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(score_edges(g));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edge_count()));
}
BENCHMARK(BM_ScoreEdges)->Arg(100)->Arg(400);

static void BM_Overlap(benchmark::State& state) {
    const auto g = weighted_random(static_cast<std::size_t>(state.range(0)), 0.1, 2);
    const UndirectedView view(g);
    for (auto _ : state) {
        double sum = 0;
        for (VertexId i = 0; i < 50; ++i)
            for (VertexId j = i + 1; j < 50; ++j) sum += overlap(view, i, j, OverlapMode::Weighted);
        benchmark::DoNotOptimize(sum);
    }
}
BENCHMARK(BM_Overlap)->Arg(200);

static void BM_BootstrapEnsemble(benchmark::State& state) {
    const auto g = weighted_random(200, 0.05, 3);
    const auto m = static_cast<Weight>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ensemble(g, m, 100, 7));
    state.SetItemsProcessed(state.iterations() * 100 * m);
}
BENCHMARK(BM_BootstrapEnsemble)->Arg(1000)->Arg(20000);

static void BM_SbmSweeps(benchmark::State& state) {
    const auto pp = synthetic::planted_partition(static_cast<std::size_t>(state.range(0)), 4, 0.2, 0.01, 4);
    SbmConfig config;
    config.n_sweeps = 100;
    for (auto _ : state) benchmark::DoNotOptimize(fit_sbm(pp.graph, config));
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SbmSweeps)->Arg(60)->Arg(240)->Unit(benchmark::kMillisecond);

static void BM_LogOmegaApprox(benchmark::State& state) {
    const std::vector<std::int64_t> rows{30, 25, 20, 15, 10}, cols{20, 20, 20, 20, 20};
    for (auto _ : state) benchmark::DoNotOptimize(log_omega_approx(rows, cols));
}
BENCHMARK(BM_LogOmegaApprox);

static void BM_Mple(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto sectors = sectors_for(n);
    const auto terms = default_terms(sectors);
    std::vector<double> theta(terms.size(), 0.0);
    theta[0] = -3.0;
    const auto g = simulate_ergm(theta, terms, sectors, 5, 5);
    for (auto _ : state) benchmark::DoNotOptimize(fit_mple(g, terms, sectors));
}
BENCHMARK(BM_Mple)->Arg(60)->Arg(240)->Unit(benchmark::kMillisecond);

static void BM_ErgmBootstrap(benchmark::State& state) {
    const auto sectors = sectors_for(120);
    const auto terms = default_terms(sectors);
    std::vector<double> theta(terms.size(), 0.0);
    theta[0] = -3.0;
    std::vector<SimpleGraph> graphs;
    for (std::uint64_t s = 0; s < 50; ++s) graphs.push_back(simulate_ergm(theta, terms, sectors, s, 3));
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_ergm(graphs, terms, sectors));
}
BENCHMARK(BM_ErgmBootstrap)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
