#include <benchmark/benchmark.h>

#include <qgraph/dynamics.hpp>
#include <qgraph/measures.hpp>

namespace {

using namespace qgraph;

MetricGraph star3() {
  return build_metric_graph(4, {{0, 1}, {0, 2}, {0, 3}},
                            {1.0, 1.4142135623730951, 1.7320508075688772});
}

MetricGraph eight() {
  return build_metric_graph(1, {{0, 0}, {0, 0}}, {1.0, 1.4142135623730951});
}

void BM_SecularValue(benchmark::State& state) {
  const auto mg = star3();
  const auto sys = build_secular_system(mg.graph);
  double k = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sys.value(torus_point(k, mg.lengths)));
    k += 0.37;
  }
}
BENCHMARK(BM_SecularValue);

void BM_SecularGradient(benchmark::State& state) {
  const auto mg = star3();
  const auto sys = build_secular_system(mg.graph);
  double k = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sys.gradient_adjugate(torus_point(k, mg.lengths)));
    k += 0.37;
  }
}
BENCHMARK(BM_SecularGradient);

void BM_SolveSlice(benchmark::State& state) {
  const auto mg = eight();
  const double k_max = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_spectrum(mg, k_max));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SolveSlice)->Arg(50)->Arg(200);

void BM_CensusFromSlice(benchmark::State& state) {
  const auto mg = eight();
  const auto slice = solve_spectrum(mg, 300.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(semiclassical_census(mg, slice));
  }
}
BENCHMARK(BM_CensusFromSlice);

void BM_StationaryDistribution(benchmark::State& state) {
  std::vector<Edge> edges;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) edges.push_back({i, j});
  const auto chain = transition_matrix(build_graph(4, edges));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_distribution(chain));
  }
}
BENCHMARK(BM_StationaryDistribution);

void BM_GeodesicSimulation(benchmark::State& state) {
  const auto mg = star3();
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_geodesic(mg, 0, 0.0, 1e4, 42));
  }
}
BENCHMARK(BM_GeodesicSimulation);

}  // namespace

BENCHMARK_MAIN();
