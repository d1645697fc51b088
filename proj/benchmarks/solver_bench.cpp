#include <benchmark/benchmark.h>

#include "mcfa/data.hpp"
#include "mcfa/solver.hpp"
#include "mcfa/sparse.hpp"

using namespace mcfa;

namespace {

ObservationSet sample(std::size_t m1, std::size_t m2, std::size_t n, int classes) {
  const auto truth = generate_truth({.m1 = m1, .m2 = m2, .classes = classes, .seed = 1});
  return sample_observations(truth, SamplingDistribution::uniform(m1, m2), LinkModel(classes), n, 2);
}

void BM_TopSingularPair(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto obs = sample(m, m, 100 * m, 2);
  const auto p = SliceProblem::multinomial(obs, LinkModel(2), 0);
  const auto grad = p.gradient(std::vector<double>(p.entry_count(), 0.0));
  const auto method = state.range(1) ? SingularMethod::power : SingularMethod::lanczos;
  for (auto _ : state) benchmark::DoNotOptimize(top_singular_pair(grad, 1e-9, 500, 3, method));
  state.SetLabel(state.range(1) ? "power" : "lanczos");
}
BENCHMARK(BM_TopSingularPair)->ArgsProduct({{300, 1000, 3000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_SliceGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto obs = sample(1000, 600, n, 2);
  const auto p = SliceProblem::multinomial(obs, LinkModel(2), 0);
  const std::vector<double> w(p.entry_count(), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(p.gradient(w));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * p.entry_count()));
}
BENCHMARK(BM_SliceGradient)->Arg(10000)->Arg(250000)->Unit(benchmark::kMicrosecond);

void BM_SolveSlice(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto obs = sample(1000, 600, n, 2);
  const auto p = SliceProblem::multinomial(obs, LinkModel(2), 0);
  const SliceProblem one[] = {p};
  SolverConfig c;
  c.lambda = 0.1 * null_lambda(one);
  std::size_t atoms = 0;
  for (auto _ : state) atoms = solve_slice(p, c).decomposition.size();
  state.counters["atoms"] = static_cast<double>(atoms);
}
BENCHMARK(BM_SolveSlice)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
