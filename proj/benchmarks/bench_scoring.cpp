#include <benchmark/benchmark.h>

#include <random>

#include "fairrank/lp.hpp"
#include "fairrank/scorer.hpp"

using namespace fairrank;

namespace {

Vec random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

void BM_ProjectSimplex(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  Vec x = random_vec(rng, m, -2.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(project_simplex(x));
}

void BM_ScoreSession(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const int m = 10;
  std::mt19937_64 rng(2);
  Vec u = random_vec(rng, M, 0.0, 1.0);
  Vec v = position_bias_vector(m);
  Vec f = random_vec(rng, M, -0.1, 0.1);
  DualStore store;
  store.gamma = 0.01;
  store.refreshed_at = 0;
  store.duals.eta = random_vec(rng, m, 0.0, 0.2);
  store.duals.lambda = Vec::Constant(1, 0.05);
  for (auto _ : state)
    benchmark::DoNotOptimize(score_session(u, v, {f}, store));
}

void BM_SolveSession(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const int m = 10;
  std::mt19937_64 rng(3);
  Vec u = random_vec(rng, M, 0.1, 1.0);
  Vec v = position_bias_vector(m);
  std::vector<int> labels(static_cast<size_t>(M));
  for (int i = 0; i < M; ++i) labels[static_cast<size_t>(i)] = i % 2;
  GroupAssignment groups(labels);
  std::vector<MemberId> cands(static_cast<size_t>(M));
  std::iota(cands.begin(), cands.end(), 0);
  auto c = build_dp_vector(groups, 0, 1, cands);
  c.tolerance = equality_of_opportunity_epsilon(m);
  auto prob = assemble(u, v, {c}, 0.01);
  SolverOptions opts;
  opts.tolerance = 1e-8;
  for (auto _ : state) benchmark::DoNotOptimize(solve(prob, opts));
}

}  // namespace

BENCHMARK(BM_ProjectSimplex)->Arg(10)->Arg(20)->Arg(100);
BENCHMARK(BM_ScoreSession)->Arg(250)->Arg(1000);
BENCHMARK(BM_SolveSession)->Arg(50)->Arg(250);

BENCHMARK_MAIN();
