#include <benchmark/benchmark.h>

#include <map>

#include "cge/allocation.hpp"
#include "cge/cholesky.hpp"
#include "cge/pipeline.hpp"
#include "cge/rng.hpp"

using namespace cge;

namespace {

const CoverageInstance& instance(int side) {
  static std::map<int, CoverageInstance> cache;
  auto it = cache.find(side);
  if (it == cache.end()) {
    EnvParams p;
    p.side = side;
    p.seed = 7;
    const std::vector<VertexId> starts{0, 0, 0};
    it = cache.emplace(side, prepare_instance(generate_random_env(p), starts, 7, 2.0)).first;
  }
  return it->second;
}

ProblemPtr problem(int side, double lambda = 0.3) {
  const auto& inst = instance(side);
  return make_problem(ground_set_for(inst, lambda), inst.pose_graph, inst.laplacian);
}

void BM_CholeskyUpdate(benchmark::State& state) {
  const auto& inst = instance(static_cast<int>(state.range(0)));
  IncrementalCholesky chol(inst.laplacian.matrix);
  const int n = chol.dim();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(n / 2) = 1.0;
  v(n - 1) = -1.0;
  for (auto _ : state) {
    chol.update(v);
    chol.downdate(v);
  }
  state.counters["dim"] = n;
}
BENCHMARK(BM_CholeskyUpdate)->Arg(60)->Arg(100)->Arg(120);

void BM_MarginalGain(benchmark::State& state) {
  const auto p = problem(static_cast<int>(state.range(0)), 0.1);
  OracleCounter counter;
  ObjectiveState s(p, counter);
  int z = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.marginal_gain(z));
    z = (z + 1) % p->size();
  }
  state.counters["dim"] = p->dim();
}
BENCHMARK(BM_MarginalGain)->Arg(60)->Arg(100)->Arg(120);

void BM_DenseObjective(benchmark::State& state) {
  const auto p = problem(static_cast<int>(state.range(0)), 0.1);
  const std::vector<int> one{0};
  for (auto _ : state) benchmark::DoNotOptimize(objective_value(*p, one));
}
BENCHMARK(BM_DenseObjective)->Arg(60)->Arg(100)->Arg(120);

void BM_Solver(benchmark::State& state) {
  const auto algo = static_cast<Algorithm>(state.range(0));
  const bool lazy = state.range(1) != 0;
  const auto p = problem(100);
  for (auto _ : state) benchmark::DoNotOptimize(run_algorithm(algo, p, 7, lazy));
  state.SetLabel(std::string(label(algo)) + (lazy ? " lazy" : ""));
}
BENCHMARK(BM_Solver)
    ->Args({static_cast<int>(Algorithm::SimpleGreedy), 1})
    ->Args({static_cast<int>(Algorithm::SimpleGreedy), 0})
    ->Args({static_cast<int>(Algorithm::DoubleGreedy), 0})
    ->Args({static_cast<int>(Algorithm::DoubleGreedyOrdered), 1})
    ->Args({static_cast<int>(Algorithm::DeterministicUsm), 0})
    ->Args({static_cast<int>(Algorithm::DeterministicUsmOrdered), 1})
    ->Unit(benchmark::kMillisecond);

void BM_Allocation(benchmark::State& state) {
  Rng rng(5);
  const int k = static_cast<int>(state.range(0));
  std::vector<double> base{300.0, 320.0, 340.0};
  std::vector<InterEdge> edges;
  for (int e = 0; e < k; ++e) {
    const int a = static_cast<int>(rng.below(3));
    edges.push_back({a, (a + 1 + static_cast<int>(rng.below(2))) % 3, rng.uniform(2.0, 60.0)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(allocate_inter(edges, base));
}
BENCHMARK(BM_Allocation)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
