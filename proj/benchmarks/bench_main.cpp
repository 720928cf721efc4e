#include <benchmark/benchmark.h>

#include "qgossip/experiments.hpp"
#include "qgossip/markov.hpp"
#include "qgossip/rng.hpp"

namespace {

using namespace qgossip;

void BM_QcStep(benchmark::State& state) {
  const Digraph g = complete_digraph(16);
  const ActivationModel model = uniform_activation(g);
  const QcPolicy policy = QcPolicy::adopt();
  std::mt19937_64 rng = derive_stream(1, 0);
  StateVector x = qc_worst_init(16);
  for (auto _ : state) {
    qc_step_inplace(x, model.sample(rng), policy);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_QcStep);

void BM_QaStep(benchmark::State& state) {
  const Digraph g = complete_digraph(16);
  const ActivationModel model = uniform_activation(g);
  std::mt19937_64 rng = derive_stream(2, 0);
  QaState s{qa_worst_init(16), StateVector(16, 0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(qa_step_inplace(s, model.sample(rng)));
  }
}
BENCHMARK(BM_QaStep);

void BM_RunQcWorst(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Digraph g = complete_digraph(n);
  const ActivationModel model = uniform_activation(g);
  const StateVector x0 = qc_worst_init(n);
  const QcPolicy policy = QcPolicy::adopt();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_qc(g, model, x0, policy, seed++).steps);
  }
}
BENCHMARK(BM_RunQcWorst)->Arg(8)->Arg(16)->Arg(32);

void BM_RunQaWorst(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Digraph g = complete_digraph(n);
  const ActivationModel model = uniform_activation(g);
  const StateVector x0 = qa_worst_init(n);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_qa(g, model, x0, seed++).steps);
  }
}
BENCHMARK(BM_RunQaWorst)->Arg(8)->Arg(16);

void BM_SolveChainIII(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto spec = to_chain_spec(build_chain_iii_l1(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_hitting_times(spec));
  }
}
BENCHMARK(BM_SolveChainIII)->Arg(8)->Arg(24)->Arg(48);

void BM_Ensemble(benchmark::State& state) {
  ExperimentConfig config;
  config.algorithm = Algorithm::Qc;
  config.graph_spec = "complete:8";
  config.init_spec = "halfsplit:8";
  config.trials = 1000;
  config.seed = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ensemble(config).mean);
  }
}
BENCHMARK(BM_Ensemble);

}  // namespace

BENCHMARK_MAIN();
