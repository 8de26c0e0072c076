#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "lge/solver.hpp"
#include "lge/synthetic.hpp"

namespace {

struct Instance {
  lge::Corpus corpus;
  lge::AlgebraConfig algebra;
  lge::TreeLayout layout;
  lge::Projector projector;
  std::vector<double> v, out;

  explicit Instance(int sentences)
      : corpus(lge::Corpus::from_sentences(
            lge::synth_generate(lge::SyntheticGrammar::standard(), sentences, 1))),
        layout(corpus, algebra),
        projector(layout, algebra, lge::SolverConfig{}),
        v(lge::init_state(layout, 1)),
        out(v.size()) {}
};

Instance& instance(int sentences) {
  static std::map<int, std::unique_ptr<Instance>> cache;
  auto& slot = cache[sentences];
  if (!slot) slot = std::make_unique<Instance>(sentences);
  return *slot;
}

void BM_ProjectA(benchmark::State& state, lge::Execution exec) {
  auto& in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(in.projector.project_a(in.v, in.out, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.v.size()));
}

void BM_ProjectB(benchmark::State& state, lge::Execution exec) {
  auto& in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    in.projector.project_b(in.v, in.out, exec);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.v.size()));
}

void BM_Step(benchmark::State& state, lge::Execution exec) {
  auto& in = instance(static_cast<int>(state.range(0)));
  auto v = in.v;
  std::vector<double> delta(v.size());
  for (auto _ : state) lge::rrr_step(in.projector, v, delta, exec);
}

}  // namespace

BENCHMARK_CAPTURE(BM_ProjectA, serial, lge::Execution::kSerial)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_ProjectA, parallel, lge::Execution::kParallel)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_ProjectB, serial, lge::Execution::kSerial)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_ProjectB, parallel, lge::Execution::kParallel)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_Step, serial, lge::Execution::kSerial)->Arg(100);
BENCHMARK_CAPTURE(BM_Step, parallel, lge::Execution::kParallel)->Arg(100);

BENCHMARK_MAIN();
