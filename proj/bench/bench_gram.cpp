// Serial against OpenMP Gram construction for the conv kernels.
#include <benchmark/benchmark.h>

#include "symsys/data/sources.hpp"
#include "symsys/kernels/gram.hpp"

using namespace symsys;

namespace {

const Dataset& data() {
  static const Dataset ds = [] {
    SyntheticConfig cfg;
    cfg.m_train = 64;
    cfg.m_test = 4;
    return gen_synthetic(0, cfg);
  }();
  return ds;
}

void gram(benchmark::State& state, ModelKind kind, bool parallel) {
  NetworkSpec spec;
  spec.kind = kind;
  spec.grid = data().train.x.grid;
  const auto m = state.range(0);
  const ImageBatch x = data().train.x.head(m);
  GramOptions options;
  options.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrices(spec, x, nullptr, options).ntk.values.data());
  state.SetItemsProcessed(state.iterations() * m * (m + 1) / 2);
}

}  // namespace

BENCHMARK_CAPTURE(gram, VEC_serial, ModelKind::VEC, false)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(gram, VEC_openmp, ModelKind::VEC, true)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(gram, GAP_serial, ModelKind::GAP, false)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(gram, GAP_openmp, ModelKind::GAP, true)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
