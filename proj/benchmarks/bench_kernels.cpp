#include <bilu/factor.hpp>
#include <bilu/poisson.hpp>
#include <bilu/preconditioner.hpp>
#include <bilu/symbolic.hpp>

#include <benchmark/benchmark.h>

using namespace bilu;

namespace {

const CsrMatrix& poisson(index_t n) {
  static const CsrMatrix a20 = gen_poisson_3d(20, 20, 20);
  static const CsrMatrix a32 = gen_poisson_3d(32, 32, 32);
  return n == 20 ? a20 : a32;
}

void BM_Generate(benchmark::State& state) {
  const auto n = static_cast<index_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gen_poisson_3d(n, n, n));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_Generate)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

// args: k
void BM_Symbolic(benchmark::State& state) {
  const PatternMatrix p = pattern_of(poisson(20));
  const FillParams params{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(symbolic_phase(p, params));
}
BENCHMARK(BM_Symbolic)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

// args: block size, k
void BM_Factorize(benchmark::State& state) {
  const BcsrMatrix a = bcsr_from_csr(poisson(20), static_cast<index_t>(state.range(0)));
  const FillParams params{static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(build_preconditioner(a, params));
}
BENCHMARK(BM_Factorize)
    ->ArgsProduct({{1, 2, 4, 8}, {0, 1, 2}})
    ->Unit(benchmark::kMillisecond);

// args: block size, k, workers
void BM_Apply(benchmark::State& state) {
  const BcsrMatrix a = bcsr_from_csr(poisson(32), static_cast<index_t>(state.range(0)));
  const BlockIlukPreconditioner m(build_preconditioner(a, {static_cast<int>(state.range(1))}),
                                  static_cast<int>(state.range(2)));
  const Vector b(a.num_rows(), 1.0);
  Vector x(a.num_rows());
  for (auto _ : state) {
    m.apply(b, x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Apply)
    ->ArgsProduct({{1, 4}, {0, 2}, {1, 2, 4}})
    ->Unit(benchmark::kMicrosecond);

void BM_Spmv(benchmark::State& state) {
  const BcsrMatrix a = bcsr_from_csr(poisson(32), static_cast<index_t>(state.range(0)));
  const Vector x(a.num_rows(), 1.0);
  Vector y(a.num_rows());
  for (auto _ : state) {
    spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_Spmv)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
