// Conjugate kernels: OpenMP sweep, the same sweep on one thread, and the O(NM)
// reference scan. Arguments are (dimension, nodes per axis).

#include <benchmark/benchmark.h>
#include <omp.h>

#include "qcvx/corpus.hpp"
#include "qcvx/legendre.hpp"
#include "qcvx/reference.hpp"

namespace {

using namespace qcvx;

GridFunction subject(std::size_t dim, std::size_t nodes) {
  const auto d = GridDomain::cube(dim, -1, 1, nodes);
  return corpus::rasterize(corpus::gen_max_quadratics(7, d, 4, -1, 2), d);
}

legendre::DualGrid dual_for(std::size_t dim, std::size_t nodes) {
  return legendre::DualGrid{GridDomain::cube(dim, -4, 4, nodes)};
}

void run_sweep(benchmark::State& state, int threads) {
  const auto dim = static_cast<std::size_t>(state.range(0)), n = static_cast<std::size_t>(state.range(1));
  const auto f = subject(dim, n);
  const auto dual = dual_for(dim, n);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : saved);
  for (auto _ : state) benchmark::DoNotOptimize(legendre::conjugate(f, dual));
  omp_set_num_threads(saved);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}

void BM_ConjugateParallel(benchmark::State& state) { run_sweep(state, 0); }
void BM_ConjugateSerial(benchmark::State& state) { run_sweep(state, 1); }

void BM_ConjugateBruteForce(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0)), n = static_cast<std::size_t>(state.range(1));
  const auto f = subject(dim, n);
  const auto dual = dual_for(dim, n);
  for (auto _ : state) benchmark::DoNotOptimize(reference::conjugate(f, dual.grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}

void BM_Envelope(benchmark::State& state) {
  const auto f = subject(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(legendre::biconjugate_envelope(f));
}

}  // namespace

BENCHMARK(BM_ConjugateParallel)->Args({1, 1 << 10})->Args({1, 1 << 16})->Args({2, 64})->Args({2, 256});
BENCHMARK(BM_ConjugateSerial)->Args({1, 1 << 10})->Args({1, 1 << 16})->Args({2, 64})->Args({2, 256});
BENCHMARK(BM_ConjugateBruteForce)->Args({1, 1 << 10})->Args({2, 64});
BENCHMARK(BM_Envelope)->Args({1, 1 << 12})->Args({2, 64});

BENCHMARK_MAIN();
