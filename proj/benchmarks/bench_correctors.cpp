#include <benchmark/benchmark.h>

#include "dislo/correctors.hpp"
#include "dislo/layer.hpp"

static void BM_QDirectValue(benchmark::State& state) {
  using namespace dislo;
  LayerProfile layer = LayerProfile::explicit_arctan();
  QField q = build_q(layer, 0.1, 0.5, 40.0, 40.0);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(q.value_direct(x, 1.5));
    x += 1e-6;
  }
}
BENCHMARK(BM_QDirectValue);

static void BM_QLatticeValue(benchmark::State& state) {
  using namespace dislo;
  LayerProfile layer = LayerProfile::explicit_arctan();
  QField q = build_q(layer, 0.1, 0.5, 40.0, 40.0);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(q.value(x, 1.5));
    x += 1e-6;
  }
}
BENCHMARK(BM_QLatticeValue);
