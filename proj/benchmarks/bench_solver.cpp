#include <benchmark/benchmark.h>

#include "dislo/coupled_solver.hpp"
#include "dislo/layer.hpp"
#include "dislo/potential.hpp"

static void BM_CoupledStep(benchmark::State& state) {
  using namespace dislo;
  const double eps = 0.2;
  FieldGrid grid{4.8, 4.0, 385, 161};
  LayerProfile layer = LayerProfile::explicit_arctan();
  Field f = init_superposition({-0.5, 0.5}, eps, layer, grid, 1.0);
  PotentialSpec pot = PotentialSpec::sinusoidal();
  CoupledSolver solver(f, pot);
  const double dt = 0.25 * eps * eps;
  for (auto _ : state) {
    f = solver.step(f, dt);
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_CoupledStep)->Unit(benchmark::kMillisecond);
