#include <benchmark/benchmark.h>

#include <numbers>

#include "dislo/particle_ode.hpp"

static void BM_IntegratePair(benchmark::State& state) {
  using namespace dislo;
  const double c0 = 2.0 * std::numbers::pi;
  for (auto _ : state) {
    ParticleTrajectory traj = integrate(ParticleState{{-1.0, 1.0}, 0.0}, c0,
                                        0.0, Orientation::None, 1.0, 1e-9);
    benchmark::DoNotOptimize(traj.position(1, 1.0));
  }
}
BENCHMARK(BM_IntegratePair);

static void BM_IntegrateMany(benchmark::State& state) {
  using namespace dislo;
  const double c0 = 2.0 * std::numbers::pi;
  std::vector<double> z;
  for (int i = 0; i < state.range(0); ++i) z.push_back(i * 0.8);
  for (auto _ : state) {
    ParticleTrajectory traj =
        integrate(ParticleState{z, 0.0}, c0, 0.0, Orientation::None, 0.5, 1e-9);
    benchmark::DoNotOptimize(traj.samples().size());
  }
}
BENCHMARK(BM_IntegrateMany)->Arg(8)->Arg(32);
