#include <benchmark/benchmark.h>

#include <cmath>

#include "inertia/agm.hpp"
#include "inertia/apm.hpp"
#include "inertia/dynamics.hpp"
#include "inertia/problems.hpp"
#include "inertia/rng.hpp"

namespace {

using namespace inertia;

void bm_agm_step(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  SmoothObjective P = random_psd_quadratic(dim, 0.1, 1.0, 1);
  AgmParams params{.alpha = 3.0, .gamma = 1.0,
                   .h = 1.0 / std::sqrt(2.0 * P.lipschitz_L)};
  AgmState s = agm_init(P, params, Rng(2).normal_vector(dim));
  for (auto _ : state) {
    s = agm_step(P, params, s);
    benchmark::DoNotOptimize(s.x.data());
    if (s.k > 1000000) s.k = 1;  // keep the momentum coefficient in range
  }
}
BENCHMARK(bm_agm_step)->Arg(20)->Arg(100);

void bm_apm_step_lasso(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  CompositeObjective P = random_lasso(dim, 0.1, 1.0, 0.1, 3);
  ApmParams params{.alpha = 3.0, .s = 0.5 / P.smooth.lipschitz_L};
  ApmState s = apm_init(P, params, Rng(4).normal_vector(dim));
  for (auto _ : state) {
    s = apm_step(P, params, s);
    benchmark::DoNotOptimize(s.x.data());
    if (s.k > 1000000) s.k = 1;
  }
}
BENCHMARK(bm_apm_step_lasso)->Arg(20)->Arg(100);

void bm_rk4_step(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  SmoothObjective P = random_psd_quadratic(dim, 0.1, 1.0, 5);
  OdeParams params{.alpha = 2.0, .beta = 1.0, .gamma = 1.0, .r = 2.0,
                   .t0 = 1e-3, .t_end = 10.0, .step = 1e-3,
                   .mode = OdeMode::pl};
  OdeState s{params.t0, Rng(6).normal_vector(dim),
             -params.beta * P.gradient(Rng(6).normal_vector(dim))};
  for (auto _ : state) {
    s = rk4_step(P, params, s, params.step);
    benchmark::DoNotOptimize(s.x.data());
    if (s.t > 9.0) s.t = params.t0;
  }
}
BENCHMARK(bm_rk4_step)->Arg(2)->Arg(50);

void bm_energy_discrete(benchmark::State& state) {
  SmoothObjective P = random_psd_quadratic(50, 0.1, 1.0, 7);
  AgmParams params{.alpha = 3.0, .gamma = 1.0,
                   .h = 1.0 / std::sqrt(2.0 * P.lipschitz_L)};
  const AgmState s = agm_init(P, params, Rng(8).normal_vector(50));
  for (auto _ : state) {
    const DiscreteEnergy e = energy_discrete(P, params, s, 1.0);
    benchmark::DoNotOptimize(e.value);
  }
}
BENCHMARK(bm_energy_discrete);

void bm_prox_l1(benchmark::State& state) {
  ProxFriendly g = ProxFriendly::l1(0.3);
  const Vector z = Rng(9).normal_vector(1000);
  for (auto _ : state) {
    Vector p = g.prox(z, 0.5);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(bm_prox_l1);

}  // namespace

BENCHMARK_MAIN();
