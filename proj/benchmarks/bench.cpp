#include <benchmark/benchmark.h>

#include "kpp/dispersion.hpp"
#include "kpp/environment.hpp"
#include "kpp/hj.hpp"
#include "kpp/kernel.hpp"
#include "kpp/simulate.hpp"
#include "kpp/speeds.hpp"

using namespace kpp;

namespace {

void BM_mgf(benchmark::State& state) {
  auto k = DelayKernel::gauss_exp(1.0, 6.0, 64, 1.0, 1.0, 32);
  double p = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.mgf(p, -0.5));
    p += 1e-6;  // defeat any memoization of the argument
  }
}
BENCHMARK(BM_mgf);

void BM_lambda_implicit(benchmark::State& state) {
  DispersionRelation rel(-0.5, 1.5, DelayKernel::point_mass(1.0, 0.0));
  double p = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rel.lambda(p));
    p += 1e-6;
  }
}
BENCHMARK(BM_lambda_implicit);

void BM_speed_single_shift(benchmark::State& state) {
  DispersionRelation rm(0.25, 0.0, DelayKernel::none());
  DispersionRelation rp(1.0, 0.0, DelayKernel::none());
  double c1 = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(speed_single_shift(rm, rp, c1, 0.5).s_hat);
    c1 = 2.0 + (c1 > 4.0 ? 0.0 : c1 * 1e-3);
  }
}
BENCHMARK(BM_speed_single_shift);

void BM_hj_solve(benchmark::State& state) {
  auto profile = RayProfile::piecewise({2.5}, {{0.25, 0.0}, {1.0, 0.0}});
  GridSpec grid{6.0, 1.0 / static_cast<double>(state.range(0))};
  for (auto _ : state) {
    auto sol = hj_solve(profile, DelayKernel::none(), mu_infinity, grid);
    benchmark::DoNotOptimize(sol.s_hat);
  }
}
BENCHMARK(BM_hj_solve)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_simulate_short(benchmark::State& state) {
  ModelSpec model;
  model.f1 = ModelSpec::F1::fisher;
  model.env1 = ShiftedEnvironment(1.0);
  InitialData ic;
  ic.kind = InitialData::Kind::bump;
  ic.amplitude = 0.5;
  ic.width = 10.0;
  SimParams params;
  params.t_final = 5.0;
  params.x_lo = -20.0;
  params.x_hi = 60.0;
  params.nx = 401;
  for (auto _ : state) {
    auto sim = simulate(model, ic, params);
    benchmark::DoNotOptimize(sim.u_max_seen);
  }
}
BENCHMARK(BM_simulate_short)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
