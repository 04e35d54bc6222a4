// ===== microbenchmarks =====
//
// Costs worth watching: the forward transform, the lattice remainder at the
// two working resolutions, the dissipation functional, one integrator step,
// and the certified root solve.

#include <benchmark/benchmark.h>

#include "muskat/constants.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/evolution.hpp"
#include "muskat/presets.hpp"
#include "muskat/rhs.hpp"
#include "muskat/spectral.hpp"

using namespace muskat;

static void BM_forward_transform(benchmark::State& state) {
  const Grid g = make_grid(2, static_cast<int>(state.range(0)));
  const Field f = preset_field("two_mode", g, 0.2);
  for (auto _ : state) {
    Spectrum c = to_spectral(f);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_forward_transform)->Arg(64)->Arg(128);

static void BM_rhs_direct(benchmark::State& state) {
  const Grid g = make_grid(2, static_cast<int>(state.range(0)));
  const Field f = preset_field("two_mode", g, 0.2);
  for (auto _ : state) {
    RhsResult r = rhs_direct(f, 1.0);
    benchmark::DoNotOptimize(r.value.v.data());
  }
}
BENCHMARK(BM_rhs_direct)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_rhs_series(benchmark::State& state) {
  const Grid g = make_grid(2, 64);
  const Field f = preset_field("two_mode", g, 0.2);
  for (auto _ : state) {
    RhsResult r = rhs_series(f, static_cast<int>(state.range(0)), 1.0);
    benchmark::DoNotOptimize(r.value.v.data());
  }
}
BENCHMARK(BM_rhs_series)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_dissipation(benchmark::State& state) {
  const Grid g = make_grid(2, static_cast<int>(state.range(0)));
  const Field f = preset_field("two_mode", g, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dissipation(f));
  }
}
BENCHMARK(BM_dissipation)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_step_if_rk4(benchmark::State& state) {
  const Grid g = make_grid(2, static_cast<int>(state.range(0)));
  Field f = preset_field("single_mode", g, 0.2);
  SchemeSpec scheme;
  scheme.dt = 0.5 * g.h();
  for (auto _ : state) {
    f = step(f, scheme, RhsSpec{}, 1.0);
    benchmark::DoNotOptimize(f.v.data());
  }
}
BENCHMARK(BM_step_if_rk4)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_solve_constant(benchmark::State& state) {
  for (auto _ : state) {
    ConstantCertificate cert = solve_constant({2, 0.0, 500});
    benchmark::DoNotOptimize(cert.root);
  }
}
BENCHMARK(BM_solve_constant)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
