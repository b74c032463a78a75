// Timings for the hot paths: rhs, one SSP-RK3 step, Helmholtz projection, conormal norms.

#include <benchmark/benchmark.h>

#include "mhdlab/compressible.hpp"
#include "mhdlab/helmholtz.hpp"
#include "mhdlab/norms.hpp"
#include "mhdlab/state.hpp"

using namespace mhdlab;

namespace {

Grid grid_for(const benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  return build_grid(n + 1, n, 1.0, 1.0);
}

StateField data_on(const Grid& g, double lambda) {
  DataFamily d;
  d.kind = DataKind::ill_prepared;
  return make_initial_data(d, g, lambda);
}

void BM_Rhs(benchmark::State& state) {
  const Grid g = grid_for(state);
  SolverConfig c;
  c.lambda = 16.0;
  const CompressibleModel model(g, c);
  const StateField u = data_on(g, c.lambda);
  for (auto _ : state) benchmark::DoNotOptimize(model.rhs(u));
  state.SetItemsProcessed(state.iterations() * g.n1 * g.n2);
}

void BM_Step(benchmark::State& state) {
  const Grid g = grid_for(state);
  SolverConfig c;
  c.lambda = 16.0;
  const CompressibleModel model(g, c);
  const StateField u = data_on(g, c.lambda);
  const double dt = model.stable_dt(u);
  for (auto _ : state) benchmark::DoNotOptimize(model.step_ssprk3(u, dt));
}

void BM_ProjectS(benchmark::State& state) {
  const Grid g = grid_for(state);
  Helmholtz h(g);
  const StateField u = data_on(g, 4.0);
  const PlaneVector v{u[kV1], u[kV2]};
  for (auto _ : state) benchmark::DoNotOptimize(h.project_S(v));
}

void BM_NormStar2(benchmark::State& state) {
  const Grid g = grid_for(state);
  const StateField u = data_on(g, 4.0);
  NormSpec s;
  s.family = NormFamily::star2;
  s.m = 2;
  for (auto _ : state) benchmark::DoNotOptimize(norm_spatial(u, s, g).total);
}

}  // namespace

BENCHMARK(BM_Rhs)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Step)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ProjectS)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NormStar2)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
