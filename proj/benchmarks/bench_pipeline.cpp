#include "agmm/harness.hpp"
#include "agmm/moments.hpp"
#include "agmm/sparseobs.hpp"

#include <benchmark/benchmark.h>

namespace {

agmm::GeneratedPanel make_panel(int n, int d, int G) {
  agmm::DgpSpec spec;
  spec.example_id = 2;
  spec.n = n;
  spec.d = d;
  spec.seed = 42;
  return agmm::gen_example(spec, agmm::Grid::uniform(G));
}

void BM_Moments(benchmark::State& state) {
  const auto gen = make_panel(static_cast<int>(state.range(0)), 2, 100);
  agmm::MomentOptions opts;
  for (auto _ : state) {
    auto m = agmm::compute_moments(gen.W, opts);
    benchmark::DoNotOptimize(m.K.values().data());
  }
}
BENCHMARK(BM_Moments)->Arg(200)->Arg(800)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_EigenRaw(benchmark::State& state) {
  const auto gen = make_panel(400, 2, static_cast<int>(state.range(0)));
  const auto m = agmm::compute_moments(gen.W, {});
  for (auto _ : state) {
    auto dec = agmm::eigen_raw(m.K);
    benchmark::DoNotOptimize(dec.theta.data());
  }
}
BENCHMARK(BM_EigenRaw)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_AgmmEstimate(benchmark::State& state) {
  const auto gen = make_panel(800, 4, 100);
  const auto m = agmm::compute_moments(gen.W, {});
  const auto basis = agmm::make_basis(agmm::BasisKind::fourier, 15, gen.W.grid);
  for (auto _ : state) {
    auto dec = agmm::eigen_basis(m.K, basis);
    auto est = agmm::agmm_scalar(m, dec, 4);
    benchmark::DoNotOptimize(est.beta.values().data());
  }
}
BENCHMARK(BM_AgmmEstimate)->Unit(benchmark::kMillisecond);

void BM_SparseSmoother(benchmark::State& state) {
  agmm::SparseDgpSpec sp;
  sp.base.n = 400;
  sp.base.d = 2;
  sp.base.seed = 9;
  sp.m_per_curve = static_cast<int>(state.range(0));
  const agmm::Grid grid = agmm::Grid::uniform(100);
  const auto [panel, gen] = agmm::gen_sparse(sp, grid);
  agmm::SmootherSpec spec;
  spec.h_C = 0.1;
  for (auto _ : state) {
    auto C1 = agmm::smooth_autocov(panel, 1, spec, grid, 5);
    benchmark::DoNotOptimize(C1.values().data());
  }
}
BENCHMARK(BM_SparseSmoother)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
