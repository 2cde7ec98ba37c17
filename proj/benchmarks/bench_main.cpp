#include "weak/heston.hpp"
#include "weak/rk_integrator.hpp"
#include "weak/sampling.hpp"
#include "weak/schemes.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

void BM_InverseNormal(benchmark::State& state) {
  double u = 0.0;
  for (auto _ : state) {
    u += 0.6180339887498949;
    if (u >= 1.0) u -= 1.0;
    benchmark::DoNotOptimize(weak::inv_normal_cdf(u == 0.0 ? 0.5 : u));
  }
}
BENCHMARK(BM_InverseNormal);

void BM_SobolStream(benchmark::State& state) {
  const auto source = weak::UniformSource::sobol(static_cast<std::size_t>(state.range(0)));
  auto stream = source.stream(0);
  std::vector<double> point(source.dimension());
  for (auto _ : state) {
    stream.next(point);
    benchmark::DoNotOptimize(point.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SobolStream)->Arg(6)->Arg(40)->Arg(800);

void BM_RkStep(benchmark::State& state) {
  const auto rk = weak::IntegrationScheme::builtin(state.range(0) == 5 ? "rk5-butcher" : "rk7-butcher");
  const weak::HestonModel model{weak::HestonParams{}};
  const std::vector<double> weights{0.05, 0.3, -0.2};
  auto field = [&](std::span<const double> y, std::span<double> out) { model.combined_field(weights, y, out); };
  weak::RkWorkspace ws;
  std::vector<double> y{1.0, 0.09, 0.0};
  for (auto _ : state) {
    y = {1.0, 0.09, 0.0};
    rk.step(field, y, 1.0, ws);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_RkStep)->Arg(5)->Arg(7);

void BM_HestonPath(benchmark::State& state) {
  const auto kind = static_cast<weak::SchemeKind>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const weak::HestonModel model{weak::HestonParams{}};
  const weak::PathPlan plan(kind, n, 1.0, weak::solution_params<double>(0.75, weak::Branch::lower),
                            weak::IntegrationScheme::builtin("rk5-butcher"));
  const auto source = weak::UniformSource::sobol(plan.dimension(model.brownian_dim()));
  auto stream = source.stream(0);
  std::vector<double> u(source.dimension());
  weak::StepWorkspace ws;
  std::vector<double> y(3);
  for (auto _ : state) {
    stream.next(u);
    y = {1.0, 0.09, 0.0};
    benchmark::DoNotOptimize(plan.run(model, y, u, ws));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HestonPath)
    ->Args({static_cast<int>(weak::SchemeKind::nn), 10})
    ->Args({static_cast<int>(weak::SchemeKind::nv), 10})
    ->Args({static_cast<int>(weak::SchemeKind::em), 100});

}  // namespace
BENCHMARK_MAIN();
