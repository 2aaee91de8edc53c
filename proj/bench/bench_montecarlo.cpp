#include <benchmark/benchmark.h>

#include "sphcov/concentration.hpp"
#include "sphcov/mixing.hpp"
#include "sphcov/montecarlo.hpp"
#include "sphcov/polynomial.hpp"
#include "sphcov/random.hpp"
#include "sphcov/sphere.hpp"
#include "sphcov/verify.hpp"

namespace {

using sphcov::Execution;

Execution exec_of(const benchmark::State& state) {
  return state.range(0) ? Execution::parallel : Execution::serial;
}

// Plain sphere moments: the cheapest kernel, dominated by sampling.
void BM_SphereMoments(benchmark::State& state) {
  const auto f = sphcov::Polynomial::parse("x1*x2 + x3^3", 5);
  const sphcov::CompiledPolynomial cf(f);
  for (auto _ : state) {
    auto m = sphcov::monte_carlo(
        200'000, 7, 1,
        [&](sphcov::Rng& rng, std::span<double> out) {
          thread_local std::vector<double> x(5);
          sphcov::draw_sphere(rng, x);
          out[0] = cf(x.data());
        },
        exec_of(state));
    benchmark::DoNotOptimize(m.mean(0));
  }
  state.SetItemsProcessed(state.iterations() * 200'000);
}
BENCHMARK(BM_SphereMoments)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

void BM_SphereFirstIdentity(benchmark::State& state) {
  sphcov::CheckOptions opt;
  opt.samples = 100'000;
  opt.exec = exec_of(state);
  const auto f = sphcov::Polynomial::parse("x1*x2", 4);
  sphcov::cached_mixing_constant(4, 1);
  sphcov::MuSampler::get(4, 1);
  for (auto _ : state) {
    auto r = sphcov::check_sphere_first(f, f, opt);
    benchmark::DoNotOptimize(r.lhs);
  }
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_SphereFirstIdentity)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

void BM_DeviationExperiment(benchmark::State& state) {
  const auto f = sphcov::Polynomial::parse("x1", 10);
  const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5};
  for (auto _ : state) {
    auto ex = sphcov::deviation_experiment(f, grid, 200'000, 3, exec_of(state));
    benchmark::DoNotOptimize(ex.mean_abs_dev);
  }
  state.SetItemsProcessed(state.iterations() * 200'000);
}
BENCHMARK(BM_DeviationExperiment)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
