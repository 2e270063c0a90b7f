// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "srn/kernels.hpp"
#include "srn/rng.hpp"

namespace {

using namespace srn::kernels;

Eigen::VectorXd unit(Eigen::Index d, std::uint64_t seed) {
  srn::RandomStream rng(seed);
  Eigen::VectorXd u = rng.normal_vector(d);
  return u / u.norm();
}

template <MomentSums (*Kernel)(Moment, const Eigen::VectorXd&, const Eigen::VectorXd&, std::size_t,
                               std::uint64_t, Sampling)>
void BM_Moment(benchmark::State& state) {
  const auto d = state.range(0);
  const auto n = static_cast<std::size_t>(state.range(1));
  const Eigen::VectorXd u = unit(d, 1);
  const Eigen::VectorXd v = unit(d, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(Moment::double_wedge, u, v, n, 7, Sampling::gaussian));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <EmpiricalGradient (*Kernel)(const RowMatrix&, const Eigen::VectorXd&, const Eigen::VectorXd&, double)>
void BM_Gradient(benchmark::State& state) {
  const auto d = state.range(0);
  const auto n = state.range(1);
  srn::RandomStream rng(3);
  RowMatrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal();
  }
  const Eigen::VectorXd target = unit(d, 4);
  const Eigen::VectorXd y = (x * target).cwiseMax(0.0);
  const Eigen::VectorXd w = unit(d, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, y, w, 1.3));
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(BM_Moment<moment_sums_serial>)->Args({5, 1 << 18})->Args({10, 1 << 18})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Moment<moment_sums_parallel>)->Args({5, 1 << 18})->Args({10, 1 << 18})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gradient<empirical_gradient_serial>)->Args({20, 2000})->Args({100, 10000})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Gradient<empirical_gradient_parallel>)->Args({20, 2000})->Args({100, 10000})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
