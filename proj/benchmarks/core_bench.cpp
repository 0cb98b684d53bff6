#include <benchmark/benchmark.h>

#include "lrr/affine_operator.hpp"
#include "lrr/numerics.hpp"
#include "lrr/penalty.hpp"
#include "lrr/rng.hpp"
#include "lrr/solver.hpp"

namespace {

using namespace lrr;

Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix x(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) x(i, j) = rng.next_gaussian();
  return x;
}

Matrix random_low_rank(Rng& rng, int n, int rank) {
  return random_matrix(rng, n, rank) * random_matrix(rng, n, rank).transpose();
}

void BM_FullSvd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const Matrix x = random_matrix(rng, n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svd(x));
  }
}
BENCHMARK(BM_FullSvd)->Arg(50)->Arg(100)->Arg(200);

void BM_SoftThreshold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const Matrix y = random_matrix(rng, n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(soft_threshold(y, 1.0));
  }
}
BENCHMARK(BM_SoftThreshold)->Arg(50)->Arg(100)->Arg(200);

void BM_MaskApplyAdjoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const auto op = sample_mask(n, n, n * n / 2, 5);
  const Matrix x = random_matrix(rng, n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.adjoint(op.apply(x)));
  }
}
BENCHMARK(BM_MaskApplyAdjoint)->Arg(100)->Arg(400);

void BM_InnerStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const Matrix truth = random_low_rank(rng, n, 5);
  const auto op = sample_mask(n, n, n * n / 2, 7);
  const Vector b = op.apply(truth);
  const Matrix zero = Matrix::Zero(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        inner_solve(op, b, 0.99, LambdaPolicy::adaptive(), 5, zero, zero, 1e-2, 1));
  }
}
BENCHMARK(BM_InnerStep)->Arg(50)->Arg(100);

void BM_RtrdcSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(5);
  const Matrix truth = random_low_rank(rng, n, 5);
  const auto op = sample_mask(n, n, n * n / 2, 9);
  const Vector b = op.apply(truth);
  RtrdcConfig config;
  config.target_rank = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rtrdc_solve(op, b, config));
  }
}
BENCHMARK(BM_RtrdcSolve)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
