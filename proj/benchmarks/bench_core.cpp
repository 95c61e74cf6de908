#include "kramers/fourier.hpp"
#include "kramers/gaussian_lab.hpp"
#include "kramers/ring_model.hpp"
#include "kramers/rng.hpp"
#include "kramers/witten_spectrum.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace kramers;

namespace {

Vector random_state(int n) {
  RandomStream rng(1, 0);
  Vector x(n);
  for (int k = 0; k < n; ++k) x[k] = rng.normal();
  return x;
}

void BM_ApplyK(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RingParameters p(n, 2.0, 0.1);
  const Vector x = random_state(n);
  for (auto _ : state) benchmark::DoNotOptimize(apply_K(p, x));
  state.SetComplexityN(n);
}
BENCHMARK(BM_ApplyK)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_ApplyKFourier(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RingParameters p(n, 2.0, 0.1);
  const Vector x = random_state(n);
  for (auto _ : state) benchmark::DoNotOptimize(apply_K_fourier(p, x));
}
BENCHMARK(BM_ApplyKFourier)->RangeMultiplier(4)->Range(16, 4096);

void BM_FFT(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<fourier::Complex> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = {static_cast<double>(k % 7), 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(fourier::forward(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FFT)->RangeMultiplier(4)->Range(16, 16384)->Complexity(benchmark::oNLogN);

void BM_Energy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RingParameters p(n, 2.0, 0.1);
  const Vector x = random_state(n);
  for (auto _ : state) benchmark::DoNotOptimize(energy(p, x));
}
BENCHMARK(BM_Energy)->RangeMultiplier(4)->Range(16, 4096);

void BM_GaussianDraw(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RingParameters p(n, 2.0, 0.1);
  const GaussianOperator op = build_operator(p, 0.0, 2.0);
  RandomStream rng(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(draw_gaussian(op, p, rng));
}
BENCHMARK(BM_GaussianDraw)->RangeMultiplier(4)->Range(4, 1024);

void BM_WittenN1(benchmark::State& state) {
  WittenProblem problem(RingParameters(1, 2.0, 0.1));
  problem.certify = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_spectrum(problem, 0.1));
}
BENCHMARK(BM_WittenN1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
