#include "ttcov/estimators.hpp"
#include "ttcov/linalg.hpp"
#include "ttcov/random.hpp"
#include "ttcov/rearrange.hpp"
#include "ttcov/synthgen.hpp"
#include "ttcov/tensor.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace ttcov;

Tensor3 gaussian_tensor(Index d1, Index d2, Index d3, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor3 t({d1, d2, d3});
  for (double& v : t.data()) v = normal(rng);
  return t;
}

void BM_Unfold(benchmark::State& state) {
  const Index d = state.range(0);
  const int mode = static_cast<int>(state.range(1));
  const Tensor3 t = gaussian_tensor(d, d, d, 1);
  for (auto _ : state) benchmark::DoNotOptimize(unfold(t, mode));
  state.SetBytesProcessed(state.iterations() * t.size() * static_cast<std::int64_t>(sizeof(double)));
}
BENCHMARK(BM_Unfold)->ArgsProduct({{50, 100}, {1, 2, 3}});

void BM_ModeProduct(benchmark::State& state) {
  const Index d = state.range(0);
  const int mode = static_cast<int>(state.range(1));
  const Tensor3 t = gaussian_tensor(d, d, d, 2);
  Rng rng(3);
  const Matrix m = gaussian_matrix(10, d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mode_product(m, t, mode));
}
BENCHMARK(BM_ModeProduct)->ArgsProduct({{50, 100}, {1, 3}});

void BM_Rearrange(benchmark::State& state) {
  const Index p = state.range(0);
  Rng rng(4);
  const Matrix s = gaussian_matrix(p * p * p, p * p * p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(rearrange(s, {p, p, p}));
}
BENCHMARK(BM_Rearrange)->Arg(6)->Arg(10);

void BM_LeadingSvd(benchmark::State& state) {
  SvdOptions opts;
  opts.method = state.range(0) == 0 ? SvdMethod::exact : SvdMethod::randomized;
  const Tensor3 t = gaussian_tensor(100, 100, 100, 5);
  const Matrix m1 = unfold(t, 1);
  for (auto _ : state) benchmark::DoNotOptimize(leading_left_singular_vectors(m1, 10, opts));
  state.SetLabel(state.range(0) == 0 ? "exact" : "randomized");
}
BENCHMARK(BM_LeadingSvd)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_HardTTh(benchmark::State& state) {
  const Index d = state.range(0);
  const TensorInstance inst = gen_tensor_instance({d, d, d}, 5, 5, {}, 0.1, 6);
  SvdOptions opts;
  opts.method = state.range(1) == 0 ? SvdMethod::exact : SvdMethod::randomized;
  for (auto _ : state) benchmark::DoNotOptimize(hardtth(inst.y, 5, 5, 10, opts, TtInit::independent));
  state.SetLabel(state.range(1) == 0 ? "exact" : "randomized");
}
BENCHMARK(BM_HardTTh)->ArgsProduct({{20, 50}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_SampleCovariance(benchmark::State& state) {
  Rng rng(7);
  const Matrix x = gaussian_matrix(state.range(0), 1000, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sample_covariance(x));
}
BENCHMARK(BM_SampleCovariance)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SampleObservations(benchmark::State& state) {
  const GroundTruth gt = gen_ground_truth({10, 10, 10}, 7, 9, {}, 8);
  for (auto _ : state) benchmark::DoNotOptimize(sample_observations(gt, state.range(0), 9));
}
BENCHMARK(BM_SampleObservations)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
