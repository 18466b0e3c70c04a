#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "rtw/align.hpp"
#include "rtw/autodiff.hpp"
#include "rtw/barycenter.hpp"
#include "rtw/datasets.hpp"
#include "rtw/dtw.hpp"
#include "rtw/resample.hpp"
#include "rtw/spd.hpp"

namespace {

using namespace rtw;

void BM_DtwSphere(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const Manifold m = Manifold::sphere(1);
  const auto d = inverted_warp_dataset(m, s1_base_signal(t), 2, 1);
  const PointDistance dist = geodesic_distance(m);
  for (auto _ : state) benchmark::DoNotOptimize(dtw(d.set.signals[0], d.set.signals[1], dist).cost);
  state.SetComplexityN(t);
}
BENCHMARK(BM_DtwSphere)->RangeMultiplier(2)->Range(50, 400)->Complexity(benchmark::oNSquared);

void BM_SincResampleSphere(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const Manifold m = Manifold::sphere(2);
  Signal base(t, 3);
  for (int i = 0; i < t; ++i) {
    const double a = 0.05 * i;
    base.row(i) << std::sin(0.6) * std::cos(a), std::sin(0.6) * std::sin(a), std::cos(0.6);
  }
  const Vec gamma = dataset_warp(t, 3, WarpFamily::kMixed);
  for (auto _ : state) benchmark::DoNotOptimize(warp_signal_riemannian(m, base, gamma).data());
}
BENCHMARK(BM_SincResampleSphere)->Arg(100)->Arg(400);

void BM_FrechetMeanSpd(benchmark::State& state) {
  const Manifold m = Manifold::spd(3);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 0.4);
  std::vector<Vec> pts;
  for (int n = 0; n < state.range(0); ++n) {
    Mat s(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = g(rng);
    pts.push_back(m.exp_map(spd::to_flat(Mat::Identity(3, 3)), spd::to_flat(s)));
  }
  const Vec init = pts.front();
  for (auto _ : state) benchmark::DoNotOptimize(frechet_mean(m, pts, init).point.data());
}
BENCHMARK(BM_FrechetMeanSpd)->Arg(4)->Arg(32);

void BM_AlignEpochS1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Manifold m = Manifold::sphere(1);
  const auto d = inverted_warp_dataset(m, s1_base_signal(100), n, 2);
  AlignConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(align(m, d.set.signals, cfg).best_objective);
}
BENCHMARK(BM_AlignEpochS1)->Arg(4)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_TapeMlpBackward(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  auto random = [&](int r, int c) {
    ad::Tensor t(r, c);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = g(rng);
    return t;
  };
  const ad::Tensor x0 = random(rows, 8), w1v = random(8, 32), w2v = random(32, 32), w3v = random(32, 1);
  for (auto _ : state) {
    ad::Tape tape;
    const ad::Var x = tape.constant(x0);
    const ad::Var w1 = tape.leaf(w1v), w2 = tape.leaf(w2v), w3 = tape.leaf(w3v);
    const ad::Var h = ad::relu(ad::matmul(ad::relu(ad::matmul(x, w1)), w2));
    const ad::Var loss = ad::mean(ad::sin(ad::matmul(h, w3)));
    const std::vector<ad::Var> wrt{w1, w2, w3};
    benchmark::DoNotOptimize(tape.grad(loss, wrt).front().data());
  }
}
BENCHMARK(BM_TapeMlpBackward)->Arg(128)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
