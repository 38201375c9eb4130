// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/evaluation.hpp>
#include <synclift/kcs.hpp>
#include <synclift/losses.hpp>
#include <synclift/networks.hpp>
#include <synclift/rng.hpp>
#include <synclift/skeleton.hpp>

#include <benchmark/benchmark.h>

#include <random>

namespace {

using synclift::Matrix;
using synclift::Pose3D;
namespace nn = synclift::nn;

Matrix random_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(gen);
  return m;
}

void BM_WeightedKcsSingle(benchmark::State& state) {
  const synclift::KcsCache cache(synclift::default_topology());
  const Pose3D pose = random_matrix(1, 3, cache.num_joints());
  for (auto _ : state) {
    benchmark::DoNotOptimize(synclift::weighted_kcs(pose, cache));
  }
}
BENCHMARK(BM_WeightedKcsSingle);

void BM_KcsTransformBatch(benchmark::State& state) {
  const synclift::KcsCache cache(synclift::default_topology());
  const synclift::KcsTransform transform(cache, synclift::KcsMode::kWeighted);
  const auto poses = nn::Tensor::constant(random_matrix(2, state.range(0), 3 * cache.num_joints()));
  nn::NoGradGuard no_grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transform(poses).value().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KcsTransformBatch)->Arg(32)->Arg(256);

void BM_GeneratorForward(benchmark::State& state) {
  synclift::ModelConfig config;
  config.hidden_width = static_cast<int>(state.range(1));
  synclift::Generator generator(config);
  synclift::Rng rng(3);
  generator.init(rng);
  const auto x = nn::Tensor::constant(random_matrix(4, state.range(0), 2 * config.num_joints));
  const nn::ForwardContext ctx{false, nullptr};
  nn::NoGradGuard no_grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generator.forward(x, ctx).value().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratorForward)->Args({32, 256})->Args({256, 1024});

void BM_GeneratorBackward(benchmark::State& state) {
  synclift::ModelConfig config;
  config.hidden_width = static_cast<int>(state.range(1));
  synclift::Generator generator(config);
  synclift::Rng rng(5);
  generator.init(rng);
  const auto x = nn::Tensor::constant(random_matrix(6, state.range(0), 2 * config.num_joints));
  auto params = generator.parameters();
  for (auto _ : state) {
    const nn::ForwardContext ctx{true, &rng};
    nn::backward(nn::sum(generator.forward(x, ctx)));
    for (auto& p : params) p.tensor.zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratorBackward)->Args({32, 256})->Args({256, 1024});

void BM_ProcrustesAlign(benchmark::State& state) {
  const Pose3D gt = random_matrix(7, 3, 17);
  const Pose3D pred = gt + 0.1 * random_matrix(8, 3, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(synclift::procrustes_align(pred, gt));
  }
}
BENCHMARK(BM_ProcrustesAlign);

void BM_AngleLossBatch(benchmark::State& state) {
  const auto& topology = synclift::default_topology();
  const synclift::AngleLoss loss(topology.num_joints(), topology.special());
  const auto poses = nn::Tensor::constant(random_matrix(9, state.range(0), 3 * topology.num_joints()));
  nn::NoGradGuard no_grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss(poses).value()(0, 0));
  }
}
BENCHMARK(BM_AngleLossBatch)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
