// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/dataio.hpp>
#include <synclift/evaluation.hpp>
#include <synclift/networks.hpp>
#include <synclift/skeleton.hpp>
#include <synclift/trainer.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace synclift {

enum class NoiseMode {
  kNoisyTrainNoisyTest,
  kNoisyTrainCleanTest,
  kZOnly,  ///< noisy train, noisy test, scored on the z component
};

std::string to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(const std::string& s);

struct NoiseBenchConfig {
  std::vector<double> sigmas = {5, 10, 15, 20};  // raw 2D units (px)
  std::vector<NoiseMode> modes = {NoiseMode::kNoisyTrainNoisyTest};
};

/// Trains one model per sigma on 2D inputs perturbed with N(0, sigma^2) and
/// scores it under every requested mode. Reports come out sigma-major in the
/// order of `bench.sigmas`, then `bench.modes`. Sigma 0 is the clean setting.
/// The noise for sigma s is drawn from a seed derived from (seed, s), so one
/// sigma can be rerun in isolation.
std::vector<EvalReport> noise_bench(const Dataset& train, const Dataset& validation, const SkeletonTopology& topology,
                                    const ModelConfig& model_config, const TrainConfig& train_config,
                                    const EvalConfig& eval_config, const NoiseBenchConfig& bench, std::uint64_t seed);

}  // namespace synclift
