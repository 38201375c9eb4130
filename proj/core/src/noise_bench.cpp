// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/noise_bench.hpp>

#include <synclift/error.hpp>

#include <cstdio>

namespace synclift {

std::string to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::kNoisyTrainNoisyTest:
      return "noisy-train-noisy-test";
    case NoiseMode::kNoisyTrainCleanTest:
      return "noisy-train-clean-test";
    case NoiseMode::kZOnly:
      return "z-only";
  }
  return "unknown";
}

NoiseMode noise_mode_from_string(const std::string& s) {
  if (s == "noisy-train-noisy-test") return NoiseMode::kNoisyTrainNoisyTest;
  if (s == "noisy-train-clean-test") return NoiseMode::kNoisyTrainCleanTest;
  if (s == "z-only") return NoiseMode::kZOnly;
  throw UsageError("unknown noise mode '" + s +
                   "' (expected noisy-train-noisy-test, noisy-train-clean-test or z-only)");
}

std::vector<EvalReport> noise_bench(const Dataset& train, const Dataset& validation, const SkeletonTopology& topology,
                                    const ModelConfig& model_config, const TrainConfig& train_config,
                                    const EvalConfig& eval_config, const NoiseBenchConfig& bench, std::uint64_t seed) {
  if (bench.modes.empty()) throw UsageError("noise bench needs at least one mode");
  for (double s : bench.sigmas) {
    if (!(s >= 0)) throw UsageError("noise sigmas must be non-negative");
  }
  std::vector<EvalReport> reports;
  for (double sigma : bench.sigmas) {
    char role[64];
    std::snprintf(role, sizeof(role), "noise-bench.sigma=%.17g", sigma);
    const std::uint64_t noise_seed = derive_seed(seed, role);

    const TrainingData noisy = prepare_training_data(train, validation, topology, train_config, sigma, sigma, noise_seed);
    // Model initialization and batching use the same seed for every sigma;
    // only the noise differs.
    const TrainingResult trained =
        run_training(noisy, topology, model_config, train_config, derive_seed(seed, "noise-bench.train"));
    LiftingModel model = model_from_checkpoint(trained.final_checkpoint, topology);

    PoseArrays clean;
    bool have_clean = false;
    for (NoiseMode mode : bench.modes) {
      EvalReport r;
      if (mode == NoiseMode::kNoisyTrainCleanTest) {
        if (!have_clean) {
          clean = to_arrays(validation, topology, NormalizeOptions{train_config.normalize_include_root});
          have_clean = true;
        }
        r = evaluate(model.generator, clean, eval_config);
      } else if (mode == NoiseMode::kZOnly) {
        EvalConfig z = eval_config;
        z.z_alignment = ZAlignment::kProcrustes;
        r = evaluate(model.generator, noisy.validation, z);
      } else {
        r = evaluate(model.generator, noisy.validation, eval_config);
      }
      r.label = to_string(mode);
      r.noise_sigma = sigma;
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

}  // namespace synclift
