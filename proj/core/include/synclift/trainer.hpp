// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/checkpoint.hpp>
#include <synclift/dataio.hpp>
#include <synclift/evaluation.hpp>
#include <synclift/kcs.hpp>
#include <synclift/losses.hpp>
#include <synclift/networks.hpp>
#include <synclift/optim.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace synclift {

enum class LipschitzMode {
  kClip,             ///< clamp every critic parameter to [-clip_bound, clip_bound]
  kGradientPenalty,  ///< penalty_weight * (|grad D(interpolate)| - 1)^2
};

std::string to_string(LipschitzMode mode);
LipschitzMode lipschitz_mode_from_string(const std::string& s);

struct TrainConfig {
  double learning_rate = 8e-5;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double adam_eps = 1e-8;
  double lambda = 1.0;
  int batch_size = 256;
  int epochs = 20;
  int critic_steps_per_gen_step = 1;
  LipschitzMode lipschitz_mode = LipschitzMode::kClip;
  double clip_bound = 0.01;
  double penalty_weight = 10.0;
  bool use_weighted_kcs = true;
  KcsCombine kcs_combine = KcsCombine::kHadamard;
  /// false: the reprojection net is first fitted alone to the 3D corpus
  /// (supervised, reprojection_pretrain_epochs) and then frozen during GAN
  /// training.
  bool synchronous = true;
  int reprojection_pretrain_epochs = 5;
  /// Debug only: draw 2D inputs and real 3D poses from the same samples.
  bool paired = false;
  /// Share of a 3D training file that becomes the 2D-only corpus.
  double unpaired_fraction = 0.5;
  int checkpoint_every = 0;  // epochs; 0 writes only the final checkpoint
  bool strict_angle = false;
  bool normalize_include_root = true;

  /// Throws UsageError on an invalid combination.
  void validate() const;
};

/// One batch for a training step. The 2D inputs and the real 3D poses are
/// independent draws in the default (unpaired) setting.
struct TrainBatch {
  Matrix x2d;       // B x 2N generator input
  Matrix y3d_real;  // B' x 3N
  Matrix x2d_real;  // B' x 2N, the 2D counterpart of y3d_real
};

class Trainer {
 public:
  Trainer(const SkeletonTopology& topology, const ModelConfig& model_config, const TrainConfig& config,
          std::uint64_t seed);

  /// critic_steps_per_gen_step critic updates followed by one generator (and,
  /// when synchronous, reprojection) update, all on `batch`. Throws
  /// NumericalError on a non-finite loss or parameter.
  LossBundle train_step(const TrainBatch& batch);

  /// One critic update; returns L_dis (including any gradient penalty).
  double critic_step(const TrainBatch& batch);
  /// One generator/reprojection update; fills l_gen, l_rep, l_angle.
  LossBundle generator_step(const TrainBatch& batch);
  /// One supervised reprojection update on real pairs; returns the MSE.
  double reprojection_pretrain_step(const Matrix& y3d, const Matrix& x2d);

  /// Clamps critic parameters in clip mode; no-op in penalty mode.
  void enforce_lipschitz();
  /// Gradient penalty at per-sample interpolates of the real and fake critic
  /// inputs (differentiable w.r.t. the critic parameters).
  nn::Tensor gradient_penalty(const nn::Tensor& y_real, const nn::Tensor& x_real, const nn::Tensor& k_real,
                              const nn::Tensor& y_fake, const nn::Tensor& x_fake, const nn::Tensor& k_fake);

  /// Critic input feature for flattened 3D poses (KCS or weighted KCS).
  nn::Tensor kcs_feature(const nn::Tensor& poses) const { return kcs_(poses); }

  LiftingModel& model() { return model_; }
  const TrainConfig& config() const { return config_; }
  const SkeletonTopology& topology() const { return topology_; }
  Rng& rng() { return rng_; }
  Adam& generator_optimizer() { return gen_opt_; }
  Adam& reprojector_optimizer() { return rep_opt_; }
  Adam& critic_optimizer() { return critic_opt_; }

  struct UpdateCounts {
    long generator = 0;
    long reprojector = 0;
    long critic = 0;
  };
  const UpdateCounts& update_counts() const { return counts_; }

  /// Snapshot of parameters and optimizer state.
  Checkpoint snapshot() const;
  void restore(const Checkpoint& checkpoint);

 private:
  void check_finite(const char* what) const;

  SkeletonTopology topology_;
  TrainConfig config_;
  KcsCache cache_;
  KcsTransform kcs_;
  AngleLoss angle_;
  LiftingModel model_;
  Rng rng_;
  Adam gen_opt_;
  Adam rep_opt_;
  Adam critic_opt_;
  UpdateCounts counts_;
  std::uint64_t seed_;
};

struct TrainingData {
  PoseArrays inputs2d;  // generator inputs (2D corpus)
  PoseArrays real3d;    // critic's real samples (3D corpus)
  PoseArrays validation;
};

/// Splits a 3D training dataset into unpaired 2D/3D corpora (or pairs them in
/// debug mode), normalizes everything, and optionally perturbs the 2D inputs.
TrainingData prepare_training_data(const Dataset& train, const Dataset& validation, const SkeletonTopology& topology,
                                   const TrainConfig& config, double input_noise_sigma = 0,
                                   double validation_noise_sigma = 0, std::uint64_t noise_seed = 0);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // checkpoints, loss log, report
  std::ostream* loss_log = nullptr;              // CSV: step,l_dis,l_gen,l_rep,l_angle
  nlohmann::json provenance;                     // echoed into artifacts
  EvalConfig eval;
  /// Called after every epoch with (epoch, mean losses of that epoch).
  std::function<void(int, const LossBundle&)> on_epoch;
};

struct TrainingResult {
  EvalReport initial_report;  // untrained model on the validation split
  EvalReport final_report;
  std::vector<LossBundle> epoch_losses;
  long iterations = 0;
  Checkpoint final_checkpoint;
};

/// Full training run. Fixed seed and inputs give a bitwise-identical loss log.
/// On a non-finite loss the last good epoch snapshot is written to
/// out_dir/last_good.ckpt before the NumericalError propagates.
TrainingResult run_training(const TrainingData& data, const SkeletonTopology& topology,
                            const ModelConfig& model_config, const TrainConfig& config, std::uint64_t seed,
                            const RunOptions& options = {});

}  // namespace synclift
