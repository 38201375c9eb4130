// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/layers.hpp>
#include <synclift/types.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace synclift {

struct ModelConfig {
  int num_joints = 17;
  int num_bones = 16;
  int hidden_width = 1024;        // generator
  int reprojection_width = 1024;  // reprojection net
  int critic_width = 100;         // per critic branch, before concatenation
  int generator_blocks = 2;
  int reprojection_blocks = 1;
  Scalar dropout = 0.5;
  Scalar leaky_slope = 0.2;
  Scalar bn_momentum = 0.1;
  Scalar bn_eps = 1e-5;
};

/// Lifts flattened 2D poses (batch x 2N) to per-joint depth (batch x N).
class Generator {
 public:
  explicit Generator(const ModelConfig& config);

  void init(Rng& rng);
  nn::Tensor forward(const nn::Tensor& x2d, const nn::ForwardContext& ctx);

  nn::Linear& output_layer() { return output_; }
  std::vector<nn::NamedTensor> parameters() const;
  std::vector<nn::NamedBuffer> buffers();

 private:
  int num_joints_;
  nn::Stage input_;
  std::vector<nn::ResidualBlock> blocks_;
  nn::Linear output_;
};

/// Maps flattened 3D poses (batch x 3N) back to 2D (batch x 2N).
class Reprojector {
 public:
  explicit Reprojector(const ModelConfig& config);

  void init(Rng& rng);
  nn::Tensor forward(const nn::Tensor& y3d, const nn::ForwardContext& ctx);

  nn::Linear& output_layer() { return output_; }
  std::vector<nn::NamedTensor> parameters() const;
  std::vector<nn::NamedBuffer> buffers();

 private:
  int num_joints_;
  nn::Stage input_;
  std::vector<nn::ResidualBlock> blocks_;
  nn::Linear output_;
};

/// Wasserstein critic over (3D pose, 2D pose, KCS feature) triples. Each part
/// goes through its own branch; the three feature vectors are concatenated and
/// mapped to one unbounded score. No batch normalization anywhere, so the
/// score of a sample does not depend on the rest of its batch.
class Critic {
 public:
  explicit Critic(const ModelConfig& config);

  void init(Rng& rng);
  nn::Tensor forward(const nn::Tensor& y3d, const nn::Tensor& x2d, const nn::Tensor& kcs_feature,
                     const nn::ForwardContext& ctx);

  nn::Linear& output_layer() { return output_; }
  std::vector<nn::NamedTensor> parameters() const;

 private:
  int num_joints_;
  int kcs_width_;
  Scalar slope_;
  nn::Linear pose3d_in_;
  nn::ResidualBlock pose3d_block_;
  nn::Linear pose2d_in_;
  nn::Linear kcs_in_;
  nn::Linear output_;
};

/// Concatenates flattened 2D poses (batch x 2N) and depths (batch x N) into
/// flattened 3D poses (batch x 3N); x and y pass through unchanged.
nn::Tensor assemble_3d(const nn::Tensor& x2d, const nn::Tensor& z);
Pose3D assemble_3d(const Pose2D& x2d, const Eigen::VectorXd& z);
std::pair<Pose2D, Eigen::VectorXd> split_3d(const Pose3D& pose);

/// The three networks trained together.
struct LiftingModel {
  explicit LiftingModel(const ModelConfig& config);

  /// Deterministic initialization from a seed.
  void init(std::uint64_t seed);

  ModelConfig config;
  Generator generator;
  Reprojector reprojector;
  Critic critic;

  /// Names are prefixed with "generator.", "reprojector." or "critic.".
  std::vector<nn::NamedTensor> parameters() const;
  std::vector<nn::NamedBuffer> buffers();
};

/// Eval-mode lifting of normalized flattened 2D poses to flattened 3D poses.
Matrix lift(Generator& generator, const Matrix& x2d);

}  // namespace synclift
