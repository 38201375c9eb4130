// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/autodiff.hpp>
#include <synclift/rng.hpp>

#include <optional>
#include <string>
#include <vector>

namespace synclift::nn {

struct ForwardContext {
  bool training = false;
  Rng* rng = nullptr;  // required when training with dropout > 0
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct NamedBuffer {
  std::string name;
  Matrix* value;
};

class Linear {
 public:
  Linear() = default;
  Linear(Index in, Index out);

  /// Uniform(-bound, bound) with bound = sqrt(6 / ((1 + gain_slope^2) * fan_in)).
  /// Bias is zeroed.
  void init_kaiming(Rng& rng, Scalar gain_slope);
  void zero();

  Tensor forward(const Tensor& x) const { return linear(x, weight_, bias_); }

  Index in_features() const { return weight_.cols(); }
  Index out_features() const { return weight_.rows(); }
  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }
  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;

 private:
  Tensor weight_;  // out x in
  Tensor bias_;    // 1 x out
};

struct BatchNormOptions {
  Scalar momentum = 0.1;
  Scalar eps = 1e-5;
};

/// Per-feature batch normalization. Training mode normalizes with the batch
/// statistics and updates the running estimates; eval mode uses the running
/// estimates only.
class BatchNorm {
 public:
  BatchNorm() = default;
  BatchNorm(Index features, BatchNormOptions options);

  Tensor forward(const Tensor& x, const ForwardContext& ctx);

  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }
  const Matrix& running_mean() const { return running_mean_; }
  const Matrix& running_var() const { return running_var_; }
  const BatchNormOptions& options() const { return options_; }

  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
  void collect_buffers(const std::string& prefix, std::vector<NamedBuffer>& out);

 private:
  Tensor gamma_;
  Tensor beta_;
  Matrix running_mean_;
  Matrix running_var_;
  BatchNormOptions options_;
};

/// Inverted dropout; identity in eval mode or when rate is 0.
Tensor dropout(const Tensor& x, Scalar rate, const ForwardContext& ctx);

struct StageOptions {
  bool batch_norm = true;
  Scalar dropout = 0.5;
  Scalar leaky_slope = 0.2;
  BatchNormOptions bn;
};

/// Linear -> [batch norm] -> leaky ReLU -> [dropout].
class Stage {
 public:
  Stage() = default;
  Stage(Index in, Index out, StageOptions options);

  void init(Rng& rng) { linear_.init_kaiming(rng, options_.leaky_slope); }
  Tensor forward(const Tensor& x, const ForwardContext& ctx);

  Linear& linear() { return linear_; }
  std::optional<BatchNorm>& batch_norm() { return bn_; }

  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
  void collect_buffers(const std::string& prefix, std::vector<NamedBuffer>& out);

 private:
  Linear linear_;
  std::optional<BatchNorm> bn_;
  StageOptions options_;
};

/// Two stages of equal width with a skip connection around them.
class ResidualBlock {
 public:
  ResidualBlock() = default;
  ResidualBlock(Index width, StageOptions options);

  void init(Rng& rng);
  Tensor forward(const Tensor& x, const ForwardContext& ctx);

  Stage& first() { return first_; }
  Stage& second() { return second_; }

  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
  void collect_buffers(const std::string& prefix, std::vector<NamedBuffer>& out);

 private:
  Stage first_;
  Stage second_;
};

}  // namespace synclift::nn
