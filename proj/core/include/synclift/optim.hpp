// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/layers.hpp>

#include <vector>

namespace synclift {

struct AdamConfig {
  double learning_rate = 8e-5;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double eps = 1e-8;
};

struct AdamState {
  Matrix m;  // first moment
  Matrix v;  // second moment
  long step = 0;
};

/// One bias-corrected Adam step. Moments are zero-initialized on first use.
void adam_update(Matrix& param, const Matrix& grad, AdamState& state, const AdamConfig& config);

/// Adam over a fixed list of parameters sharing one config.
class Adam {
 public:
  Adam(std::vector<nn::NamedTensor> params, AdamConfig config);

  /// Applies the accumulated gradients; parameters with no gradient yet are
  /// treated as having a zero gradient.
  void step();
  void zero_grad();

  const std::vector<nn::NamedTensor>& params() const { return params_; }
  std::vector<AdamState>& states() { return states_; }
  const std::vector<AdamState>& states() const { return states_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<nn::NamedTensor> params_;
  std::vector<AdamState> states_;
  AdamConfig config_;
};

}  // namespace synclift
