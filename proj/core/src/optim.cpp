// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/optim.hpp>

#include <synclift/error.hpp>

#include <cmath>

namespace synclift {

void adam_update(Matrix& param, const Matrix& grad, AdamState& state, const AdamConfig& config) {
  if (grad.rows() != param.rows() || grad.cols() != param.cols()) {
    throw ShapeError("adam: gradient shape does not match parameter");
  }
  if (state.m.size() == 0) {
    state.m = Matrix::Zero(param.rows(), param.cols());
    state.v = Matrix::Zero(param.rows(), param.cols());
  }
  if (state.m.rows() != param.rows() || state.m.cols() != param.cols()) {
    throw ShapeError("adam: moment shape does not match parameter");
  }
  const auto b1 = static_cast<Scalar>(config.beta1);
  const auto b2 = static_cast<Scalar>(config.beta2);
  ++state.step;
  state.m = b1 * state.m + (1 - b1) * grad;
  state.v = b2 * state.v + (1 - b2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  const auto lr = static_cast<Scalar>(config.learning_rate);
  const auto eps = static_cast<Scalar>(config.eps);
  param.array() -= lr * (state.m.array() / static_cast<Scalar>(c1)) /
                   ((state.v.array() / static_cast<Scalar>(c2)).sqrt() + eps);
}

Adam::Adam(std::vector<nn::NamedTensor> params, AdamConfig config)
    : params_(std::move(params)), states_(params_.size()), config_(config) {
  if (!(config_.learning_rate > 0)) throw UsageError("adam: learning rate must be positive");
  if (config_.beta1 < 0 || config_.beta1 >= 1 || config_.beta2 < 0 || config_.beta2 >= 1) {
    throw UsageError("adam: betas must lie in [0, 1)");
  }
}

void Adam::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& t = params_[i].tensor;
    if (t.grad().size() == 0) t.zero_grad();
    adam_update(t.mutable_value(), t.grad(), states_[i], config_);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

}  // namespace synclift
