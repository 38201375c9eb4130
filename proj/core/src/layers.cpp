// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/layers.hpp>

#include <synclift/error.hpp>

#include <cmath>

namespace synclift::nn {

Linear::Linear(Index in, Index out)
    : weight_(Tensor::parameter(Matrix::Zero(out, in))), bias_(Tensor::parameter(Matrix::Zero(1, out))) {}

void Linear::init_kaiming(Rng& rng, Scalar gain_slope) {
  const double fan_in = static_cast<double>(in_features());
  const double bound = std::sqrt(6.0 / ((1.0 + gain_slope * gain_slope) * fan_in));
  Matrix& w = weight_.mutable_value();
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) w(i, j) = static_cast<Scalar>(rng.uniform(-bound, bound));
  }
  bias_.mutable_value().setZero();
}

void Linear::zero() {
  weight_.mutable_value().setZero();
  bias_.mutable_value().setZero();
}

void Linear::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + "weight", weight_});
  out.push_back({prefix + "bias", bias_});
}

BatchNorm::BatchNorm(Index features, BatchNormOptions options)
    : gamma_(Tensor::parameter(Matrix::Ones(1, features))),
      beta_(Tensor::parameter(Matrix::Zero(1, features))),
      running_mean_(Matrix::Zero(1, features)),
      running_var_(Matrix::Ones(1, features)),
      options_(options) {
  if (!(options_.eps > 0)) throw UsageError("batch norm epsilon must be positive");
}

Tensor BatchNorm::forward(const Tensor& x, const ForwardContext& ctx) {
  const Index m = x.rows();
  if (x.cols() != gamma_.cols()) throw ShapeError("batch norm: feature count mismatch");
  if (!ctx.training) {
    RowVector inv = (running_var_.array() + options_.eps).rsqrt().matrix();
    Tensor centred = add_row(x, Tensor::constant(-running_mean_));
    Tensor normed = mul_row_const(centred, inv);
    return add_row(mul(normed, broadcast_rows(gamma_, m)), beta_);
  }
  if (m < 2) throw UsageError("batch norm in training mode needs a batch of at least 2");

  const Scalar inv_m = Scalar(1) / static_cast<Scalar>(m);
  Tensor mu = scale(sum_rows(x), inv_m);
  Tensor centred = sub(x, broadcast_rows(mu, m));
  Tensor var = scale(sum_rows(mul(centred, centred)), inv_m);
  Tensor inv_std = pow(add_scalar(var, options_.eps), Scalar(-0.5));
  Tensor normed = mul(centred, broadcast_rows(inv_std, m));

  const Scalar mom = options_.momentum;
  const Scalar unbias = static_cast<Scalar>(m) / static_cast<Scalar>(m - 1);
  running_mean_ = (1 - mom) * running_mean_ + mom * mu.value();
  running_var_ = (1 - mom) * running_var_ + mom * unbias * var.value();

  return add_row(mul(normed, broadcast_rows(gamma_, m)), beta_);
}

void BatchNorm::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + "gamma", gamma_});
  out.push_back({prefix + "beta", beta_});
}

void BatchNorm::collect_buffers(const std::string& prefix, std::vector<NamedBuffer>& out) {
  out.push_back({prefix + "running_mean", &running_mean_});
  out.push_back({prefix + "running_var", &running_var_});
}

Tensor dropout(const Tensor& x, Scalar rate, const ForwardContext& ctx) {
  if (!ctx.training || rate <= 0) return x;
  if (rate >= 1) throw UsageError("dropout rate must be below 1");
  if (!ctx.rng) throw UsageError("dropout in training mode needs a random source");
  const Scalar keep = 1 - rate;
  Matrix mask(x.rows(), x.cols());
  for (Index i = 0; i < mask.rows(); ++i) {
    for (Index j = 0; j < mask.cols(); ++j) mask(i, j) = ctx.rng->bernoulli(keep) ? 1 / keep : 0;
  }
  return mul_const(x, mask);
}

Stage::Stage(Index in, Index out, StageOptions options) : linear_(in, out), options_(options) {
  if (options_.batch_norm) bn_.emplace(out, options_.bn);
}

Tensor Stage::forward(const Tensor& x, const ForwardContext& ctx) {
  Tensor h = linear_.forward(x);
  if (bn_) h = bn_->forward(h, ctx);
  h = leaky_relu(h, options_.leaky_slope);
  return dropout(h, options_.dropout, ctx);
}

void Stage::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  linear_.collect(prefix + "linear.", out);
  if (bn_) bn_->collect(prefix + "bn.", out);
}

void Stage::collect_buffers(const std::string& prefix, std::vector<NamedBuffer>& out) {
  if (bn_) bn_->collect_buffers(prefix + "bn.", out);
}

ResidualBlock::ResidualBlock(Index width, StageOptions options)
    : first_(width, width, options), second_(width, width, options) {}

void ResidualBlock::init(Rng& rng) {
  first_.init(rng);
  second_.init(rng);
}

Tensor ResidualBlock::forward(const Tensor& x, const ForwardContext& ctx) {
  Tensor h = first_.forward(x, ctx);
  h = second_.forward(h, ctx);
  return add(x, h);
}

void ResidualBlock::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  first_.collect(prefix + "stage1.", out);
  second_.collect(prefix + "stage2.", out);
}

void ResidualBlock::collect_buffers(const std::string& prefix, std::vector<NamedBuffer>& out) {
  first_.collect_buffers(prefix + "stage1.", out);
  second_.collect_buffers(prefix + "stage2.", out);
}

}  // namespace synclift::nn
