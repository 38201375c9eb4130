// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/types.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

// Reverse-mode differentiation over 2-D matrices (rows = batch samples).
//
// Every op's backward rule is written in terms of other ops, so gradients can
// themselves be differentiated when requested with create_graph = true (used by
// the gradient-penalty term).

namespace synclift::nn {

class Tensor;

struct Node {
  Matrix value;
  Matrix grad;  // accumulated by backward() on leaves only
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<Tensor> inputs;
  std::function<std::vector<Tensor>(const Tensor& grad_output)> backward;
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix value, bool requires_grad = false);

  static Tensor constant(Matrix value) { return Tensor(std::move(value), false); }
  static Tensor parameter(Matrix value) { return Tensor(std::move(value), true); }
  static Tensor scalar(Scalar v);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  /// Only valid on leaves; used by optimizers and initializers.
  Matrix& mutable_value();
  const Matrix& grad() const { return node_->grad; }
  Matrix& mutable_grad() { return node_->grad; }
  void zero_grad();

  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool is_leaf() const { return node_ && node_->is_leaf; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  Scalar item() const;

  /// Same value, cut from the graph.
  Tensor detach() const { return constant(value()); }

  Node* node() const { return node_.get(); }

 private:
  friend Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                            std::function<std::vector<Tensor>(const Tensor&)> backward);
  std::shared_ptr<Node> node_;
};

/// Builds an op result, recording the graph only if grad mode is on and some
/// input requires a gradient.
Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                   std::function<std::vector<Tensor>(const Tensor&)> backward);

bool grad_enabled();

/// Disables graph recording for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Accumulates d(output)/d(leaf) into every reachable leaf's grad(). The output
/// must be 1 x 1. Throws UsageError if the output has no recorded graph.
void backward(const Tensor& output);

/// Returns d(output)/d(inputs). Inputs not reachable get a zero tensor. With
/// create_graph the returned tensors are themselves differentiable.
std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& inputs, bool create_graph = false);

// --- ops -------------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, Scalar s);
Tensor add_scalar(const Tensor& a, Scalar s);
/// Elementwise product with a constant of the same shape.
Tensor mul_const(const Tensor& a, const Matrix& m);
/// Multiplies every row elementwise by a constant row.
Tensor mul_row_const(const Tensor& a, const RowVector& row);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
/// x * W^T + bias, with W stored out x in and bias 1 x out.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);
/// Adds a 1 x n row to every row of a.
Tensor add_row(const Tensor& a, const Tensor& row);
Tensor sum_rows(const Tensor& a);                       // m x n -> 1 x n
Tensor broadcast_rows(const Tensor& row, Index rows);   // 1 x n -> m x n
Tensor sum_cols(const Tensor& a);                       // m x n -> m x 1
Tensor broadcast_cols(const Tensor& col, Index cols);   // m x 1 -> m x n
Tensor sum(const Tensor& a);                            // -> 1 x 1
Tensor mean(const Tensor& a);                           // -> 1 x 1
Tensor broadcast_scalar(const Tensor& s, Index rows, Index cols);
Tensor pow(const Tensor& a, Scalar exponent);
/// max(x, slope * x); slope 0 gives ReLU.
Tensor leaky_relu(const Tensor& a, Scalar slope);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, Index start, Index count);
/// Embeds a into a zero matrix with `total` columns at column offset `start`.
Tensor pad_cols(const Tensor& a, Index start, Index total);

}  // namespace synclift::nn
