// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/autodiff.hpp>
#include <synclift/error.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace synclift::nn {
namespace {

using testing::gradient_check;
using testing::random_matrix;

TEST(Autodiff, SquareAtThree) {
  auto x = Tensor::parameter(Matrix::Constant(1, 1, 3));
  backward(pow(x, 2));
  EXPECT_DOUBLE_EQ(x.grad()(0, 0), 6.0);
}

TEST(Autodiff, BackwardWithoutGraphIsUsageError) {
  EXPECT_THROW(backward(Tensor::constant(Matrix::Ones(1, 1))), UsageError);
  auto x = Tensor::parameter(Matrix::Ones(2, 2));
  EXPECT_THROW(backward(x), UsageError);
  EXPECT_THROW(backward(add(x, x)), UsageError);  // not a scalar
}

TEST(Autodiff, NoGradGuardSkipsRecording) {
  auto x = Tensor::parameter(Matrix::Ones(1, 1));
  Tensor y;
  {
    NoGradGuard g;
    EXPECT_FALSE(grad_enabled());
    y = scale(x, 2);
  }
  EXPECT_TRUE(grad_enabled());
  EXPECT_FALSE(y.requires_grad());
  EXPECT_THROW(backward(y), UsageError);
}

TEST(Autodiff, GradientsAccumulateUntilZeroed) {
  auto x = Tensor::parameter(Matrix::Constant(1, 1, 2));
  backward(mul(x, x));
  backward(mul(x, x));
  EXPECT_DOUBLE_EQ(x.grad()(0, 0), 8.0);
  x.zero_grad();
  EXPECT_DOUBLE_EQ(x.grad()(0, 0), 0.0);
}

TEST(Autodiff, ElementwiseOpsMatchFiniteDifferences) {
  Rng rng(1);
  auto a = Tensor::parameter(random_matrix(rng, 3, 4));
  auto b = Tensor::parameter(random_matrix(rng, 3, 4));
  const Matrix probe = random_matrix(rng, 3, 4);
  auto loss = [&] {
    Tensor t = add(mul(a, b), sub(scale(a, 0.5), neg(b)));
    t = add_scalar(t, 0.3);
    t = mul_const(t, probe);
    return sum(pow(t, 2));
  };
  EXPECT_LT(gradient_check(loss, {a, b}), 1e-6);
}

TEST(Autodiff, ShapeOpsMatchFiniteDifferences) {
  Rng rng(2);
  auto a = Tensor::parameter(random_matrix(rng, 4, 3));
  auto b = Tensor::parameter(random_matrix(rng, 3, 5));
  auto r = Tensor::parameter(random_matrix(rng, 1, 5));
  auto c = Tensor::parameter(random_matrix(rng, 4, 1));
  RowVector row = random_matrix(rng, 1, 5);
  auto loss = [&] {
    Tensor m = matmul(a, b);                                    // 4 x 5
    m = add_row(m, r);
    m = mul_row_const(m, row);
    m = add(m, broadcast_cols(c, 5));
    Tensor cat = concat_cols({m, transpose(matmul(transpose(b), transpose(a)))});
    Tensor part = slice_cols(cat, 3, 6);                        // 4 x 6
    Tensor padded = pad_cols(part, 2, 9);
    Tensor s = add(sum_cols(pow(padded, 2)), broadcast_rows(mean(padded), 4));
    return add(sum(s), sum(broadcast_rows(sum_rows(padded), 2)));
  };
  EXPECT_LT(gradient_check(loss, {a, b, r, c}), 1e-6);
}

TEST(Autodiff, LeakyReluAndScalarBroadcast) {
  Rng rng(3);
  auto a = Tensor::parameter(random_matrix(rng, 5, 4));
  auto s = Tensor::parameter(Matrix::Constant(1, 1, 0.7));
  auto loss = [&] { return sum(pow(add(leaky_relu(a, 0.2), broadcast_scalar(s, 5, 4)), 2)); };
  EXPECT_LT(gradient_check(loss, {a, s}), 1e-6);
}

TEST(Autodiff, LinearMatchesFiniteDifferences) {
  Rng rng(4);
  auto x = Tensor::parameter(random_matrix(rng, 6, 3));
  auto w = Tensor::parameter(random_matrix(rng, 4, 3));
  auto b = Tensor::parameter(random_matrix(rng, 1, 4));
  auto loss = [&] { return sum(pow(linear(x, w, b), 3)); };
  EXPECT_LT(gradient_check(loss, {x, w, b}), 1e-6);
}

TEST(Autodiff, DoubleBackwardOfSquareNorm) {
  // f(x) = sum(x^3); |df/dx|^2 = sum(9 x^4); d/dx = 36 x^3.
  Rng rng(5);
  auto x = Tensor::parameter(random_matrix(rng, 2, 3));
  const auto g = grad(sum(pow(x, 3)), {x}, /*create_graph=*/true);
  backward(sum(pow(g[0], 2)));
  const Matrix expected = (36 * x.value().array().cube()).matrix();
  EXPECT_LT(testing::relative_error(x.grad(), expected), 1e-12);
}

TEST(Autodiff, GradOfUnreachableInputIsZero) {
  auto x = Tensor::parameter(Matrix::Ones(2, 2));
  auto y = Tensor::parameter(Matrix::Ones(3, 1));
  const auto g = grad(sum(x), {x, y});
  EXPECT_TRUE(g[0].value().isOnes(0));
  EXPECT_TRUE(g[1].value().isZero(0));
}

TEST(Autodiff, ShapeMismatchThrows) {
  auto a = Tensor::constant(Matrix::Ones(2, 2));
  auto b = Tensor::constant(Matrix::Ones(2, 3));
  EXPECT_THROW(add(a, b), ShapeError);
  EXPECT_THROW(matmul(b, b), ShapeError);
}

}  // namespace
}  // namespace synclift::nn
