// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/error.hpp>
#include <synclift/networks.hpp>

#include <gtest/gtest.h>

#include <limits>
#include <set>

#include "test_support.hpp"

namespace synclift {
namespace {

using testing::random_matrix;

ModelConfig small_config() {
  ModelConfig c;
  c.num_joints = 5;
  c.num_bones = 4;
  c.hidden_width = 16;
  c.reprojection_width = 12;
  c.critic_width = 8;
  return c;
}

TEST(Networks, OutputShapes) {
  LiftingModel model(small_config());
  model.init(1);
  Rng rng(2);
  const nn::ForwardContext ctx{true, &rng};
  const auto x2d = nn::Tensor::constant(random_matrix(rng, 4, 10));
  const auto y3d = nn::Tensor::constant(random_matrix(rng, 4, 15));
  const auto k = nn::Tensor::constant(random_matrix(rng, 4, 16));
  EXPECT_EQ(model.generator.forward(x2d, ctx).cols(), 5);
  EXPECT_EQ(model.reprojector.forward(y3d, ctx).cols(), 10);
  const auto p = model.critic.forward(y3d, x2d, k, ctx);
  EXPECT_EQ(p.rows(), 4);
  EXPECT_EQ(p.cols(), 1);
}

TEST(Networks, ZeroOutputLayerGivesZero) {
  LiftingModel model(small_config());
  model.init(3);
  model.generator.output_layer().zero();
  model.critic.output_layer().zero();
  Rng rng(4);
  const nn::ForwardContext ctx{true, &rng};
  const auto x2d = nn::Tensor::constant(random_matrix(rng, 3, 10));
  EXPECT_TRUE(model.generator.forward(x2d, ctx).value().isZero(0));
  const auto p = model.critic.forward(nn::Tensor::constant(random_matrix(rng, 3, 15)), x2d,
                                      nn::Tensor::constant(random_matrix(rng, 3, 16)), ctx);
  EXPECT_TRUE(p.value().isZero(0));
}

TEST(Networks, EvalModeIsDeterministicAndPerSample) {
  LiftingModel model(small_config());
  model.init(5);
  Rng rng(6);
  const Matrix x = random_matrix(rng, 6, 10);
  const Matrix a = lift(model.generator, x);
  EXPECT_EQ(a, lift(model.generator, x));
  // a sample's output does not depend on the rest of the batch
  EXPECT_TRUE(lift(model.generator, x.topRows(1)).isApprox(a.topRows(1), 1e-12));
  EXPECT_EQ(a.leftCols(10), x);
}

TEST(Networks, SameSeedSameWeights) {
  LiftingModel a(small_config());
  LiftingModel b(small_config());
  a.init(9);
  b.init(9);
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  std::set<std::string> names;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].name, pb[i].name);
    EXPECT_EQ(pa[i].tensor.value(), pb[i].tensor.value());
    EXPECT_TRUE(names.insert(pa[i].name).second) << pa[i].name;
  }
}

TEST(Networks, NonFiniteInputRejected) {
  LiftingModel model(small_config());
  model.init(7);
  Matrix x = Matrix::Zero(2, 10);
  x(1, 3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(lift(model.generator, x), InputError);
  EXPECT_THROW(lift(model.generator, Matrix::Zero(2, 9)), ShapeError);
}

TEST(Networks, AssembleSplitRoundTrip) {
  Rng rng(8);
  Pose3D p(3, 5);
  p = random_matrix(rng, 3, 5);
  const auto [xy, z] = split_3d(p);
  EXPECT_EQ(assemble_3d(xy, z), p);
  const Matrix flat2d = flatten(Pose2D(xy));
  const auto z_t = nn::Tensor::constant(Matrix(z.transpose()));
  const Matrix back = assemble_3d(nn::Tensor::constant(flat2d), z_t).value();
  EXPECT_EQ(unflatten3d(back.row(0), 5), p);
}

}  // namespace
}  // namespace synclift
