// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/checkpoint.hpp>
#include <synclift/config.hpp>
#include <synclift/error.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_support.hpp"

namespace synclift {
namespace {

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = std::filesystem::temp_directory_path() / ("synclift_ckpt_" + std::to_string(::getpid()) + ".ckpt");
  }
  void TearDown() override { std::filesystem::remove(path_); }
  std::filesystem::path path_;
};

ModelConfig toy_model() {
  ModelConfig m;
  m.num_joints = 5;
  m.num_bones = 4;
  m.hidden_width = 8;
  m.reprojection_width = 8;
  m.critic_width = 4;
  return m;
}

TEST_F(CheckpointTest, FileRoundTripIsExact) {
  Rng rng(1);
  Checkpoint c;
  c.topology_hash = "abc";
  c.seed = 77;
  c.model = {{"x", 1}};
  c.metadata = {{"epoch", 3}};
  c.tensors["a"] = testing::random_matrix(rng, 3, 4);
  c.tensors["b"] = Eigen::MatrixXd::Constant(1, 1, 1.0 / 3.0);
  save_checkpoint(c, path_);
  const Checkpoint back = load_checkpoint(path_);
  EXPECT_EQ(back.topology_hash, "abc");
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.model, c.model);
  EXPECT_EQ(back.metadata, c.metadata);
  ASSERT_EQ(back.tensors.size(), 2u);
  EXPECT_EQ(back.tensors.at("a"), c.tensors.at("a"));
  EXPECT_EQ(back.tensors.at("b"), c.tensors.at("b"));
}

TEST_F(CheckpointTest, ModelRoundTripGivesSamePredictions) {
  const auto topo = testing::toy5();
  LiftingModel model(toy_model());
  model.init(4);
  Checkpoint c;
  c.topology_hash = topo.hash_hex();
  c.model = to_json(model.config);
  store_model(model, c);
  save_checkpoint(c, path_);
  LiftingModel back = model_from_checkpoint(load_checkpoint(path_), topo);
  Rng rng(2);
  const Matrix x = testing::random_matrix(rng, 3, 10);
  EXPECT_EQ(lift(back.generator, x), lift(model.generator, x));
}

TEST_F(CheckpointTest, TopologyMismatchIsRejected) {
  LiftingModel model(toy_model());
  model.init(4);
  Checkpoint c;
  c.topology_hash = testing::toy5().hash_hex();
  c.model = to_json(model.config);
  store_model(model, c);
  EXPECT_THROW(model_from_checkpoint(c, default_topology()), FormatError);
  c.tensors.erase(c.tensors.begin());
  EXPECT_THROW(model_from_checkpoint(c, testing::toy5()), FormatError);
}

TEST_F(CheckpointTest, BadMagicAndTruncation) {
  {
    std::ofstream out(path_, std::ios::binary);
    out << "NOTACKPT and more bytes";
  }
  EXPECT_THROW(load_checkpoint(path_), FormatError);
  Checkpoint c;
  c.tensors["a"] = Eigen::MatrixXd::Ones(10, 10);
  save_checkpoint(c, path_);
  std::filesystem::resize_file(path_, std::filesystem::file_size(path_) - 8);
  EXPECT_THROW(load_checkpoint(path_), FormatError);
}

TEST_F(CheckpointTest, OptimizerStateRoundTrip) {
  auto p = nn::Tensor::parameter(Matrix::Ones(2, 2));
  Adam opt({{"p", p}}, {});
  p.mutable_grad() = Matrix::Constant(2, 2, 0.5);
  opt.step();
  Checkpoint c;
  store_optimizer(opt, c);
  auto q = nn::Tensor::parameter(Matrix::Ones(2, 2));
  Adam other({{"p", q}}, {});
  restore_optimizer(c, other);
  EXPECT_EQ(other.states()[0].m, opt.states()[0].m);
  EXPECT_EQ(other.states()[0].v, opt.states()[0].v);
  EXPECT_EQ(other.states()[0].step, 1);
}

}  // namespace
}  // namespace synclift
