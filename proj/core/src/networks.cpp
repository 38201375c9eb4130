// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/networks.hpp>

#include <synclift/error.hpp>

namespace synclift {
namespace {

nn::StageOptions hidden_options(const ModelConfig& c) {
  nn::StageOptions o;
  o.batch_norm = true;
  o.dropout = c.dropout;
  o.leaky_slope = c.leaky_slope;
  o.bn = {c.bn_momentum, c.bn_eps};
  return o;
}

nn::StageOptions critic_options(const ModelConfig& c) {
  nn::StageOptions o;
  o.batch_norm = false;
  o.dropout = 0;
  o.leaky_slope = c.leaky_slope;
  return o;
}

void check_input(const nn::Tensor& x, Index width, const char* what) {
  if (x.cols() != width) {
    throw ShapeError(std::string(what) + " expects " + std::to_string(width) + " input columns, got " +
                     std::to_string(x.cols()));
  }
  if (!x.value().allFinite()) throw InputError(std::string(what) + " input contains non-finite values");
}

void collect_trunk(const nn::Stage& input, const std::vector<nn::ResidualBlock>& blocks, const nn::Linear& output,
                   std::vector<nn::NamedTensor>& out) {
  input.collect("input.", out);
  for (std::size_t k = 0; k < blocks.size(); ++k) blocks[k].collect("block" + std::to_string(k) + ".", out);
  output.collect("output.", out);
}

void collect_trunk_buffers(nn::Stage& input, std::vector<nn::ResidualBlock>& blocks,
                           std::vector<nn::NamedBuffer>& out) {
  input.collect_buffers("input.", out);
  for (std::size_t k = 0; k < blocks.size(); ++k) blocks[k].collect_buffers("block" + std::to_string(k) + ".", out);
}

void prefix_all(std::vector<nn::NamedTensor>& v, const std::string& prefix) {
  for (auto& t : v) t.name = prefix + t.name;
}

}  // namespace

Generator::Generator(const ModelConfig& config)
    : num_joints_(config.num_joints),
      input_(2 * config.num_joints, config.hidden_width, hidden_options(config)),
      output_(config.hidden_width, config.num_joints) {
  for (int k = 0; k < config.generator_blocks; ++k) blocks_.emplace_back(config.hidden_width, hidden_options(config));
}

void Generator::init(Rng& rng) {
  input_.init(rng);
  for (auto& b : blocks_) b.init(rng);
  output_.init_kaiming(rng, 1);
}

nn::Tensor Generator::forward(const nn::Tensor& x2d, const nn::ForwardContext& ctx) {
  check_input(x2d, 2 * num_joints_, "generator");
  nn::Tensor h = input_.forward(x2d, ctx);
  for (auto& b : blocks_) h = b.forward(h, ctx);
  return output_.forward(h);
}

std::vector<nn::NamedTensor> Generator::parameters() const {
  std::vector<nn::NamedTensor> out;
  collect_trunk(input_, blocks_, output_, out);
  return out;
}

std::vector<nn::NamedBuffer> Generator::buffers() {
  std::vector<nn::NamedBuffer> out;
  collect_trunk_buffers(input_, blocks_, out);
  return out;
}

Reprojector::Reprojector(const ModelConfig& config)
    : num_joints_(config.num_joints),
      input_(3 * config.num_joints, config.reprojection_width, hidden_options(config)),
      output_(config.reprojection_width, 2 * config.num_joints) {
  for (int k = 0; k < config.reprojection_blocks; ++k) {
    blocks_.emplace_back(config.reprojection_width, hidden_options(config));
  }
}

void Reprojector::init(Rng& rng) {
  input_.init(rng);
  for (auto& b : blocks_) b.init(rng);
  output_.init_kaiming(rng, 1);
}

nn::Tensor Reprojector::forward(const nn::Tensor& y3d, const nn::ForwardContext& ctx) {
  check_input(y3d, 3 * num_joints_, "reprojection net");
  nn::Tensor h = input_.forward(y3d, ctx);
  for (auto& b : blocks_) h = b.forward(h, ctx);
  return output_.forward(h);
}

std::vector<nn::NamedTensor> Reprojector::parameters() const {
  std::vector<nn::NamedTensor> out;
  collect_trunk(input_, blocks_, output_, out);
  return out;
}

std::vector<nn::NamedBuffer> Reprojector::buffers() {
  std::vector<nn::NamedBuffer> out;
  collect_trunk_buffers(input_, blocks_, out);
  return out;
}

Critic::Critic(const ModelConfig& config)
    : num_joints_(config.num_joints),
      kcs_width_(config.num_bones * config.num_bones),
      slope_(config.leaky_slope),
      pose3d_in_(3 * config.num_joints, config.critic_width),
      pose3d_block_(config.critic_width, critic_options(config)),
      pose2d_in_(2 * config.num_joints, config.critic_width),
      kcs_in_(config.num_bones * config.num_bones, config.critic_width),
      output_(3 * config.critic_width, 1) {}

void Critic::init(Rng& rng) {
  pose3d_in_.init_kaiming(rng, slope_);
  pose3d_block_.init(rng);
  pose2d_in_.init_kaiming(rng, slope_);
  kcs_in_.init_kaiming(rng, slope_);
  output_.init_kaiming(rng, 1);
}

nn::Tensor Critic::forward(const nn::Tensor& y3d, const nn::Tensor& x2d, const nn::Tensor& kcs_feature,
                           const nn::ForwardContext& ctx) {
  check_input(y3d, 3 * num_joints_, "critic 3D branch");
  check_input(x2d, 2 * num_joints_, "critic 2D branch");
  check_input(kcs_feature, kcs_width_, "critic KCS branch");
  if (y3d.rows() != x2d.rows() || y3d.rows() != kcs_feature.rows()) {
    throw ShapeError("critic inputs have different batch sizes");
  }
  nn::Tensor f3 = nn::leaky_relu(pose3d_in_.forward(y3d), slope_);
  f3 = pose3d_block_.forward(f3, ctx);
  nn::Tensor f2 = nn::leaky_relu(pose2d_in_.forward(x2d), slope_);
  nn::Tensor fk = nn::leaky_relu(kcs_in_.forward(kcs_feature), slope_);
  return output_.forward(nn::concat_cols({f3, f2, fk}));
}

std::vector<nn::NamedTensor> Critic::parameters() const {
  std::vector<nn::NamedTensor> out;
  pose3d_in_.collect("pose3d_in.", out);
  pose3d_block_.collect("pose3d_block.", out);
  pose2d_in_.collect("pose2d_in.", out);
  kcs_in_.collect("kcs_in.", out);
  output_.collect("output.", out);
  return out;
}

nn::Tensor assemble_3d(const nn::Tensor& x2d, const nn::Tensor& z) {
  if (x2d.rows() != z.rows() || x2d.cols() != 2 * z.cols()) {
    throw ShapeError("assemble_3d: 2D poses and depths disagree on shape");
  }
  return nn::concat_cols({x2d, z});
}

Pose3D assemble_3d(const Pose2D& x2d, const Eigen::VectorXd& z) {
  if (x2d.cols() != z.size()) throw ShapeError("assemble_3d: joint counts differ");
  Pose3D out(3, x2d.cols());
  out.topRows<2>() = x2d;
  out.row(2) = z.transpose();
  return out;
}

std::pair<Pose2D, Eigen::VectorXd> split_3d(const Pose3D& pose) {
  return {pose.topRows<2>(), pose.row(2).transpose()};
}

LiftingModel::LiftingModel(const ModelConfig& c) : config(c), generator(c), reprojector(c), critic(c) {}

void LiftingModel::init(std::uint64_t seed) {
  Rng rng(seed);
  generator.init(rng);
  reprojector.init(rng);
  critic.init(rng);
}

std::vector<nn::NamedTensor> LiftingModel::parameters() const {
  std::vector<nn::NamedTensor> all;
  for (auto [prefix, list] : {std::pair{std::string("generator."), generator.parameters()},
                              std::pair{std::string("reprojector."), reprojector.parameters()},
                              std::pair{std::string("critic."), critic.parameters()}}) {
    prefix_all(list, prefix);
    all.insert(all.end(), list.begin(), list.end());
  }
  return all;
}

std::vector<nn::NamedBuffer> LiftingModel::buffers() {
  std::vector<nn::NamedBuffer> all;
  for (auto b : generator.buffers()) all.push_back({"generator." + b.name, b.value});
  for (auto b : reprojector.buffers()) all.push_back({"reprojector." + b.name, b.value});
  return all;
}

Matrix lift(Generator& generator, const Matrix& x2d) {
  nn::NoGradGuard no_grad;
  nn::ForwardContext ctx;
  ctx.training = false;
  const nn::Tensor x = nn::Tensor::constant(x2d);
  return assemble_3d(x, generator.forward(x, ctx)).value();
}

}  // namespace synclift
