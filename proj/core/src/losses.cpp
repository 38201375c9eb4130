// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/losses.hpp>

#include <synclift/error.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace synclift {
namespace {

// Keeps sqrt differentiable at zero-length vectors; far below any real norm.
constexpr double kNormFloor = 1e-24;
constexpr double kStrictMinNorm = 1e-12;

double batch_mean(std::span<const double> v) {
  if (v.empty()) throw ShapeError("loss over an empty batch");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double critic_loss(std::span<const double> p_fake, std::span<const double> p_real) {
  if (p_fake.size() != p_real.size()) throw ShapeError("critic loss: fake and real batches differ in size");
  return batch_mean(p_fake) - batch_mean(p_real);
}

double generator_loss(std::span<const double> p_fake, double angle, double lambda) {
  if (lambda == 0) return reprojection_loss(p_fake);
  return -batch_mean(p_fake) + lambda * angle;
}

double reprojection_loss(std::span<const double> p_fake) { return -batch_mean(p_fake); }

nn::Tensor critic_loss(const nn::Tensor& p_fake, const nn::Tensor& p_real) {
  if (p_fake.rows() != p_real.rows()) throw ShapeError("critic loss: fake and real batches differ in size");
  return nn::sub(nn::mean(p_fake), nn::mean(p_real));
}

nn::Tensor generator_loss(const nn::Tensor& p_fake, const nn::Tensor& angle, Scalar lambda) {
  if (lambda == 0) return reprojection_loss(p_fake);
  return nn::add(nn::neg(nn::mean(p_fake)), nn::scale(angle, lambda));
}

nn::Tensor reprojection_loss(const nn::Tensor& p_fake) { return nn::neg(nn::mean(p_fake)); }

double sin_beta(const Pose3D& pose, const SpecialJoints& s, const AngleLossOptions& options) {
  const Eigen::Vector3d v = pose.col(s.nose) - pose.col(s.neck);
  const Eigen::Vector3d w = pose.col(s.left_shoulder) - pose.col(s.right_shoulder);
  if (options.strict && (v.norm() < kStrictMinNorm || w.norm() < kStrictMinNorm)) {
    throw DegenerateInputError("angle loss: face or shoulder vector has zero length");
  }
  const double denom = std::sqrt(v.squaredNorm() + kNormFloor) * std::sqrt(w.squaredNorm() + kNormFloor) + options.eps;
  return (v.z() * w.x() - v.x() * w.z()) / denom;
}

double angle_loss(const Pose3D& pose, const SpecialJoints& special, const AngleLossOptions& options) {
  return std::max(0.0, -sin_beta(pose, special, options));
}

AngleLoss::AngleLoss(int num_joints, SpecialJoints special, AngleLossOptions options)
    : num_joints_(num_joints), special_(special), options_(options) {
  const int n = num_joints;
  Matrix face = Matrix::Zero(3 * n, 3);
  Matrix shoulder = Matrix::Zero(3 * n, 3);
  for (int c = 0; c < 3; ++c) {
    face(c * n + special.nose, c) += 1;
    face(c * n + special.neck, c) -= 1;
    shoulder(c * n + special.left_shoulder, c) += 1;
    shoulder(c * n + special.right_shoulder, c) -= 1;
  }
  face_ = nn::Tensor::constant(std::move(face));
  shoulder_ = nn::Tensor::constant(std::move(shoulder));
}

nn::Tensor AngleLoss::operator()(const nn::Tensor& poses) const {
  if (poses.cols() != 3 * num_joints_) throw ShapeError("angle loss: pose width mismatch");
  const nn::Tensor v = nn::matmul(poses, face_);
  const nn::Tensor w = nn::matmul(poses, shoulder_);
  if (options_.strict) {
    const auto vn = v.value().rowwise().norm();
    const auto wn = w.value().rowwise().norm();
    if ((vn.array() < kStrictMinNorm).any() || (wn.array() < kStrictMinNorm).any()) {
      throw DegenerateInputError("angle loss: face or shoulder vector has zero length");
    }
  }
  auto column = [](const nn::Tensor& t, Index c) { return nn::slice_cols(t, c, 1); };
  // -sin(beta) numerator: v_x w_z - v_z w_x
  const nn::Tensor cross = nn::sub(nn::mul(column(v, 0), column(w, 2)), nn::mul(column(v, 2), column(w, 0)));
  const nn::Tensor v_norm = nn::pow(nn::add_scalar(nn::sum_cols(nn::mul(v, v)), kNormFloor), 0.5);
  const nn::Tensor w_norm = nn::pow(nn::add_scalar(nn::sum_cols(nn::mul(w, w)), kNormFloor), 0.5);
  const nn::Tensor denom = nn::add_scalar(nn::mul(v_norm, w_norm), static_cast<Scalar>(options_.eps));
  const nn::Tensor neg_sin = nn::mul(cross, nn::pow(denom, -1));
  return nn::mean(nn::leaky_relu(neg_sin, 0));
}

}  // namespace synclift
