// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/autodiff.hpp>
#include <synclift/skeleton.hpp>
#include <synclift/types.hpp>

#include <span>

namespace synclift {

/// Loss values of one training iteration (batch means).
struct LossBundle {
  double l_dis = 0;
  double l_gen = 0;
  double l_rep = 0;
  double l_angle = 0;
  double lambda = 1;
};

/// mean(p_fake) - mean(p_real). Throws ShapeError on empty or unequal batches.
double critic_loss(std::span<const double> p_fake, std::span<const double> p_real);
/// -mean(p_fake) + lambda * angle. With lambda == 0 this is exactly
/// reprojection_loss(p_fake).
double generator_loss(std::span<const double> p_fake, double angle, double lambda);
/// -mean(p_fake).
double reprojection_loss(std::span<const double> p_fake);

nn::Tensor critic_loss(const nn::Tensor& p_fake, const nn::Tensor& p_real);
nn::Tensor generator_loss(const nn::Tensor& p_fake, const nn::Tensor& angle, Scalar lambda);
nn::Tensor reprojection_loss(const nn::Tensor& p_fake);

struct AngleLossOptions {
  double eps = 1e-8;    // added to |v||w|
  bool strict = false;  // throw DegenerateInputError on zero-length v or w
};

/// sin(beta) between the face vector v = nose - neck and the shoulder vector
/// w = left_shoulder - right_shoulder on the z-x plane:
/// (v_z w_x - v_x w_z) / (|v||w| + eps).
double sin_beta(const Pose3D& pose, const SpecialJoints& special, const AngleLossOptions& options = {});

/// max(0, -sin(beta)) for one pose.
double angle_loss(const Pose3D& pose, const SpecialJoints& special, const AngleLossOptions& options = {});

/// Batched, differentiable angle loss over flattened poses (batch x 3N);
/// returns the batch mean as a 1 x 1 tensor.
class AngleLoss {
 public:
  AngleLoss(int num_joints, SpecialJoints special, AngleLossOptions options = {});

  nn::Tensor operator()(const nn::Tensor& poses) const;

 private:
  int num_joints_;
  SpecialJoints special_;
  AngleLossOptions options_;
  nn::Tensor face_;      // 3N x 3, poses * face_ = v
  nn::Tensor shoulder_;  // 3N x 3, poses * shoulder_ = w
};

}  // namespace synclift
