// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/kcs.hpp>

#include <synclift/error.hpp>

#include <cmath>

namespace synclift {
namespace {

void check_pose(const Pose3D& pose, const IntMatrix& incidence) {
  if (pose.cols() != incidence.rows()) {
    throw ShapeError("pose has " + std::to_string(pose.cols()) + " joints but the incidence matrix expects " +
                     std::to_string(incidence.rows()));
  }
}

}  // namespace

Eigen::MatrixXd bone_vectors(const Pose3D& pose, const IntMatrix& incidence) {
  check_pose(pose, incidence);
  return pose * incidence.cast<double>();
}

Eigen::MatrixXd kcs(const Pose3D& pose, const IntMatrix& incidence) {
  const Eigen::MatrixXd b = bone_vectors(pose, incidence);
  return b.transpose() * b;
}

double kcs_weight(int distance) {
  if (distance <= 1) return 1.0;
  return std::tanh(1.0 / static_cast<double>(distance - 1));
}

Eigen::MatrixXd kcs_weights(const IntMatrix& distances) {
  Eigen::MatrixXd w(distances.rows(), distances.cols());
  for (Index i = 0; i < distances.rows(); ++i) {
    for (Index j = 0; j < distances.cols(); ++j) w(i, j) = kcs_weight(distances(i, j));
  }
  return w;
}

std::string to_string(KcsCombine c) { return c == KcsCombine::kHadamard ? "hadamard" : "matrix"; }

KcsCombine kcs_combine_from_string(const std::string& s) {
  if (s == "hadamard") return KcsCombine::kHadamard;
  if (s == "matrix") return KcsCombine::kMatrix;
  throw Error("unknown KCS weighting '" + s + "' (expected hadamard or matrix)");
}

KcsCache::KcsCache(const SkeletonTopology& topology)
    : num_joints_(topology.num_joints()),
      num_bones_(topology.num_bones()),
      topology_hash_(topology.hash()),
      incidence_(build_incidence(topology)),
      distances_(bone_distances(topology)),
      weights_(kcs_weights(distances_)) {}

Eigen::MatrixXd weighted_kcs(const Pose3D& pose, const KcsCache& cache, KcsCombine combine) {
  if (pose.cols() != cache.num_joints()) {
    throw ShapeError("pose has " + std::to_string(pose.cols()) + " joints; topology has " +
                     std::to_string(cache.num_joints()));
  }
  const Eigen::MatrixXd k = kcs(pose, cache.incidence());
  if (combine == KcsCombine::kMatrix) return cache.weights() * k;
  return cache.weights().cwiseProduct(k);
}

KcsTransform::KcsTransform(const KcsCache& cache, KcsMode mode, KcsCombine combine)
    : num_joints_(cache.num_joints()), num_bones_(cache.num_bones()), mode_(mode), combine_(combine) {
  const int n = num_joints_;
  const int b = num_bones_;
  const Matrix inc = cache.incidence().cast<Scalar>();
  for (int c = 0; c < 3; ++c) {
    Matrix sel = Matrix::Zero(3 * n, b);
    sel.middleRows(c * n, n) = inc;
    coord_incidence_[c] = nn::Tensor::constant(std::move(sel));
  }
  Matrix left = Matrix::Zero(b, b * b);
  Matrix right = Matrix::Zero(b, b * b);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < b; ++j) {
      left(i, i * b + j) = 1;
      right(j, i * b + j) = 1;
    }
  }
  left_expand_ = nn::Tensor::constant(std::move(left));
  right_expand_ = nn::Tensor::constant(std::move(right));

  hadamard_weights_.resize(b * b);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < b; ++j) hadamard_weights_(i * b + j) = static_cast<Scalar>(cache.weights()(i, j));
  }
  // (W K)_{ij} = sum_k W_ik K_kj, so on row-major flattened K the product is
  // K_flat * M with M[(k, j), (i, j)] = W_ik.
  Matrix m = Matrix::Zero(b * b, b * b);
  for (int i = 0; i < b; ++i) {
    for (int k = 0; k < b; ++k) {
      for (int j = 0; j < b; ++j) m(k * b + j, i * b + j) = static_cast<Scalar>(cache.weights()(i, k));
    }
  }
  matrix_weights_ = nn::Tensor::constant(std::move(m));
}

nn::Tensor KcsTransform::operator()(const nn::Tensor& poses) const {
  if (poses.cols() != 3 * num_joints_) {
    throw ShapeError("KCS transform expects " + std::to_string(3 * num_joints_) + " columns, got " +
                     std::to_string(poses.cols()));
  }
  nn::Tensor gram;
  for (int c = 0; c < 3; ++c) {
    const nn::Tensor bones = nn::matmul(poses, coord_incidence_[c]);
    const nn::Tensor term = nn::mul(nn::matmul(bones, left_expand_), nn::matmul(bones, right_expand_));
    gram = gram.defined() ? nn::add(gram, term) : term;
  }
  if (mode_ == KcsMode::kPlain) return gram;
  if (combine_ == KcsCombine::kMatrix) return nn::matmul(gram, matrix_weights_);
  return nn::mul_row_const(gram, hadamard_weights_);
}

}  // namespace synclift
