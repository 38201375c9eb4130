// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/autodiff.hpp>
#include <synclift/skeleton.hpp>
#include <synclift/types.hpp>

#include <cstdint>
#include <string>

namespace synclift {

/// 3 x b matrix whose column k is p_start - p_end of bone k.
Eigen::MatrixXd bone_vectors(const Pose3D& pose, const IntMatrix& incidence);

/// Gram matrix B^T B of the bone vectors.
Eigen::MatrixXd kcs(const Pose3D& pose, const IntMatrix& incidence);

/// Weight of one bone pair given its bone distance d:
/// 1 for d <= 1, tanh(1 / (d - 1)) otherwise.
double kcs_weight(int distance);

/// Elementwise kcs_weight over a bone-distance matrix.
Eigen::MatrixXd kcs_weights(const IntMatrix& distances);

/// How the weight matrix W is combined with the KCS matrix.
enum class KcsCombine {
  kHadamard,  ///< W (.) KCS, entrywise
  kMatrix,    ///< W * KCS, matrix product
};

/// What the critic's third input branch sees.
enum class KcsMode {
  kPlain,     ///< unweighted KCS
  kWeighted,  ///< weighted KCS
};

std::string to_string(KcsCombine c);
KcsCombine kcs_combine_from_string(const std::string& s);

/// Per-topology caches: incidence, distances, weights. Immutable after
/// construction.
class KcsCache {
 public:
  explicit KcsCache(const SkeletonTopology& topology);

  int num_joints() const { return num_joints_; }
  int num_bones() const { return num_bones_; }
  std::uint64_t topology_hash() const { return topology_hash_; }
  const IntMatrix& incidence() const { return incidence_; }
  const IntMatrix& distances() const { return distances_; }
  const Eigen::MatrixXd& weights() const { return weights_; }

 private:
  int num_joints_;
  int num_bones_;
  std::uint64_t topology_hash_;
  IntMatrix incidence_;
  IntMatrix distances_;
  Eigen::MatrixXd weights_;
};

/// Weighted KCS of a single pose. Throws ShapeError if the pose does not match
/// the cache's topology.
Eigen::MatrixXd weighted_kcs(const Pose3D& pose, const KcsCache& cache,
                             KcsCombine combine = KcsCombine::kHadamard);

/// Batched, differentiable KCS feature: maps flattened poses (batch x 3N) to
/// row-major flattened b x b matrices (batch x b^2).
class KcsTransform {
 public:
  KcsTransform(const KcsCache& cache, KcsMode mode, KcsCombine combine = KcsCombine::kHadamard);

  nn::Tensor operator()(const nn::Tensor& poses) const;

  int num_joints() const { return num_joints_; }
  int num_bones() const { return num_bones_; }
  int feature_width() const { return num_bones_ * num_bones_; }
  KcsMode mode() const { return mode_; }

 private:
  int num_joints_;
  int num_bones_;
  KcsMode mode_;
  KcsCombine combine_;
  // Per coordinate c: 3N x b selection so that poses * select[c] is the
  // c-component of every bone vector.
  nn::Tensor coord_incidence_[3];
  nn::Tensor left_expand_;   // b x b^2, column i*b+j picks bone i
  nn::Tensor right_expand_;  // b x b^2, column i*b+j picks bone j
  RowVector hadamard_weights_;
  nn::Tensor matrix_weights_;  // b^2 x b^2 linear map for the matrix product
};

}  // namespace synclift
