// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace synclift {

#if defined(SYNCLIFT_USE_FLOAT32)
using Scalar = float;
#else
using Scalar = double;
#endif

using Index = Eigen::Index;

/// Row-major so that one row is one sample of a batch.
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
using ColVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// 2 x N joint coordinates, one column per joint.
using Pose2D = Eigen::Matrix<double, 2, Eigen::Dynamic>;
/// 3 x N joint coordinates, one column per joint.
using Pose3D = Eigen::Matrix<double, 3, Eigen::Dynamic>;

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

// Flattened poses are coordinate-major: [x_0..x_{N-1}, y_0..y_{N-1}, z_0..z_{N-1}].
RowVector flatten(const Pose2D& pose);
RowVector flatten(const Pose3D& pose);
Pose2D unflatten2d(const Eigen::Ref<const RowVector>& row, Index num_joints);
Pose3D unflatten3d(const Eigen::Ref<const RowVector>& row, Index num_joints);

}  // namespace synclift
