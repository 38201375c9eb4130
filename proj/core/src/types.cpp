// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/types.hpp>

#include <synclift/error.hpp>

namespace synclift {
namespace {

template <int Rows>
RowVector flatten_impl(const Eigen::Matrix<double, Rows, Eigen::Dynamic>& pose) {
  const Index n = pose.cols();
  RowVector row(Rows * n);
  for (int c = 0; c < Rows; ++c) {
    for (Index j = 0; j < n; ++j) row(c * n + j) = static_cast<Scalar>(pose(c, j));
  }
  return row;
}

template <int Rows>
Eigen::Matrix<double, Rows, Eigen::Dynamic> unflatten_impl(const Eigen::Ref<const RowVector>& row,
                                                           Index n) {
  if (row.size() != Rows * n) {
    throw ShapeError("flattened pose has " + std::to_string(row.size()) + " values, expected " +
                     std::to_string(Rows * n));
  }
  Eigen::Matrix<double, Rows, Eigen::Dynamic> pose(Rows, n);
  for (int c = 0; c < Rows; ++c) {
    for (Index j = 0; j < n; ++j) pose(c, j) = static_cast<double>(row(c * n + j));
  }
  return pose;
}

}  // namespace

RowVector flatten(const Pose2D& pose) { return flatten_impl<2>(pose); }
RowVector flatten(const Pose3D& pose) { return flatten_impl<3>(pose); }
Pose2D unflatten2d(const Eigen::Ref<const RowVector>& row, Index num_joints) {
  return unflatten_impl<2>(row, num_joints);
}
Pose3D unflatten3d(const Eigen::Ref<const RowVector>& row, Index num_joints) {
  return unflatten_impl<3>(row, num_joints);
}

}  // namespace synclift
