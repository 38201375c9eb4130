// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/synth.hpp>

#include <synclift/error.hpp>
#include <synclift/losses.hpp>

#include <Eigen/Geometry>

namespace synclift {
namespace {

Eigen::Matrix3d random_rotation(Rng& rng, double max_angle) {
  Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
  if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitY();
  const double angle = rng.uniform(-max_angle, max_angle);
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Pose3D sample_pose(const SynthConfig& config, const SynthAction& action, const SkeletonTopology& topology,
                   const KinematicTree& tree, Rng& rng) {
  const Pose3D& rest = *topology.rest_pose();
  const int n = topology.num_joints();
  const double range = config.joint_angle_range * action.angle_scale;

  std::vector<Eigen::Matrix3d> accumulated(n);
  Pose3D pose(3, n);
  const double yaw = rng.uniform(-config.yaw_range, config.yaw_range);
  const double pitch = rng.uniform(-config.tilt_range, config.tilt_range);
  const double roll = rng.uniform(-config.tilt_range, config.tilt_range);
  const Eigen::Matrix3d global = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
                                  Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()) *
                                  Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()))
                                     .toRotationMatrix();
  const Eigen::Vector3d root(rng.uniform(-config.lateral_range, config.lateral_range),
                             rng.uniform(-config.lateral_range, config.lateral_range),
                             rng.uniform(config.distance_min, config.distance_max));
  for (int j : tree.order) {
    const int p = tree.parent[j];
    if (p < 0) {
      accumulated[j] = global;
      pose.col(j) = root;
      continue;
    }
    accumulated[j] = accumulated[p] * random_rotation(rng, range);
    pose.col(j) = pose.col(p) + accumulated[j] * (rest.col(j) - rest.col(p));
  }
  return pose;
}

}  // namespace

Dataset synth_dataset(const SynthConfig& config, std::uint64_t seed, const SkeletonTopology& topology) {
  if (!topology.rest_pose()) throw Error("synthetic generation needs a topology with a rest_pose");
  if (config.count < 0) throw UsageError("synthetic sample count must be non-negative");
  if (config.actions.empty()) throw UsageError("synthetic generation needs at least one action");
  if (!(config.distance_min > 0 && config.distance_max >= config.distance_min)) {
    throw UsageError("synthetic distance range must be positive and ordered");
  }

  Rng rng(seed);
  const auto tree = kinematic_tree(topology);
  Dataset ds;
  ds.header.corpus = Corpus::k3D;
  ds.header.num_joints = topology.num_joints();
  ds.header.topology_hash = topology.hash_hex();
  ds.header.camera = config.camera;

  for (int i = 0; i < config.count; ++i) {
    const auto& action = config.actions[rng.index(config.actions.size())];
    bool accepted = false;
    for (int attempt = 0; attempt < config.max_retries && !accepted; ++attempt) {
      Pose3D pose = sample_pose(config, action, topology, tree, rng);
      if ((pose.row(2).array() < config.min_depth).any()) continue;
      if (sin_beta(pose, topology.special()) < 0) continue;
      PoseSample s;
      s.joints2d = project(pose, config.camera);
      s.joints3d = std::move(pose);
      s.action = action.name;
      ds.samples.push_back(std::move(s));
      accepted = true;
    }
    if (!accepted) {
      throw Error("could not draw synthetic sample " + std::to_string(i) + " within " +
                  std::to_string(config.max_retries) + " attempts (camera too close or ranges too wide?)");
    }
  }
  return ds;
}

}  // namespace synclift
