// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/dataio.hpp>
#include <synclift/skeleton.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace synclift {

/// One family of synthetic poses; the joint rotation range is scaled by
/// `angle_scale`.
struct SynthAction {
  std::string name;
  double angle_scale = 1.0;
};

struct SynthConfig {
  int count = 2000;
  Camera camera;
  double distance_min = 4500;    // mm, root depth
  double distance_max = 5500;
  double lateral_range = 400;    // mm, root x/y offset from the optical axis
  double yaw_range = 1.0471975511965976;  // rad, rotation about the vertical axis
  double tilt_range = 0.1;       // rad, about the two horizontal axes
  double joint_angle_range = 0.5;  // rad, per-joint local rotation bound
  double min_depth = 500;        // mm, every joint must be at least this far in front
  int max_retries = 1000;        // per sample
  std::vector<SynthAction> actions = {{"relaxed", 0.5}, {"active", 1.0}};
};

/// Generates paired 2D/3D samples by rotating the topology's rest pose down its
/// kinematic tree, placing it in front of a perspective camera and projecting.
/// Every sample satisfies sin(beta) >= 0. Throws Error if the topology has no
/// rest pose or a sample cannot be drawn within max_retries.
Dataset synth_dataset(const SynthConfig& config, std::uint64_t seed, const SkeletonTopology& topology);

}  // namespace synclift
