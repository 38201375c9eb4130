// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/types.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace synclift {

struct Bone {
  int start = 0;
  int end = 0;
  friend bool operator==(const Bone&, const Bone&) = default;
};

/// Joints used by the face/shoulder orientation loss.
struct SpecialJoints {
  int nose = 0;
  int neck = 0;
  int left_shoulder = 0;
  int right_shoulder = 0;
  friend bool operator==(const SpecialJoints&, const SpecialJoints&) = default;
};

/// Joint/bone layout of a skeleton. Validated on construction and immutable
/// afterwards.
class SkeletonTopology {
 public:
  /// Throws TopologyError naming the first offending bone or joint.
  SkeletonTopology(std::vector<std::string> joint_names, std::vector<Bone> bones, int root,
                   SpecialJoints special, std::optional<Pose3D> rest_pose = std::nullopt);

  int num_joints() const { return static_cast<int>(joint_names_.size()); }
  int num_bones() const { return static_cast<int>(bones_.size()); }
  const std::vector<std::string>& joint_names() const { return joint_names_; }
  const std::vector<Bone>& bones() const { return bones_; }
  int root() const { return root_; }
  const SpecialJoints& special() const { return special_; }

  /// Reference pose (3 x N, mm, y up) used by the synthetic generator.
  const std::optional<Pose3D>& rest_pose() const { return rest_pose_; }

  /// Index of the joint with this name, or -1.
  int find_joint(const std::string& name) const;

  /// Stable FNV-1a hash over the canonical serialization (names, bones, root,
  /// special joints). The rest pose does not participate.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  friend bool operator==(const SkeletonTopology& a, const SkeletonTopology& b) {
    return a.joint_names_ == b.joint_names_ && a.bones_ == b.bones_ && a.root_ == b.root_ &&
           a.special_ == b.special_;
  }

 private:
  std::vector<std::string> joint_names_;
  std::vector<Bone> bones_;
  int root_;
  SpecialJoints special_;
  std::optional<Pose3D> rest_pose_;
};

/// 17 joints / 16 bones, hip-rooted, in the common Human3.6M ordering.
const SkeletonTopology& default_topology();

SkeletonTopology topology_from_json(const nlohmann::json& j);
nlohmann::json topology_to_json(const SkeletonTopology& topology);
SkeletonTopology load_topology(const std::filesystem::path& path);
void save_topology(const SkeletonTopology& topology, const std::filesystem::path& path);

/// N x b matrix; column k has +1 at the start joint and -1 at the end joint of
/// bone k, zeros elsewhere. Pose (3 x N) times this gives the 3 x b bone matrix.
IntMatrix build_incidence(const SkeletonTopology& topology);

/// b x b hop counts in the graph where two bones are adjacent iff they share a
/// joint. Throws TopologyError if that graph is disconnected.
IntMatrix bone_distances(const SkeletonTopology& topology);

/// Parent of every joint in the tree rooted at the topology root (-1 for the
/// root), plus a breadth-first joint order starting at the root.
struct KinematicTree {
  std::vector<int> parent;
  std::vector<int> order;
};
KinematicTree kinematic_tree(const SkeletonTopology& topology);

}  // namespace synclift
