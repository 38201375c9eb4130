// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/error.hpp>
#include <synclift/skeleton.hpp>

#include <gtest/gtest.h>

#include <filesystem>

#include "test_support.hpp"

namespace synclift {
namespace {

SkeletonTopology chain3() { return SkeletonTopology({"a", "b", "c"}, {{0, 1}, {1, 2}}, 0, {0, 1, 2, 0}); }

TEST(Incidence, ThreeJointChain) {
  const IntMatrix c = build_incidence(chain3());
  IntMatrix expected(3, 2);
  expected << 1, 0, -1, 1, 0, -1;
  EXPECT_EQ(c, expected);
}

TEST(Incidence, SingleBone) {
  const SkeletonTopology t({"a", "b"}, {{0, 1}}, 0, {0, 1, 0, 1});
  IntMatrix expected(2, 1);
  expected << 1, -1;
  EXPECT_EQ(build_incidence(t), expected);
}

TEST(Incidence, ReversedBoneFlipsSigns) {
  const SkeletonTopology t({"a", "b", "c"}, {{1, 0}, {1, 2}}, 0, {0, 1, 2, 0});
  const IntMatrix c = build_incidence(t);
  EXPECT_EQ(c(0, 0), -1);
  EXPECT_EQ(c(1, 0), 1);
  EXPECT_EQ(c(2, 0), 0);
}

TEST(Incidence, ColumnsSumToZeroWithTwoNonzeros) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testing::random_topology(rng, 3 + static_cast<int>(rng.index(20)), 2);
    const IntMatrix c = build_incidence(t);
    for (Index k = 0; k < c.cols(); ++k) {
      EXPECT_EQ(c.col(k).sum(), 0);
      EXPECT_EQ((c.col(k).array() != 0).count(), 2);
    }
  }
}

TEST(TopologyValidation, RejectsBadBones) {
  const SpecialJoints s{0, 1, 2, 0};
  EXPECT_THROW(SkeletonTopology({"a", "b", "c"}, {{0, 1}, {1, 3}}, 0, s), TopologyError);
  EXPECT_THROW(SkeletonTopology({"a", "b", "c"}, {{0, 1}, {1, 1}}, 0, s), TopologyError);
  EXPECT_THROW(SkeletonTopology({"a", "b", "c"}, {{0, 1}, {0, 1}}, 0, s), TopologyError);
  EXPECT_THROW(SkeletonTopology({"a", "b", "c", "d"}, {{0, 1}, {2, 3}}, 0, s), TopologyError);
  EXPECT_THROW(SkeletonTopology({"a", "a", "c"}, {{0, 1}, {1, 2}}, 0, s), TopologyError);
  EXPECT_THROW(SkeletonTopology({"a", "b", "c"}, {{0, 1}, {1, 2}}, 5, s), TopologyError);
  EXPECT_THROW(SkeletonTopology({"a", "b", "c"}, {{0, 1}, {1, 2}}, 0, {0, 0, 1, 2}), TopologyError);
}

TEST(TopologyValidation, ErrorNamesTheBone) {
  try {
    SkeletonTopology({"a", "b", "c"}, {{0, 1}, {1, 7}}, 0, {0, 1, 2, 0});
    FAIL() << "expected TopologyError";
  } catch (const TopologyError& e) {
    EXPECT_NE(std::string(e.what()).find("bone 1"), std::string::npos) << e.what();
  }
}

TEST(BoneDistances, DiagonalZeroAndSharedJointIsOne) {
  const IntMatrix d = bone_distances(chain3());
  EXPECT_EQ(d(0, 0), 0);
  EXPECT_EQ(d(1, 1), 0);
  EXPECT_EQ(d(0, 1), 1);
}

TEST(BoneDistances, MatchesBruteForceOnRandomTopologies) {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(24));
    const auto t = testing::random_topology(rng, n, static_cast<int>(rng.index(4)));
    const IntMatrix d = bone_distances(t);
    const auto oracle = testing::brute_force_bone_distances(t);
    for (int i = 0; i < t.num_bones(); ++i) {
      for (int j = 0; j < t.num_bones(); ++j) {
        ASSERT_EQ(d(i, j), oracle[i][j]) << "trial " << trial << " (" << i << "," << j << ")";
        ASSERT_EQ(d(i, j), d(j, i));
        for (int k = 0; k < t.num_bones(); ++k) ASSERT_LE(d(i, j), d(i, k) + d(k, j));
      }
    }
  }
}

TEST(DefaultTopology, RightHipRowMatchesFigure) {
  const auto& t = default_topology();
  EXPECT_EQ(t.num_joints(), 17);
  EXPECT_EQ(t.num_bones(), 16);
  const IntMatrix d = bone_distances(t);
  int ones = 0;
  int fives = 0;
  for (int j = 0; j < t.num_bones(); ++j) {
    ones += d(0, j) == 1;
    fives += d(0, j) == 5;
  }
  EXPECT_EQ(t.joint_names()[t.bones()[0].end], "right_hip");
  EXPECT_EQ(ones, 3);
  EXPECT_EQ(fives, 2);
}

TEST(TopologyJson, RoundTripAndHash) {
  const auto& t = default_topology();
  const auto back = topology_from_json(topology_to_json(t));
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.hash(), t.hash());
  ASSERT_TRUE(back.rest_pose().has_value());
  EXPECT_EQ(*back.rest_pose(), *t.rest_pose());
  EXPECT_EQ(t.hash_hex().size(), 16u);
  EXPECT_NE(chain3().hash(), t.hash());
}

TEST(TopologyJson, FileRoundTripAndUnknownField) {
  const auto path = std::filesystem::temp_directory_path() / "synclift_topology_test.json";
  save_topology(chain3(), path);
  EXPECT_EQ(load_topology(path), chain3());
  auto j = topology_to_json(chain3());
  j["colour"] = "red";
  EXPECT_THROW(topology_from_json(j), TopologyError);
  std::filesystem::remove(path);
}

TEST(KinematicTree, ParentsPointTowardRoot) {
  const auto& t = default_topology();
  const auto tree = kinematic_tree(t);
  EXPECT_EQ(tree.parent[t.root()], -1);
  EXPECT_EQ(tree.order.front(), t.root());
  EXPECT_EQ(tree.order.size(), 17u);
  EXPECT_EQ(tree.parent[t.find_joint("right_knee")], t.find_joint("right_hip"));
  EXPECT_EQ(tree.parent[t.find_joint("nose")], t.find_joint("neck"));
}

}  // namespace
}  // namespace synclift
