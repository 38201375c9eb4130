// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/dataio.hpp>
#include <synclift/error.hpp>
#include <synclift/kcs.hpp>
#include <synclift/losses.hpp>
#include <synclift/synth.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "test_support.hpp"

namespace synclift {
namespace {

Dataset small_synth(std::uint64_t seed, int count = 20) {
  SynthConfig cfg;
  cfg.count = count;
  return synth_dataset(cfg, seed, default_topology());
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

void expect_format_error_on_line(const std::string& text, int line) {
  try {
    dataset_from_string(text);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos) << e.what();
  }
}

TEST(Normalize, TwoJointExample) {
  Pose2D p(2, 2);
  p << 2, 2, 3, 7;
  const auto [n, rec] = normalize(p, 0);
  EXPECT_DOUBLE_EQ(rec.scale_ratio, 2.0);
  EXPECT_EQ(rec.root, Eigen::Vector2d(2, 3));
  Pose2D expected(2, 2);
  expected << 0, 0, 0, 2;
  EXPECT_TRUE(n.isApprox(expected, 1e-15));
  // leaving the root out of the average doubles the ratio here
  EXPECT_DOUBLE_EQ(normalize(p, 0, {false}).second.scale_ratio, 4.0);
}

TEST(Normalize, IdempotentInvertibleAndScaleEquivariant) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Pose3D p = testing::random_matrix(rng, 3, 17, 300);
    const auto [n, rec] = normalize(p, 0);
    EXPECT_NEAR(n.col(0).norm(), 0.0, 1e-12);
    const auto [nn, rec2] = normalize(n, 0);
    EXPECT_TRUE(nn.isApprox(n, 1e-12));
    EXPECT_NEAR(rec2.scale_ratio, 1.0, 1e-12);
    EXPECT_TRUE(denormalize(n, rec).isApprox(p, 1e-12));
    const Pose3D scaled = (p * 7.5).colwise() + Eigen::Vector3d(10, -4, 2);
    const auto [ns, recs] = normalize(scaled, 0);
    EXPECT_TRUE(ns.isApprox(n, 1e-12));
    EXPECT_NEAR(recs.scale_ratio, 7.5 * rec.scale_ratio, 1e-9 * recs.scale_ratio);
  }
}

TEST(Normalize, DegenerateThrows) {
  EXPECT_THROW(normalize(Pose2D(Pose2D::Constant(2, 4, 3)), 0), DegenerateInputError);
}

TEST(Dataset, StringAndFileRoundTrip) {
  const Dataset d = small_synth(3, 5);
  const std::string text = dataset_to_string(d);
  const Dataset back = dataset_from_string(text);
  ASSERT_EQ(back.samples.size(), 5u);
  EXPECT_EQ(dataset_to_string(back), text);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.samples[i].joints2d, d.samples[i].joints2d);
    EXPECT_EQ(*back.samples[i].joints3d, *d.samples[i].joints3d);
    EXPECT_EQ(back.samples[i].action, d.samples[i].action);
  }
  const auto path = std::filesystem::temp_directory_path() / "synclift_dataio_test.jsonl";
  save_dataset(d, path);
  EXPECT_EQ(dataset_to_string(load_dataset(path)), text);
  std::filesystem::remove(path);
  EXPECT_THROW(load_dataset(path), FormatError);
}

TEST(Dataset, ErrorsCarryLineNumbers) {
  auto lines = lines_of(dataset_to_string(small_synth(4, 3)));
  auto broken = lines;
  broken[2] = "{not json";
  expect_format_error_on_line(join(broken), 3);

  broken = lines;
  broken[3].insert(1, "\"mood\":\"happy\",");
  expect_format_error_on_line(join(broken), 4);

  broken = lines;
  const auto pos = broken[1].find("],[");
  broken[1].erase(pos, broken[1].find("],[", pos + 1) - pos);  // drop one 2D joint
  expect_format_error_on_line(join(broken), 2);

  broken = lines;
  const auto v = broken[0].find("\"version\":1");
  broken[0].replace(v, 11, "\"version\":9");
  expect_format_error_on_line(join(broken), 1);

  EXPECT_THROW(dataset_from_string(""), FormatError);
}

TEST(Dataset, MissingThreeDInThreeDCorpus) {
  Dataset d = small_synth(5, 2);
  d.samples[1].joints3d.reset();
  EXPECT_THROW(dataset_from_string(dataset_to_string(d)), FormatError);
  EXPECT_THROW(validate_dataset(d, default_topology()), FormatError);
  d.header.corpus = Corpus::k2D;
  d.samples[0].joints3d.reset();
  EXPECT_NO_THROW(validate_dataset(dataset_from_string(dataset_to_string(d)), default_topology()));
}

TEST(Dataset, TopologyMismatch) {
  Dataset d = small_synth(6, 2);
  EXPECT_THROW(validate_dataset(d, testing::toy5()), FormatError);
  d.header.topology_hash = "0000000000000000";
  EXPECT_THROW(validate_dataset(d, default_topology()), FormatError);
}

TEST(Synth, DeterministicAndPlausible) {
  const Dataset a = small_synth(7, 50);
  EXPECT_EQ(dataset_to_string(a), dataset_to_string(small_synth(7, 50)));
  EXPECT_NE(dataset_to_string(a), dataset_to_string(small_synth(8, 50)));
  const auto& t = default_topology();
  const auto& cam = *a.header.camera;
  for (const auto& s : a.samples) {
    ASSERT_TRUE(s.joints3d);
    EXPECT_GE(sin_beta(*s.joints3d, t.special()), 0.0);
    EXPECT_GT(s.joints3d->row(2).minCoeff(), 0.0);
    // 2D is the exact projection of 3D
    EXPECT_TRUE(project(*s.joints3d, cam).isApprox(s.joints2d, 1e-12));
    EXPECT_FALSE(s.action.empty());
  }
}

TEST(Synth, BoneLengthsFollowRestPose) {
  const auto& t = default_topology();
  const auto c = build_incidence(t);
  const auto rest = bone_vectors(*t.rest_pose(), c).colwise().norm().eval();
  for (const auto& s : small_synth(9, 10).samples) {
    const auto len = bone_vectors(*s.joints3d, c).colwise().norm().eval();
    EXPECT_LT((len - rest).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Projection, PinholeExample) {
  Pose3D p(3, 1);
  p << 100, -200, 2000;
  const Pose2D uv = project(p, Camera{1000, 500, 400});
  EXPECT_DOUBLE_EQ(uv(0, 0), 550);
  EXPECT_DOUBLE_EQ(uv(1, 0), 300);
}

TEST(Arrays, NormalizedIndependently) {
  const Dataset d = small_synth(10, 6);
  const auto a = to_arrays(d, default_topology());
  ASSERT_EQ(a.size(), 6);
  ASSERT_TRUE(a.has_3d());
  for (Index i = 0; i < a.size(); ++i) {
    const auto [n2, r2] = normalize(d.samples[i].joints2d, 0);
    const auto [n3, r3] = normalize(*d.samples[i].joints3d, 0);
    EXPECT_TRUE(unflatten2d(a.x2d.row(i), 17).isApprox(n2, 1e-14));
    EXPECT_TRUE(unflatten3d(a.y3d.row(i), 17).isApprox(n3, 1e-14));
    EXPECT_DOUBLE_EQ(a.ratio2d[i], r2.scale_ratio);
    EXPECT_DOUBLE_EQ(a.ratio3d[i], r3.scale_ratio);
  }
}

TEST(Noise, ZeroSigmaIsIdentityAndNoiseIsSeeded) {
  const Dataset d = small_synth(11, 30);
  Rng r0(1);
  EXPECT_EQ(dataset_to_string(add_2d_noise(d, 0, r0)), dataset_to_string(d));
  Rng r1(2);
  Rng r2(2);
  const Dataset a = add_2d_noise(d, 10, r1);
  EXPECT_EQ(dataset_to_string(a), dataset_to_string(add_2d_noise(d, 10, r2)));
  double sq = 0;
  long n = 0;
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    EXPECT_EQ(*a.samples[i].joints3d, *d.samples[i].joints3d);
    sq += (a.samples[i].joints2d - d.samples[i].joints2d).squaredNorm();
    n += d.samples[i].joints2d.size();
  }
  EXPECT_NEAR(std::sqrt(sq / n), 10.0, 1.0);
}

TEST(Shuffle, DeterministicPermutation) {
  const Dataset d = small_synth(12, 15);
  Rng a(5);
  Rng b(5);
  const Dataset s = shuffled(d, a);
  EXPECT_EQ(dataset_to_string(s), dataset_to_string(shuffled(d, b)));
  EXPECT_NE(dataset_to_string(s), dataset_to_string(d));
  std::multiset<double> before;
  std::multiset<double> after;
  for (std::size_t i = 0; i < 15; ++i) {
    before.insert(d.samples[i].joints2d(0, 0));
    after.insert(s.samples[i].joints2d(0, 0));
  }
  EXPECT_EQ(before, after);
}

TEST(Split, UnpairedCorporaAreDisjoint) {
  const Dataset d = small_synth(13, 10);
  const auto [two, three] = split_unpaired(d, 0.4);
  EXPECT_EQ(two.samples.size(), 4u);
  EXPECT_EQ(three.samples.size(), 6u);
  EXPECT_EQ(two.header.corpus, Corpus::k2D);
  for (const auto& s : two.samples) EXPECT_FALSE(s.joints3d);
  for (const auto& s : three.samples) EXPECT_TRUE(s.joints3d);
  EXPECT_EQ(three.samples[0].joints2d, d.samples[4].joints2d);
}

}  // namespace
}  // namespace synclift
