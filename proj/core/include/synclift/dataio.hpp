// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/rng.hpp>
#include <synclift/skeleton.hpp>
#include <synclift/types.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace synclift {

struct Camera {
  double focal = 1000;
  double center_x = 500;
  double center_y = 500;
  friend bool operator==(const Camera&, const Camera&) = default;
};

/// Perspective projection u = f x / z + cx, v = f y / z + cy.
Pose2D project(const Pose3D& camera_frame_pose, const Camera& camera);

struct PoseSample {
  Pose2D joints2d;
  std::optional<Pose3D> joints3d;
  std::string action;  // empty when unknown
  std::optional<Camera> camera;
};

enum class Corpus {
  k2D,  ///< 2D joints only
  k3D,  ///< 2D and 3D joints on every sample
};

struct DatasetHeader {
  static constexpr int kVersion = 1;
  Corpus corpus = Corpus::k3D;
  int num_joints = 0;
  std::string topology_hash;  // hex, may be empty
  std::string units_2d = "px";
  std::string units_3d = "mm";
  std::optional<Camera> camera;
  nlohmann::json provenance;  // effective config of the producing command; null if absent
};

struct Dataset {
  DatasetHeader header;
  std::vector<PoseSample> samples;
};

/// Line-delimited JSON: one header record, then one sample per line. See
/// docs/FORMATS.md.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
std::string dataset_to_string(const Dataset& dataset);

/// Throws FormatError (with the 1-based line number) on malformed content,
/// unknown fields, version mismatch or joint-count inconsistencies.
Dataset load_dataset(const std::filesystem::path& path);
Dataset dataset_from_string(const std::string& text);

/// Checks the dataset against a topology (joint count, and topology hash when
/// the file carries one). Throws FormatError.
void validate_dataset(const Dataset& dataset, const SkeletonTopology& topology);

struct NormalizationRecord {
  Eigen::VectorXd root;  // original-unit root position
  double scale_ratio = 1;
};

struct NormalizeOptions {
  /// Average the joint-to-root distance over all joints including the root
  /// itself (which contributes 0). When false the root is left out.
  bool include_root = true;
};

/// Root-centres the pose and divides by the mean joint-to-root distance.
/// Throws DegenerateInputError when every joint sits on the root.
std::pair<Pose2D, NormalizationRecord> normalize(const Pose2D& pose, int root, const NormalizeOptions& options = {});
std::pair<Pose3D, NormalizationRecord> normalize(const Pose3D& pose, int root, const NormalizeOptions& options = {});
Pose2D denormalize(const Pose2D& pose, const NormalizationRecord& record);
Pose3D denormalize(const Pose3D& pose, const NormalizationRecord& record);

/// Normalized, flattened view of a dataset ready for batching. 2D and 3D are
/// normalized independently, each with its own ratio.
struct PoseArrays {
  Matrix x2d;                    // M x 2N
  Matrix y3d;                    // M x 3N, or 0 rows for a 2D corpus
  std::vector<double> ratio2d;   // per sample
  std::vector<double> ratio3d;   // per sample, empty for a 2D corpus
  std::vector<std::string> actions;

  Index size() const { return x2d.rows(); }
  bool has_3d() const { return y3d.rows() > 0; }
};

PoseArrays to_arrays(const Dataset& dataset, const SkeletonTopology& topology, const NormalizeOptions& options = {});

/// Adds i.i.d. N(0, sigma^2) noise to every raw 2D coordinate.
Dataset add_2d_noise(const Dataset& dataset, double sigma, Rng& rng);

/// Deterministic shuffle of the sample order.
Dataset shuffled(const Dataset& dataset, Rng& rng);

/// First `fraction` of the samples become a 2D-only corpus, the rest stay a 3D
/// corpus; the two never share a sample.
std::pair<Dataset, Dataset> split_unpaired(const Dataset& dataset, double fraction);

}  // namespace synclift
