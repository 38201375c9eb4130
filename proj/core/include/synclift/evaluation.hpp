// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/dataio.hpp>
#include <synclift/networks.hpp>
#include <synclift/types.hpp>

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace synclift {

/// Mean over joints of the Euclidean distance between matching joints.
double mpjpe(const Pose3D& pred, const Pose3D& gt);

/// Least-squares alignment of pred onto gt over rotations (reflections
/// excluded), translations and, with `with_scale`, a uniform scale. Throws
/// DegenerateInputError for fewer than three joints or a collinear
/// configuration.
Pose3D procrustes_align(const Pose3D& pred, const Pose3D& gt, bool with_scale = true);

enum class ZAlignment {
  kNone,        ///< compare root-relative z directly
  kProcrustes,  ///< compare z after procrustes_align
};

/// Mean over joints of |z_pred - z_gt|.
double z_only_error(const Pose3D& pred, const Pose3D& gt, ZAlignment alignment = ZAlignment::kNone,
                    bool with_scale = true);

/// Fraction of joints whose error is strictly below `threshold`.
double pck3d(const Pose3D& pred, const Pose3D& gt, double threshold);

struct EvalConfig {
  double pck_threshold = 150;      // in report units
  bool procrustes_scale = true;    // protocol #2 as a similarity transform
  ZAlignment z_alignment = ZAlignment::kNone;
  /// Report in the 3D corpus units (both poses scaled by the ground truth's
  /// normalization ratio) instead of normalized units.
  bool original_units = true;
};

struct EvalMetrics {
  long count = 0;
  double mpjpe_p1 = 0;
  double mpjpe_p2 = 0;
  double z_error = 0;
  double pck = 0;
};

struct EvalReport {
  std::string label;       // e.g. the noise mode
  double noise_sigma = 0;
  EvalMetrics overall;
  std::vector<std::pair<std::string, EvalMetrics>> per_action;  // sorted by action
};

/// Scores flattened predictions (M x 3N, normalized, root-relative) against
/// the 3D part of `truth`. Samples with an empty action go to bucket "all".
EvalReport evaluate_predictions(const Matrix& predictions, const PoseArrays& truth, const EvalConfig& config);

/// Lifts truth.x2d with the generator in eval mode, then scores.
EvalReport evaluate(Generator& generator, const PoseArrays& truth, const EvalConfig& config);

nlohmann::json report_to_json(const EvalReport& report);
/// One header line plus one row per report (action "ALL"), followed by one row
/// per action bucket when `per_action` is set.
std::string reports_to_csv(const std::vector<EvalReport>& reports, bool per_action = true);

}  // namespace synclift
