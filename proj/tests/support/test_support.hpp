// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/autodiff.hpp>
#include <synclift/rng.hpp>
#include <synclift/skeleton.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <vector>

namespace synclift::testing {

/// Random connected topology: a random tree over `n` joints plus `extra`
/// chords. Joint 0 is the root. Special joints are the first four joints.
inline SkeletonTopology random_topology(Rng& rng, int n, int extra = 0) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("j" + std::to_string(i));
  std::vector<Bone> bones;
  auto has = [&](int a, int b) {
    return std::any_of(bones.begin(), bones.end(), [&](const Bone& x) {
      return (x.start == a && x.end == b) || (x.start == b && x.end == a);
    });
  };
  for (int i = 1; i < n; ++i) {
    const int parent = static_cast<int>(rng.index(static_cast<std::size_t>(i)));
    // Random orientation so both signs of the incidence columns get exercised.
    if (rng.bernoulli(0.5)) {
      bones.push_back({parent, i});
    } else {
      bones.push_back({i, parent});
    }
  }
  for (int k = 0, tries = 0; k < extra && tries < 100 * (extra + 1); ++tries) {
    const int a = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    const int b = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    if (a == b || has(a, b)) continue;
    bones.push_back({a, b});
    ++k;
  }
  SpecialJoints special{0, 1, std::min(2, n - 1), std::min(3, n - 1)};
  if (n < 4) special = {0, 1, 0, 1};
  return SkeletonTopology(names, bones, 0, special);
}

/// Five joints: hip (root), neck, nose, left and right shoulder.
inline SkeletonTopology toy5() {
  Pose3D rest(3, 5);
  rest.col(0) << 0, 0, 0;
  rest.col(1) << 0, 500, 0;
  rest.col(2) << 0, 600, -90;
  rest.col(3) << -170, 480, 0;
  rest.col(4) << 170, 480, 0;
  return SkeletonTopology({"hip", "neck", "nose", "left_shoulder", "right_shoulder"},
                          {{0, 1}, {1, 2}, {1, 3}, {1, 4}}, 0, {2, 1, 3, 4}, rest);
}

/// Independent all-pairs BFS on the bone graph (adjacent iff sharing a joint).
inline std::vector<std::vector<int>> brute_force_bone_distances(const SkeletonTopology& t) {
  const int b = t.num_bones();
  const auto& bones = t.bones();
  auto adjacent = [&](int i, int j) {
    return bones[i].start == bones[j].start || bones[i].start == bones[j].end || bones[i].end == bones[j].start ||
           bones[i].end == bones[j].end;
  };
  std::vector<std::vector<int>> d(b, std::vector<int>(b, -1));
  for (int s = 0; s < b; ++s) {
    std::deque<int> q{s};
    d[s][s] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int v = 0; v < b; ++v) {
        if (v != u && d[s][v] < 0 && adjacent(u, v)) {
          d[s][v] = d[s][u] + 1;
          q.push_back(v);
        }
      }
    }
  }
  return d;
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = static_cast<Scalar>(rng.normal(0, scale));
  }
  return m;
}

/// ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(const Matrix& a, const Matrix& b, double floor = 1e-10) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

/// Largest relative error, over `params`, between the analytic gradient of the
/// scalar `loss` and central finite differences with step `h`. Gradients whose
/// norm is below `floor` are compared in absolute terms against it.
inline double gradient_check(const std::function<nn::Tensor()>& loss, const std::vector<nn::Tensor>& params,
                             double h = 1e-5, double floor = 1e-10) {
  for (auto p : params) p.zero_grad();
  nn::backward(loss());
  std::vector<Matrix> analytic;
  for (const auto& p : params) analytic.push_back(p.grad());
  double worst = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k];
    Matrix numeric(p.rows(), p.cols());
    for (Index i = 0; i < p.rows(); ++i) {
      for (Index j = 0; j < p.cols(); ++j) {
        const Scalar orig = p.value()(i, j);
        p.mutable_value()(i, j) = orig + static_cast<Scalar>(h);
        double up;
        double down;
        {
          nn::NoGradGuard g;
          up = loss().item();
        }
        p.mutable_value()(i, j) = orig - static_cast<Scalar>(h);
        {
          nn::NoGradGuard g;
          down = loss().item();
        }
        p.mutable_value()(i, j) = orig;
        numeric(i, j) = static_cast<Scalar>((up - down) / (2 * h));
      }
    }
    worst = std::max(worst, relative_error(analytic[k], numeric, floor));
  }
  return worst;
}

}  // namespace synclift::testing
