// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/networks.hpp>
#include <synclift/optim.hpp>
#include <synclift/skeleton.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace synclift {

/// In-memory form of a checkpoint file.
///
/// Layout on disk (all integers little-endian):
///   bytes 0..7   magic "SYNCLIFT"
///   u32          format version (1)
///   u64          header length H
///   H bytes      UTF-8 JSON header: topology_hash, seed, model, config,
///                metadata, and a tensor index [{name, rows, cols, offset}]
///   rest         float64 tensor payload, row-major, at the indexed offsets
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string topology_hash;
  std::uint64_t seed = 0;
  nlohmann::json model;     // ModelConfig
  nlohmann::json config;    // effective run config, for provenance
  nlohmann::json metadata;  // epoch, step, rng state, ...
  std::map<std::string, Eigen::MatrixXd> tensors;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
/// Throws FormatError on a bad magic, version or truncated payload.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Captures parameters and batch-norm buffers under their model names.
void store_model(LiftingModel& model, Checkpoint& checkpoint);
/// Captures Adam moments and step counters under "adam.<param name>.{m,v,step}".
void store_optimizer(const Adam& optimizer, Checkpoint& checkpoint);

/// Copies every stored parameter/buffer into the model; throws FormatError on a
/// missing tensor or shape mismatch.
void restore_model(const Checkpoint& checkpoint, LiftingModel& model);
void restore_optimizer(const Checkpoint& checkpoint, Adam& optimizer);

/// Rebuilds a model from a checkpoint after checking that it was trained on
/// `topology`. Throws FormatError on a topology hash mismatch.
LiftingModel model_from_checkpoint(const Checkpoint& checkpoint, const SkeletonTopology& topology);

}  // namespace synclift
