// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <synclift/evaluation.hpp>
#include <synclift/networks.hpp>
#include <synclift/noise_bench.hpp>
#include <synclift/synth.hpp>
#include <synclift/trainer.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace synclift {

/// Everything a CLI run depends on besides its input files. Every section is
/// optional in a config file; absent keys keep their defaults and unknown keys
/// are rejected.
struct ProjectConfig {
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;  // share of a 3D file held out by `train`
  ModelConfig model;
  TrainConfig train;
  SynthConfig synth;
  EvalConfig eval;
  NoiseBenchConfig noise_bench;
};

nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const SynthConfig& c);
nlohmann::json to_json(const EvalConfig& c);
nlohmann::json to_json(const NoiseBenchConfig& c);
nlohmann::json to_json(const ProjectConfig& c);

/// Each parser starts from `base` and overwrites the keys present in `j`.
/// Throws FormatError on unknown keys or mistyped values.
ModelConfig model_config_from_json(const nlohmann::json& j, const ModelConfig& base);
TrainConfig train_config_from_json(const nlohmann::json& j, const TrainConfig& base);
SynthConfig synth_config_from_json(const nlohmann::json& j, const SynthConfig& base);
EvalConfig eval_config_from_json(const nlohmann::json& j, const EvalConfig& base);
NoiseBenchConfig noise_bench_config_from_json(const nlohmann::json& j, const NoiseBenchConfig& base);
ProjectConfig project_config_from_json(const nlohmann::json& j, const ProjectConfig& base = {});

ProjectConfig load_project_config(const std::filesystem::path& path);

/// Applies "dotted.key=value" overrides. The value is parsed as JSON when
/// possible and taken as a plain string otherwise. Throws UsageError when the
/// key does not name an existing config entry.
ProjectConfig apply_overrides(const ProjectConfig& config, const std::vector<std::string>& overrides);

std::string to_string(ZAlignment a);
ZAlignment z_alignment_from_string(const std::string& s);

}  // namespace synclift
