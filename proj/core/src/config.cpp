// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/config.hpp>

#include <synclift/error.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace synclift {
namespace {

using nlohmann::json;

// Reads known keys from one JSON object and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw FormatError("config section '" + path_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw FormatError("config key '" + where(key) + "': " + e.what());
    }
  }

  template <typename T, typename Parse>
  void read_with(const char* key, T& out, Parse parse) {
    std::string s;
    read(key, s);
    if (!j_.contains(key)) return;
    try {
      out = parse(s);
    } catch (const Error& e) {
      throw FormatError("config key '" + where(key) + "': " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw FormatError("unknown config key '" + where(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json camera_json(const Camera& c) {
  return {{"focal", c.focal}, {"center_x", c.center_x}, {"center_y", c.center_y}};
}

}  // namespace

std::string to_string(ZAlignment a) { return a == ZAlignment::kNone ? "none" : "procrustes"; }

ZAlignment z_alignment_from_string(const std::string& s) {
  if (s == "none") return ZAlignment::kNone;
  if (s == "procrustes") return ZAlignment::kProcrustes;
  throw UsageError("unknown z alignment '" + s + "' (expected none or procrustes)");
}

json to_json(const ModelConfig& c) {
  return {{"num_joints", c.num_joints},
          {"num_bones", c.num_bones},
          {"hidden_width", c.hidden_width},
          {"reprojection_width", c.reprojection_width},
          {"critic_width", c.critic_width},
          {"generator_blocks", c.generator_blocks},
          {"reprojection_blocks", c.reprojection_blocks},
          {"dropout", c.dropout},
          {"leaky_slope", c.leaky_slope},
          {"bn_momentum", c.bn_momentum},
          {"bn_eps", c.bn_eps}};
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"adam_eps", c.adam_eps},
          {"lambda", c.lambda},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"critic_steps_per_gen_step", c.critic_steps_per_gen_step},
          {"lipschitz_mode", to_string(c.lipschitz_mode)},
          {"clip_bound", c.clip_bound},
          {"penalty_weight", c.penalty_weight},
          {"use_weighted_kcs", c.use_weighted_kcs},
          {"kcs_combine", to_string(c.kcs_combine)},
          {"synchronous", c.synchronous},
          {"reprojection_pretrain_epochs", c.reprojection_pretrain_epochs},
          {"paired", c.paired},
          {"unpaired_fraction", c.unpaired_fraction},
          {"checkpoint_every", c.checkpoint_every},
          {"strict_angle", c.strict_angle},
          {"normalize_include_root", c.normalize_include_root}};
}

json to_json(const SynthConfig& c) {
  json actions = json::array();
  for (const auto& a : c.actions) actions.push_back({{"name", a.name}, {"angle_scale", a.angle_scale}});
  return {{"count", c.count},
          {"camera", camera_json(c.camera)},
          {"distance_min", c.distance_min},
          {"distance_max", c.distance_max},
          {"lateral_range", c.lateral_range},
          {"yaw_range", c.yaw_range},
          {"tilt_range", c.tilt_range},
          {"joint_angle_range", c.joint_angle_range},
          {"min_depth", c.min_depth},
          {"max_retries", c.max_retries},
          {"actions", actions}};
}

json to_json(const EvalConfig& c) {
  return {{"pck_threshold", c.pck_threshold},
          {"procrustes_scale", c.procrustes_scale},
          {"z_alignment", to_string(c.z_alignment)},
          {"original_units", c.original_units}};
}

json to_json(const NoiseBenchConfig& c) {
  json modes = json::array();
  for (auto m : c.modes) modes.push_back(to_string(m));
  return {{"sigmas", c.sigmas}, {"modes", modes}};
}

json to_json(const ProjectConfig& c) {
  return {{"seed", c.seed},
          {"validation_fraction", c.validation_fraction},
          {"model", to_json(c.model)},
          {"train", to_json(c.train)},
          {"synth", to_json(c.synth)},
          {"eval", to_json(c.eval)},
          {"noise_bench", to_json(c.noise_bench)}};
}

ModelConfig model_config_from_json(const json& j, const ModelConfig& base) {
  ModelConfig c = base;
  Section s(j, "model");
  s.read("num_joints", c.num_joints);
  s.read("num_bones", c.num_bones);
  s.read("hidden_width", c.hidden_width);
  s.read("reprojection_width", c.reprojection_width);
  s.read("critic_width", c.critic_width);
  s.read("generator_blocks", c.generator_blocks);
  s.read("reprojection_blocks", c.reprojection_blocks);
  s.read("dropout", c.dropout);
  s.read("leaky_slope", c.leaky_slope);
  s.read("bn_momentum", c.bn_momentum);
  s.read("bn_eps", c.bn_eps);
  s.finish();
  return c;
}

TrainConfig train_config_from_json(const json& j, const TrainConfig& base) {
  TrainConfig c = base;
  Section s(j, "train");
  s.read("learning_rate", c.learning_rate);
  s.read("beta1", c.beta1);
  s.read("beta2", c.beta2);
  s.read("adam_eps", c.adam_eps);
  s.read("lambda", c.lambda);
  s.read("batch_size", c.batch_size);
  s.read("epochs", c.epochs);
  s.read("critic_steps_per_gen_step", c.critic_steps_per_gen_step);
  s.read_with("lipschitz_mode", c.lipschitz_mode, lipschitz_mode_from_string);
  s.read("clip_bound", c.clip_bound);
  s.read("penalty_weight", c.penalty_weight);
  s.read("use_weighted_kcs", c.use_weighted_kcs);
  s.read_with("kcs_combine", c.kcs_combine, kcs_combine_from_string);
  s.read("synchronous", c.synchronous);
  s.read("reprojection_pretrain_epochs", c.reprojection_pretrain_epochs);
  s.read("paired", c.paired);
  s.read("unpaired_fraction", c.unpaired_fraction);
  s.read("checkpoint_every", c.checkpoint_every);
  s.read("strict_angle", c.strict_angle);
  s.read("normalize_include_root", c.normalize_include_root);
  s.finish();
  return c;
}

SynthConfig synth_config_from_json(const json& j, const SynthConfig& base) {
  SynthConfig c = base;
  Section s(j, "synth");
  s.read("count", c.count);
  if (const json* cam = s.child("camera")) {
    Section cs(*cam, "synth.camera");
    cs.read("focal", c.camera.focal);
    cs.read("center_x", c.camera.center_x);
    cs.read("center_y", c.camera.center_y);
    cs.finish();
  }
  s.read("distance_min", c.distance_min);
  s.read("distance_max", c.distance_max);
  s.read("lateral_range", c.lateral_range);
  s.read("yaw_range", c.yaw_range);
  s.read("tilt_range", c.tilt_range);
  s.read("joint_angle_range", c.joint_angle_range);
  s.read("min_depth", c.min_depth);
  s.read("max_retries", c.max_retries);
  if (const json* actions = s.child("actions")) {
    if (!actions->is_array()) throw FormatError("config key 'synth.actions' must be an array");
    c.actions.clear();
    for (const auto& a : *actions) {
      SynthAction action;
      Section as(a, "synth.actions[]");
      as.read("name", action.name);
      as.read("angle_scale", action.angle_scale);
      as.finish();
      c.actions.push_back(action);
    }
  }
  s.finish();
  return c;
}

EvalConfig eval_config_from_json(const json& j, const EvalConfig& base) {
  EvalConfig c = base;
  Section s(j, "eval");
  s.read("pck_threshold", c.pck_threshold);
  s.read("procrustes_scale", c.procrustes_scale);
  s.read_with("z_alignment", c.z_alignment, z_alignment_from_string);
  s.read("original_units", c.original_units);
  s.finish();
  return c;
}

NoiseBenchConfig noise_bench_config_from_json(const json& j, const NoiseBenchConfig& base) {
  NoiseBenchConfig c = base;
  Section s(j, "noise_bench");
  s.read("sigmas", c.sigmas);
  std::vector<std::string> modes;
  s.read("modes", modes);
  if (j.contains("modes")) {
    c.modes.clear();
    try {
      for (const auto& m : modes) c.modes.push_back(noise_mode_from_string(m));
    } catch (const Error& e) {
      throw FormatError(std::string("config key 'noise_bench.modes': ") + e.what());
    }
  }
  s.finish();
  return c;
}

ProjectConfig project_config_from_json(const json& j, const ProjectConfig& base) {
  ProjectConfig c = base;
  Section s(j, "");
  s.read("seed", c.seed);
  s.read("validation_fraction", c.validation_fraction);
  if (const json* m = s.child("model")) c.model = model_config_from_json(*m, c.model);
  if (const json* t = s.child("train")) c.train = train_config_from_json(*t, c.train);
  if (const json* y = s.child("synth")) c.synth = synth_config_from_json(*y, c.synth);
  if (const json* e = s.child("eval")) c.eval = eval_config_from_json(*e, c.eval);
  if (const json* n = s.child("noise_bench")) c.noise_bench = noise_bench_config_from_json(*n, c.noise_bench);
  s.finish();
  return c;
}

ProjectConfig load_project_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return project_config_from_json(j);
}

ProjectConfig apply_overrides(const ProjectConfig& config, const std::vector<std::string>& overrides) {
  json j = to_json(config);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("override '" + o + "' is not of the form key=value");
    const std::string key = o.substr(0, eq);
    const std::string text = o.substr(eq + 1);

    json* node = &j;
    std::stringstream parts(key);
    std::string part;
    while (std::getline(parts, part, '.')) {
      if (!node->is_object() || !node->contains(part)) throw UsageError("unknown config key '" + key + "'");
      node = &(*node)[part];
    }
    if (node->is_object()) throw UsageError("config key '" + key + "' names a section, not a value");

    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    *node = std::move(value);
  }
  try {
    return project_config_from_json(j);
  } catch (const FormatError& e) {
    throw UsageError(std::string("invalid override: ") + e.what());
  }
}

}  // namespace synclift
