// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <synclift/checkpoint.hpp>
#include <synclift/config.hpp>
#include <synclift/dataio.hpp>
#include <synclift/error.hpp>
#include <synclift/evaluation.hpp>
#include <synclift/kcs.hpp>
#include <synclift/noise_bench.hpp>
#include <synclift/skeleton.hpp>
#include <synclift/synth.hpp>
#include <synclift/trainer.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>

namespace synclift::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::string topology;
  std::string out;
};

void add_common(CLI::App* app, Common& c, const std::string& out_help) {
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "root seed (overrides the config)");
  app->add_option("--set", c.sets, "config override key=value (repeatable)")->allow_extra_args(false);
  app->add_option("--topology", c.topology, "skeleton topology JSON (default: built-in 17 joints)")
      ->check(CLI::ExistingFile);
  app->add_option("--out", c.out, out_help);
}

SkeletonTopology topology_of(const Common& c) {
  return c.topology.empty() ? default_topology() : load_topology(c.topology);
}

ProjectConfig effective_config(const Common& c, const SkeletonTopology& topology) {
  ProjectConfig cfg = c.config.empty() ? ProjectConfig{} : load_project_config(c.config);
  cfg = apply_overrides(cfg, c.sets);
  if (c.seed) cfg.seed = *c.seed;
  cfg.model.num_joints = topology.num_joints();
  cfg.model.num_bones = topology.num_bones();
  return cfg;
}

json provenance(const std::string& command, const ProjectConfig& cfg, const SkeletonTopology& topology) {
  return {{"command", command}, {"topology_hash", topology.hash_hex()}, {"config", to_json(cfg)}};
}

void require_out(const Common& c, const char* what) {
  if (c.out.empty()) throw UsageError(std::string("--out is required (") + what + ")");
  const fs::path out(c.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
  if (!os) throw Error("write failed for " + path.string());
}

std::pair<Dataset, Dataset> holdout(const Dataset& data, const std::string& val_path, double fraction) {
  if (!val_path.empty()) return {data, load_dataset(val_path)};
  if (!(fraction > 0 && fraction < 1)) throw UsageError("validation_fraction must lie in (0, 1) without --val");
  const auto n = data.samples.size();
  const auto n_val = static_cast<std::size_t>(static_cast<double>(n) * fraction);
  if (n_val == 0 || n_val >= n) throw UsageError("dataset too small to hold out a validation split");
  Dataset train{data.header, {data.samples.begin(), data.samples.end() - static_cast<std::ptrdiff_t>(n_val)}};
  Dataset val{data.header, {data.samples.end() - static_cast<std::ptrdiff_t>(n_val), data.samples.end()}};
  return {train, val};
}

std::string summary(const EvalReport& r) {
  const auto& m = r.overall;
  return "samples=" + std::to_string(m.count) + " mpjpe_p1=" + fmt(m.mpjpe_p1) + " mpjpe_p2=" + fmt(m.mpjpe_p2) +
         " z_error=" + fmt(m.z_error) + " pck=" + fmt(m.pck);
}

void write_report(const fs::path& path, const std::vector<EvalReport>& reports, const json& prov,
                  bool per_action = true) {
  if (path.extension() == ".csv") {
    write_text(path, "# config " + prov.dump() + "\n" + reports_to_csv(reports, per_action));
    return;
  }
  json list = json::array();
  for (const auto& r : reports) list.push_back(report_to_json(r));
  json j = {{"provenance", prov}, {"reports", list}};
  write_text(path, j.dump(2) + "\n");
}

Checkpoint load_model_checkpoint(const std::string& path) {
  if (path.empty()) throw UsageError("--checkpoint is required");
  return load_checkpoint(path);
}

// --- subcommands -------------------------------------------------------------

int cmd_synth(const Common& c, std::optional<int> count, std::ostream& out) {
  require_out(c, "dataset file");
  const auto topology = topology_of(c);
  auto cfg = effective_config(c, topology);
  if (count) cfg.synth.count = *count;
  Dataset ds = synth_dataset(cfg.synth, derive_seed(cfg.seed, "synth"), topology);
  ds.header.provenance = provenance("synth", cfg, topology);
  save_dataset(ds, c.out);
  out << "wrote " << ds.samples.size() << " samples to " << c.out << '\n';
  return 0;
}

int cmd_train(const Common& c, const std::string& data_path, const std::string& val_path, std::ostream& out) {
  require_out(c, "output directory");
  const auto topology = topology_of(c);
  const auto cfg = effective_config(c, topology);
  const auto [train, val] = holdout(load_dataset(data_path), val_path, cfg.validation_fraction);
  const TrainingData data = prepare_training_data(train, val, topology, cfg.train);

  RunOptions options;
  options.out_dir = fs::path(c.out);
  options.provenance = provenance("train", cfg, topology);
  options.eval = cfg.eval;
  options.on_epoch = [&](int epoch, const LossBundle& l) {
    out << "epoch " << epoch << " l_dis=" << fmt(l.l_dis) << " l_gen=" << fmt(l.l_gen) << " l_angle=" << fmt(l.l_angle)
        << '\n';
  };
  write_text(fs::path(c.out) / "config.json", to_json(cfg).dump(2) + "\n");
  const auto result = run_training(data, topology, cfg.model, cfg.train, derive_seed(cfg.seed, "train"), options);
  out << "untrained: " << summary(result.initial_report) << '\n';
  out << "trained:   " << summary(result.final_report) << '\n';
  out << "checkpoint: " << (fs::path(c.out) / "final.ckpt").string() << '\n';
  return 0;
}

// Re-expresses a lifted pose file in the ground truth's normalized frame so it
// can be scored exactly like a model's raw output.
Matrix normalized_predictions(const Dataset& pred, const Dataset& truth, const SkeletonTopology& topology,
                              const NormalizeOptions& norm) {
  if (pred.samples.size() != truth.samples.size()) {
    throw FormatError("prediction file has " + std::to_string(pred.samples.size()) + " samples, ground truth " +
                      std::to_string(truth.samples.size()));
  }
  const int n = topology.num_joints();
  Matrix out(static_cast<Index>(pred.samples.size()), 3 * n);
  for (std::size_t i = 0; i < pred.samples.size(); ++i) {
    const auto& p = pred.samples[i].joints3d;
    const auto& g = truth.samples[i].joints3d;
    if (!p || !g) throw FormatError("sample " + std::to_string(i) + " lacks 3D joints");
    const auto record = normalize(*g, topology.root(), norm).second;
    const Pose3D centred = (p->colwise() - record.root) / record.scale_ratio;
    out.row(static_cast<Index>(i)) = flatten(centred);
  }
  return out;
}

int cmd_eval(const Common& c, const std::string& data_path, const std::string& ckpt_path, const std::string& pred_path,
             std::ostream& out) {
  const auto topology = topology_of(c);
  const auto cfg = effective_config(c, topology);
  const NormalizeOptions norm{cfg.train.normalize_include_root};
  const Dataset truth = load_dataset(data_path);
  validate_dataset(truth, topology);
  const PoseArrays arrays = to_arrays(truth, topology, norm);

  EvalReport report;
  if (!pred_path.empty()) {
    if (!ckpt_path.empty()) throw UsageError("give either --checkpoint or --pred, not both");
    const Dataset pred = load_dataset(pred_path);
    validate_dataset(pred, topology);
    report = evaluate_predictions(normalized_predictions(pred, truth, topology, norm), arrays, cfg.eval);
  } else {
    LiftingModel model = model_from_checkpoint(load_model_checkpoint(ckpt_path), topology);
    report = evaluate(model.generator, arrays, cfg.eval);
  }
  report.label = "eval";
  out << summary(report) << '\n';
  if (!c.out.empty()) write_report(c.out, {report}, provenance("eval", cfg, topology));
  return 0;
}

int cmd_lift(const Common& c, const std::string& data_path, const std::string& ckpt_path, std::ostream& out) {
  require_out(c, "output pose file");
  const auto topology = topology_of(c);
  const auto cfg = effective_config(c, topology);
  const NormalizeOptions norm{cfg.train.normalize_include_root};
  LiftingModel model = model_from_checkpoint(load_model_checkpoint(ckpt_path), topology);
  const Dataset input = load_dataset(data_path);
  validate_dataset(input, topology);

  const int n = topology.num_joints();
  Matrix x(static_cast<Index>(input.samples.size()), 2 * n);
  for (std::size_t i = 0; i < input.samples.size(); ++i) {
    x.row(static_cast<Index>(i)) = flatten(normalize(input.samples[i].joints2d, topology.root(), norm).first);
  }
  const Matrix lifted = input.samples.empty() ? Matrix(0, 3 * n) : lift(model.generator, x);

  Dataset result;
  result.header = input.header;
  result.header.corpus = Corpus::k3D;
  result.header.topology_hash = topology.hash_hex();
  result.header.provenance = provenance("lift", cfg, topology);
  const bool denormalize_all =
      std::all_of(input.samples.begin(), input.samples.end(), [](const PoseSample& s) { return s.joints3d.has_value(); });
  if (!denormalize_all) result.header.units_3d = "normalized";
  for (std::size_t i = 0; i < input.samples.size(); ++i) {
    PoseSample s = input.samples[i];
    Pose3D pose = unflatten3d(lifted.row(static_cast<Index>(i)), n);
    if (denormalize_all) pose = denormalize(pose, normalize(*s.joints3d, topology.root(), norm).second);
    s.joints3d = std::move(pose);
    result.samples.push_back(std::move(s));
  }
  save_dataset(result, c.out);
  out << "lifted " << result.samples.size() << " poses to " << c.out << '\n';
  return 0;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string s;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) s += ',';
      s += fmt(m(i, j));
    }
    s += '\n';
  }
  return s;
}

int cmd_kcs(const Common& c, const std::string& data_path, int index, const std::string& what, bool raw,
            std::ostream& out) {
  const auto topology = topology_of(c);
  const auto cfg = effective_config(c, topology);
  const KcsCache cache(topology);

  Eigen::MatrixXd m;
  if (what == "weights") {
    m = cache.weights();
  } else if (what == "distances") {
    m = cache.distances().cast<double>();
  } else {
    if (data_path.empty()) throw UsageError("--data is required for kcs and wkcs output");
    const Dataset ds = load_dataset(data_path);
    validate_dataset(ds, topology);
    if (index < 0 || static_cast<std::size_t>(index) >= ds.samples.size()) {
      throw UsageError("--index " + std::to_string(index) + " out of range");
    }
    const auto& s = ds.samples[static_cast<std::size_t>(index)];
    if (!s.joints3d) throw FormatError("sample " + std::to_string(index) + " has no 3D joints");
    Pose3D pose = *s.joints3d;
    if (!raw) pose = normalize(pose, topology.root(), NormalizeOptions{cfg.train.normalize_include_root}).first;
    if (what == "kcs") {
      m = kcs(pose, cache.incidence());
    } else if (what == "wkcs") {
      m = weighted_kcs(pose, cache, cfg.train.kcs_combine);
    } else {
      throw UsageError("--what must be one of kcs, wkcs, weights, distances");
    }
  }
  const std::string text = "# config " + provenance("kcs", cfg, topology).dump() + "\n" + matrix_csv(m);
  if (c.out.empty()) {
    out << text;
  } else {
    write_text(c.out, text);
    out << "wrote " << m.rows() << "x" << m.cols() << " " << what << " matrix to " << c.out << '\n';
  }
  return 0;
}

int cmd_noise_bench(const Common& c, const std::string& data_path, const std::string& val_path,
                    const std::vector<double>& sigmas, const std::vector<std::string>& modes, std::ostream& out) {
  const auto topology = topology_of(c);
  auto cfg = effective_config(c, topology);
  if (!sigmas.empty()) cfg.noise_bench.sigmas = sigmas;
  if (!modes.empty()) {
    cfg.noise_bench.modes.clear();
    for (const auto& m : modes) cfg.noise_bench.modes.push_back(noise_mode_from_string(m));
  }
  const auto [train, val] = holdout(load_dataset(data_path), val_path, cfg.validation_fraction);
  const auto reports = noise_bench(train, val, topology, cfg.model, cfg.train, cfg.eval, cfg.noise_bench,
                                   derive_seed(cfg.seed, "noise-bench"));
  out << reports_to_csv(reports, /*per_action=*/false);
  if (!c.out.empty()) write_report(c.out, reports, provenance("noise-bench", cfg, topology), false);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"synclift: weakly supervised 2D-to-3D pose lifting", "synclift"};
  app.require_subcommand(1);

  Common common;
  std::string data, val, checkpoint, pred, what = "wkcs";
  std::optional<int> count;
  int index = 0;
  bool raw = false;
  std::vector<double> sigmas;
  std::vector<std::string> modes;

  auto* synth = app.add_subcommand("synth", "generate a synthetic paired 2D/3D dataset");
  add_common(synth, common, "dataset file to write");
  synth->add_option("--count", count, "number of samples (overrides synth.count)")->check(CLI::NonNegativeNumber);

  auto* train = app.add_subcommand("train", "train the three networks on a 3D dataset");
  add_common(train, common, "output directory");
  train->add_option("--data", data, "3D training dataset")->required()->check(CLI::ExistingFile);
  train->add_option("--val", val, "validation dataset (default: hold out validation_fraction)")
      ->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "score a checkpoint or a lifted pose file");
  add_common(eval, common, "report file (.json, or .csv)");
  eval->add_option("--data", data, "ground-truth 3D dataset")->required()->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", checkpoint, "model checkpoint")->check(CLI::ExistingFile);
  eval->add_option("--pred", pred, "lifted pose file to score instead of a checkpoint")->check(CLI::ExistingFile);

  auto* lift_cmd = app.add_subcommand("lift", "lift the 2D poses of a dataset to 3D");
  add_common(lift_cmd, common, "output pose file");
  lift_cmd->add_option("--data", data, "input pose file")->required()->check(CLI::ExistingFile);
  lift_cmd->add_option("--checkpoint", checkpoint, "model checkpoint")->required()->check(CLI::ExistingFile);

  auto* kcs_cmd = app.add_subcommand("kcs", "print KCS, weight, wKCS or bone-distance matrices as CSV");
  add_common(kcs_cmd, common, "CSV file (default: stdout)");
  kcs_cmd->add_option("--data", data, "pose file with 3D joints")->check(CLI::ExistingFile);
  kcs_cmd->add_option("--index", index, "sample index");
  kcs_cmd->add_option("--what", what, "kcs | wkcs | weights | distances")
      ->check(CLI::IsMember({"kcs", "wkcs", "weights", "distances"}));
  kcs_cmd->add_flag("--raw", raw, "use the pose in file units instead of normalizing it");

  auto* bench = app.add_subcommand("noise-bench", "train and score under Gaussian 2D input noise");
  add_common(bench, common, "report file (.json, or .csv)");
  bench->add_option("--data", data, "3D dataset")->required()->check(CLI::ExistingFile);
  bench->add_option("--val", val, "validation dataset (default: hold out validation_fraction)")
      ->check(CLI::ExistingFile);
  bench->add_option("--sigmas", sigmas, "comma-separated noise levels in 2D units")->delimiter(',');
  bench->add_option("--modes", modes, "comma-separated noise modes")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << failed->help();
    return 2;
  }

  try {
    if (*synth) return cmd_synth(common, count, out);
    if (*train) return cmd_train(common, data, val, out);
    if (*eval) return cmd_eval(common, data, checkpoint, pred, out);
    if (*lift_cmd) return cmd_lift(common, data, checkpoint, out);
    if (*kcs_cmd) return cmd_kcs(common, data, index, what, raw, out);
    if (*bench) return cmd_noise_bench(common, data, val, sigmas, modes, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace synclift::cli
