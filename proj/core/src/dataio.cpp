// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/dataio.hpp>

#include <synclift/error.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace synclift {
namespace {

constexpr const char* kFormatName = "synclift-poses";

nlohmann::json camera_to_json(const Camera& c) {
  return {{"focal", c.focal}, {"center_x", c.center_x}, {"center_y", c.center_y}};
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const char* what) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw FormatError(std::string("unknown ") + what + " field '" + key + "'");
  }
}

Camera camera_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"focal", "center_x", "center_y"}, "camera");
  return {j.at("focal").get<double>(), j.at("center_x").get<double>(), j.at("center_y").get<double>()};
}

template <int Rows>
nlohmann::json joints_to_json(const Eigen::Matrix<double, Rows, Eigen::Dynamic>& pose) {
  auto arr = nlohmann::json::array();
  for (Index k = 0; k < pose.cols(); ++k) {
    auto p = nlohmann::json::array();
    for (int c = 0; c < Rows; ++c) p.push_back(pose(c, k));
    arr.push_back(std::move(p));
  }
  return arr;
}

template <int Rows>
Eigen::Matrix<double, Rows, Eigen::Dynamic> joints_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array()) throw FormatError(std::string(what) + " must be an array of joints");
  Eigen::Matrix<double, Rows, Eigen::Dynamic> pose(Rows, static_cast<Index>(arr.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto& p = arr[k];
    if (!p.is_array() || p.size() != Rows) {
      throw FormatError(std::string(what) + " joint " + std::to_string(k) + " must have " + std::to_string(Rows) +
                        " coordinates");
    }
    for (int c = 0; c < Rows; ++c) pose(c, static_cast<Index>(k)) = p[c].get<double>();
  }
  return pose;
}

std::string corpus_name(Corpus c) { return c == Corpus::k3D ? "3d" : "2d"; }

DatasetHeader header_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"format", "version", "corpus", "num_joints", "topology_hash", "units", "camera", "provenance"},
                 "header");
  if (j.at("format").get<std::string>() != kFormatName) throw FormatError("not a synclift pose file");
  const int version = j.at("version").get<int>();
  if (version != DatasetHeader::kVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version) + " (expected " +
                      std::to_string(DatasetHeader::kVersion) + ")");
  }
  DatasetHeader h;
  const auto corpus = j.at("corpus").get<std::string>();
  if (corpus == "3d") {
    h.corpus = Corpus::k3D;
  } else if (corpus == "2d") {
    h.corpus = Corpus::k2D;
  } else {
    throw FormatError("corpus must be \"2d\" or \"3d\"");
  }
  h.num_joints = j.at("num_joints").get<int>();
  if (h.num_joints < 1) throw FormatError("num_joints must be positive");
  if (j.contains("topology_hash")) h.topology_hash = j.at("topology_hash").get<std::string>();
  if (j.contains("units")) {
    const auto& u = j.at("units");
    reject_unknown(u, {"2d", "3d"}, "units");
    if (u.contains("2d")) h.units_2d = u.at("2d").get<std::string>();
    if (u.contains("3d")) h.units_3d = u.at("3d").get<std::string>();
  }
  if (j.contains("camera")) h.camera = camera_from_json(j.at("camera"));
  if (j.contains("provenance")) h.provenance = j.at("provenance");
  return h;
}

nlohmann::json header_to_json(const DatasetHeader& h) {
  nlohmann::json j;
  j["format"] = kFormatName;
  j["version"] = DatasetHeader::kVersion;
  j["corpus"] = corpus_name(h.corpus);
  j["num_joints"] = h.num_joints;
  if (!h.topology_hash.empty()) j["topology_hash"] = h.topology_hash;
  j["units"] = {{"2d", h.units_2d}, {"3d", h.units_3d}};
  if (h.camera) j["camera"] = camera_to_json(*h.camera);
  if (!h.provenance.is_null()) j["provenance"] = h.provenance;
  return j;
}

PoseSample sample_from_json(const nlohmann::json& j, const DatasetHeader& h) {
  reject_unknown(j, {"joints2d", "joints3d", "action", "camera"}, "sample");
  PoseSample s;
  s.joints2d = joints_from_json<2>(j.at("joints2d"), "joints2d");
  if (s.joints2d.cols() != h.num_joints) {
    throw FormatError("joints2d has " + std::to_string(s.joints2d.cols()) + " joints, header says " +
                      std::to_string(h.num_joints));
  }
  if (j.contains("joints3d")) {
    s.joints3d = joints_from_json<3>(j.at("joints3d"), "joints3d");
    if (s.joints3d->cols() != h.num_joints) {
      throw FormatError("joints3d has " + std::to_string(s.joints3d->cols()) + " joints, header says " +
                        std::to_string(h.num_joints));
    }
  }
  if (h.corpus == Corpus::k3D && !s.joints3d) throw FormatError("sample in a 3D corpus is missing joints3d");
  if (h.corpus == Corpus::k2D && s.joints3d) throw FormatError("sample in a 2D corpus carries joints3d");
  if (j.contains("action")) s.action = j.at("action").get<std::string>();
  if (j.contains("camera")) s.camera = camera_from_json(j.at("camera"));
  return s;
}

nlohmann::json sample_to_json(const PoseSample& s) {
  nlohmann::json j;
  j["joints2d"] = joints_to_json<2>(s.joints2d);
  if (s.joints3d) j["joints3d"] = joints_to_json<3>(*s.joints3d);
  if (!s.action.empty()) j["action"] = s.action;
  if (s.camera) j["camera"] = camera_to_json(*s.camera);
  return j;
}

Dataset parse(std::istream& in) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw FormatError("expected a JSON object");
      if (!have_header) {
        ds.header = header_from_json(j);
        have_header = true;
      } else {
        ds.samples.push_back(sample_from_json(j, ds.header));
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw FormatError("dataset is empty (no header record)");
  return ds;
}

template <int Rows>
std::pair<Eigen::Matrix<double, Rows, Eigen::Dynamic>, NormalizationRecord> normalize_impl(
    const Eigen::Matrix<double, Rows, Eigen::Dynamic>& pose, int root, const NormalizeOptions& options) {
  if (root < 0 || root >= pose.cols()) throw ShapeError("normalize: root index out of range");
  NormalizationRecord rec;
  rec.root = pose.col(root);
  Eigen::Matrix<double, Rows, Eigen::Dynamic> centred = pose.colwise() - pose.col(root);
  double total = 0;
  for (Index k = 0; k < centred.cols(); ++k) total += centred.col(k).norm();
  const Index count = options.include_root ? centred.cols() : centred.cols() - 1;
  if (count < 1 || !(total > 0)) throw DegenerateInputError("normalize: every joint coincides with the root");
  rec.scale_ratio = total / static_cast<double>(count);
  return {centred / rec.scale_ratio, rec};
}

template <int Rows>
Eigen::Matrix<double, Rows, Eigen::Dynamic> denormalize_impl(const Eigen::Matrix<double, Rows, Eigen::Dynamic>& pose,
                                                             const NormalizationRecord& rec) {
  if (rec.root.size() != Rows) throw ShapeError("denormalize: record dimension mismatch");
  return (pose * rec.scale_ratio).colwise() + rec.root;
}

}  // namespace

Pose2D project(const Pose3D& pose, const Camera& camera) {
  Pose2D out(2, pose.cols());
  for (Index k = 0; k < pose.cols(); ++k) {
    out(0, k) = camera.focal * pose(0, k) / pose(2, k) + camera.center_x;
    out(1, k) = camera.focal * pose(1, k) / pose(2, k) + camera.center_y;
  }
  return out;
}

std::string dataset_to_string(const Dataset& dataset) {
  std::ostringstream os;
  os << header_to_json(dataset.header).dump() << '\n';
  for (const auto& s : dataset.samples) os << sample_to_json(s).dump() << '\n';
  return os.str();
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset file " + path.string());
  out << dataset_to_string(dataset);
  if (!out) throw Error("failed writing dataset file " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset file " + path.string());
  try {
    return parse(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Dataset dataset_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

void validate_dataset(const Dataset& dataset, const SkeletonTopology& topology) {
  if (dataset.header.num_joints != topology.num_joints()) {
    throw FormatError("dataset has " + std::to_string(dataset.header.num_joints) + " joints, topology has " +
                      std::to_string(topology.num_joints()));
  }
  if (!dataset.header.topology_hash.empty() && dataset.header.topology_hash != topology.hash_hex()) {
    throw FormatError("dataset topology hash " + dataset.header.topology_hash + " does not match topology " +
                      topology.hash_hex());
  }
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& s = dataset.samples[i];
    if (s.joints2d.cols() != topology.num_joints() || (s.joints3d && s.joints3d->cols() != topology.num_joints())) {
      throw FormatError("sample " + std::to_string(i) + " has the wrong joint count");
    }
    if (dataset.header.corpus == Corpus::k3D && !s.joints3d) {
      throw FormatError("sample " + std::to_string(i) + " in a 3D corpus is missing joints3d");
    }
  }
}

std::pair<Pose2D, NormalizationRecord> normalize(const Pose2D& pose, int root, const NormalizeOptions& options) {
  return normalize_impl<2>(pose, root, options);
}

std::pair<Pose3D, NormalizationRecord> normalize(const Pose3D& pose, int root, const NormalizeOptions& options) {
  return normalize_impl<3>(pose, root, options);
}

Pose2D denormalize(const Pose2D& pose, const NormalizationRecord& record) { return denormalize_impl<2>(pose, record); }
Pose3D denormalize(const Pose3D& pose, const NormalizationRecord& record) { return denormalize_impl<3>(pose, record); }

PoseArrays to_arrays(const Dataset& dataset, const SkeletonTopology& topology, const NormalizeOptions& options) {
  validate_dataset(dataset, topology);
  const auto m = static_cast<Index>(dataset.samples.size());
  const Index n = topology.num_joints();
  const bool with_3d = dataset.header.corpus == Corpus::k3D;
  PoseArrays a;
  a.x2d.resize(m, 2 * n);
  if (with_3d) a.y3d.resize(m, 3 * n);
  for (Index i = 0; i < m; ++i) {
    const auto& s = dataset.samples[static_cast<std::size_t>(i)];
    auto [p2, r2] = normalize(s.joints2d, topology.root(), options);
    a.x2d.row(i) = flatten(p2);
    a.ratio2d.push_back(r2.scale_ratio);
    if (with_3d) {
      auto [p3, r3] = normalize(*s.joints3d, topology.root(), options);
      a.y3d.row(i) = flatten(p3);
      a.ratio3d.push_back(r3.scale_ratio);
    }
    a.actions.push_back(s.action);
  }
  return a;
}

Dataset add_2d_noise(const Dataset& dataset, double sigma, Rng& rng) {
  Dataset out = dataset;
  if (sigma <= 0) return out;
  for (auto& s : out.samples) {
    for (Index k = 0; k < s.joints2d.cols(); ++k) {
      s.joints2d(0, k) += rng.normal(0, sigma);
      s.joints2d(1, k) += rng.normal(0, sigma);
    }
  }
  return out;
}

Dataset shuffled(const Dataset& dataset, Rng& rng) {
  Dataset out;
  out.header = dataset.header;
  for (auto i : rng.permutation(dataset.samples.size())) out.samples.push_back(dataset.samples[i]);
  return out;
}

std::pair<Dataset, Dataset> split_unpaired(const Dataset& dataset, double fraction) {
  if (dataset.header.corpus != Corpus::k3D) throw FormatError("unpaired split needs a 3D corpus");
  if (!(fraction > 0 && fraction < 1)) throw UsageError("unpaired split fraction must be in (0, 1)");
  const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(dataset.samples.size())));
  Dataset only2d;
  Dataset only3d;
  only2d.header = dataset.header;
  only2d.header.corpus = Corpus::k2D;
  only3d.header = dataset.header;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    if (i < cut) {
      PoseSample s = dataset.samples[i];
      s.joints3d.reset();
      only2d.samples.push_back(std::move(s));
    } else {
      only3d.samples.push_back(dataset.samples[i]);
    }
  }
  return {std::move(only2d), std::move(only3d)};
}

}  // namespace synclift
