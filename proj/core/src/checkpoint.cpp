// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/checkpoint.hpp>

#include <synclift/config.hpp>
#include <synclift/error.hpp>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace synclift {
namespace {

constexpr std::array<char, 8> kMagic = {'S', 'Y', 'N', 'C', 'L', 'I', 'F', 'T'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("checkpoint is truncated");
  return value;
}

Eigen::MatrixXd to_double(const Matrix& m) { return m.cast<double>(); }

void assign(const Eigen::MatrixXd& src, Matrix& dst, const std::string& name) {
  if (src.rows() != dst.rows() || src.cols() != dst.cols()) {
    throw FormatError("checkpoint tensor '" + name + "' is " + std::to_string(src.rows()) + "x" +
                      std::to_string(src.cols()) + ", model expects " + std::to_string(dst.rows()) + "x" +
                      std::to_string(dst.cols()));
  }
  dst = src.cast<Scalar>();
}

const Eigen::MatrixXd& find(const Checkpoint& c, const std::string& name) {
  auto it = c.tensors.find(name);
  if (it == c.tensors.end()) throw FormatError("checkpoint is missing tensor '" + name + "'");
  return it->second;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  nlohmann::json header;
  header["format"] = "synclift-checkpoint";
  header["topology_hash"] = checkpoint.topology_hash;
  header["seed"] = checkpoint.seed;
  header["model"] = checkpoint.model;
  header["config"] = checkpoint.config;
  header["metadata"] = checkpoint.metadata;
  auto index = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, m] : checkpoint.tensors) {
    index.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(m.size()) * sizeof(double);
  }
  header["tensors"] = std::move(index);
  const std::string text = header.dump();

  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint " + path.string());
    out.write(kMagic.data(), kMagic.size());
    write_pod<std::uint32_t>(out, Checkpoint::kVersion);
    write_pod<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, m] : checkpoint.tensors) {
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
      out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    }
    if (!out) throw Error("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError(path.string() + " is not a synclift checkpoint");
  const auto version = read_pod<std::uint32_t>(in);
  if (version != Checkpoint::kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = read_pod<std::uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw FormatError("checkpoint header is truncated");

  Checkpoint c;
  std::vector<nlohmann::json> index;
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("format") != "synclift-checkpoint") throw FormatError("unexpected checkpoint format tag");
    c.topology_hash = header.at("topology_hash").get<std::string>();
    c.seed = header.at("seed").get<std::uint64_t>();
    c.model = header.at("model");
    c.config = header.at("config");
    c.metadata = header.at("metadata");
    index = header.at("tensors").get<std::vector<nlohmann::json>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }
  const auto payload_start = in.tellg();
  for (const auto& entry : index) {
    const auto name = entry.at("name").get<std::string>();
    const auto rows = entry.at("rows").get<Index>();
    const auto cols = entry.at("cols").get<Index>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(rows, cols);
    in.seekg(payload_start + static_cast<std::streamoff>(offset));
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw FormatError("checkpoint payload for '" + name + "' is truncated");
    c.tensors[name] = m;
  }
  return c;
}

void store_model(LiftingModel& model, Checkpoint& checkpoint) {
  for (const auto& p : model.parameters()) checkpoint.tensors[p.name] = to_double(p.tensor.value());
  for (const auto& b : model.buffers()) checkpoint.tensors[b.name] = to_double(*b.value);
  checkpoint.model = to_json(model.config);
}

void store_optimizer(const Adam& optimizer, Checkpoint& checkpoint) {
  for (std::size_t i = 0; i < optimizer.params().size(); ++i) {
    const auto& name = optimizer.params()[i].name;
    const auto& s = optimizer.states()[i];
    if (s.m.size() == 0) continue;
    checkpoint.tensors["adam." + name + ".m"] = to_double(s.m);
    checkpoint.tensors["adam." + name + ".v"] = to_double(s.v);
    checkpoint.tensors["adam." + name + ".step"] = Eigen::MatrixXd::Constant(1, 1, static_cast<double>(s.step));
  }
}

void restore_model(const Checkpoint& checkpoint, LiftingModel& model) {
  for (auto& p : model.parameters()) {
    auto tensor = p.tensor;
    assign(find(checkpoint, p.name), tensor.mutable_value(), p.name);
  }
  for (auto& b : model.buffers()) assign(find(checkpoint, b.name), *b.value, b.name);
}

void restore_optimizer(const Checkpoint& checkpoint, Adam& optimizer) {
  for (std::size_t i = 0; i < optimizer.params().size(); ++i) {
    const auto& p = optimizer.params()[i];
    const auto key = "adam." + p.name;
    if (!checkpoint.tensors.count(key + ".m")) continue;
    auto& s = optimizer.states()[i];
    s.m = p.tensor.value();
    s.v = p.tensor.value();
    assign(find(checkpoint, key + ".m"), s.m, key + ".m");
    assign(find(checkpoint, key + ".v"), s.v, key + ".v");
    s.step = static_cast<long>(find(checkpoint, key + ".step")(0, 0));
  }
}

LiftingModel model_from_checkpoint(const Checkpoint& checkpoint, const SkeletonTopology& topology) {
  if (checkpoint.topology_hash != topology.hash_hex()) {
    throw FormatError("checkpoint was trained on topology " + checkpoint.topology_hash + ", input uses " +
                      topology.hash_hex());
  }
  ModelConfig mc = model_config_from_json(checkpoint.model, ModelConfig{});
  if (mc.num_joints != topology.num_joints() || mc.num_bones != topology.num_bones()) {
    throw FormatError("checkpoint model dimensions do not match the topology");
  }
  LiftingModel model(mc);
  restore_model(checkpoint, model);
  return model;
}

}  // namespace synclift
