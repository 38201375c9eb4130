// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/skeleton.hpp>

#include <synclift/error.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

namespace synclift {
namespace {

std::string bone_label(std::size_t k, const Bone& b) {
  std::ostringstream os;
  os << "bone " << k << " (" << b.start << ", " << b.end << ")";
  return os.str();
}

void check_joint(int index, int n, const char* what) {
  if (index < 0 || index >= n) {
    throw TopologyError(std::string(what) + " index " + std::to_string(index) +
                        " is outside [0, " + std::to_string(n) + ")");
  }
}

// Bones adjacent iff they share a joint.
std::vector<std::vector<int>> bone_adjacency(const std::vector<Bone>& bones) {
  const auto b = bones.size();
  std::vector<std::vector<int>> adj(b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = i + 1; j < b; ++j) {
      const auto& p = bones[i];
      const auto& q = bones[j];
      if (p.start == q.start || p.start == q.end || p.end == q.start || p.end == q.end) {
        adj[i].push_back(static_cast<int>(j));
        adj[j].push_back(static_cast<int>(i));
      }
    }
  }
  return adj;
}

std::vector<int> bfs_hops(const std::vector<std::vector<int>>& adj, int source) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<int> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

}  // namespace

SkeletonTopology::SkeletonTopology(std::vector<std::string> joint_names, std::vector<Bone> bones,
                                   int root, SpecialJoints special,
                                   std::optional<Pose3D> rest_pose)
    : joint_names_(std::move(joint_names)),
      bones_(std::move(bones)),
      root_(root),
      special_(special),
      rest_pose_(std::move(rest_pose)) {
  const int n = num_joints();
  if (n < 2) throw TopologyError("a skeleton needs at least two joints");
  if (bones_.empty()) throw TopologyError("a skeleton needs at least one bone");

  std::set<std::string> names;
  for (const auto& name : joint_names_) {
    if (name.empty()) throw TopologyError("joint names must be non-empty");
    if (!names.insert(name).second) throw TopologyError("duplicate joint name '" + name + "'");
  }

  std::set<std::pair<int, int>> seen;
  std::vector<bool> touched(n, false);
  for (std::size_t k = 0; k < bones_.size(); ++k) {
    const auto& bone = bones_[k];
    if (bone.start < 0 || bone.start >= n || bone.end < 0 || bone.end >= n) {
      throw TopologyError(bone_label(k, bone) + " references a joint outside [0, " +
                          std::to_string(n) + ")");
    }
    if (bone.start == bone.end) throw TopologyError(bone_label(k, bone) + " starts and ends at the same joint");
    const auto key = std::minmax(bone.start, bone.end);
    if (!seen.insert(key).second) throw TopologyError(bone_label(k, bone) + " duplicates an earlier bone");
    touched[bone.start] = touched[bone.end] = true;
  }
  for (int j = 0; j < n; ++j) {
    if (!touched[j]) throw TopologyError("joint " + std::to_string(j) + " ('" + joint_names_[j] + "') has no bone");
  }

  const auto hops = bfs_hops(bone_adjacency(bones_), 0);
  for (std::size_t k = 0; k < hops.size(); ++k) {
    if (hops[k] < 0) throw TopologyError("bone graph is disconnected at " + bone_label(k, bones_[k]));
  }

  check_joint(root_, n, "root");
  check_joint(special_.nose, n, "nose");
  check_joint(special_.neck, n, "neck");
  check_joint(special_.left_shoulder, n, "left shoulder");
  check_joint(special_.right_shoulder, n, "right shoulder");
  if (special_.nose == special_.neck) throw TopologyError("nose and neck must be different joints");
  if (special_.left_shoulder == special_.right_shoulder) {
    throw TopologyError("left and right shoulder must be different joints");
  }
  if (rest_pose_ && rest_pose_->cols() != n) {
    throw TopologyError("rest pose has " + std::to_string(rest_pose_->cols()) + " joints, expected " +
                        std::to_string(n));
  }
}

int SkeletonTopology::find_joint(const std::string& name) const {
  const auto it = std::find(joint_names_.begin(), joint_names_.end(), name);
  return it == joint_names_.end() ? -1 : static_cast<int>(it - joint_names_.begin());
}

std::uint64_t SkeletonTopology::hash() const {
  std::ostringstream os;
  os << "joints";
  for (const auto& name : joint_names_) os << '|' << name;
  os << ";bones";
  for (const auto& b : bones_) os << '|' << b.start << ',' << b.end;
  os << ";root|" << root_ << ";special|" << special_.nose << ',' << special_.neck << ','
     << special_.left_shoulder << ',' << special_.right_shoulder;
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string SkeletonTopology::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

const SkeletonTopology& default_topology() {
  static const SkeletonTopology topology = [] {
    std::vector<std::string> names = {"hip",        "right_hip",      "right_knee",     "right_ankle",
                                      "left_hip",   "left_knee",      "left_ankle",     "spine",
                                      "neck",       "nose",           "head",           "left_shoulder",
                                      "left_elbow", "left_wrist",     "right_shoulder", "right_elbow",
                                      "right_wrist"};
    std::vector<Bone> bones = {{0, 1},  {1, 2},  {2, 3},   {0, 4},   {4, 5},   {5, 6},
                               {0, 7},  {7, 8},  {8, 9},   {9, 10},  {8, 11},  {11, 12},
                               {12, 13}, {8, 14}, {14, 15}, {15, 16}};
    // mm, y up, subject facing -z (towards a camera at the origin looking +z).
    // The subject's left side is at -x.
    Pose3D rest(3, 17);
    rest.col(0) << 0, 0, 0;
    rest.col(1) << 130, 0, 0;
    rest.col(2) << 130, -450, 10;
    rest.col(3) << 130, -890, 40;
    rest.col(4) << -130, 0, 0;
    rest.col(5) << -130, -450, 10;
    rest.col(6) << -130, -890, 40;
    rest.col(7) << 0, 230, 10;
    rest.col(8) << 0, 480, 0;
    rest.col(9) << 0, 580, -90;
    rest.col(10) << 0, 700, -20;
    rest.col(11) << -160, 470, 0;
    rest.col(12) << -180, 190, 20;
    rest.col(13) << -190, -60, -20;
    rest.col(14) << 160, 470, 0;
    rest.col(15) << 180, 190, 20;
    rest.col(16) << 190, -60, -20;
    return SkeletonTopology(std::move(names), std::move(bones), 0, SpecialJoints{9, 8, 11, 14},
                            std::move(rest));
  }();
  return topology;
}

SkeletonTopology topology_from_json(const nlohmann::json& j) {
  try {
    for (const auto& [key, _] : j.items()) {
      if (key != "joints" && key != "bones" && key != "root" && key != "special" && key != "rest_pose") {
        throw TopologyError("unknown topology field '" + key + "'");
      }
    }
    auto names = j.at("joints").get<std::vector<std::string>>();
    std::vector<Bone> bones;
    for (const auto& pair : j.at("bones")) {
      if (!pair.is_array() || pair.size() != 2) throw TopologyError("each bone must be an index pair");
      bones.push_back({pair[0].get<int>(), pair[1].get<int>()});
    }
    const auto& s = j.at("special");
    SpecialJoints special{s.at("nose").get<int>(), s.at("neck").get<int>(), s.at("lshoulder").get<int>(),
                          s.at("rshoulder").get<int>()};
    std::optional<Pose3D> rest;
    if (j.contains("rest_pose")) {
      const auto& rp = j.at("rest_pose");
      Pose3D p(3, static_cast<Index>(rp.size()));
      for (std::size_t k = 0; k < rp.size(); ++k) {
        const auto xyz = rp[k].get<std::vector<double>>();
        if (xyz.size() != 3) throw TopologyError("rest_pose entries must be [x, y, z]");
        p.col(static_cast<Index>(k)) << xyz[0], xyz[1], xyz[2];
      }
      rest = std::move(p);
    }
    return SkeletonTopology(std::move(names), std::move(bones), j.at("root").get<int>(), special,
                            std::move(rest));
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("malformed topology: ") + e.what());
  }
}

nlohmann::json topology_to_json(const SkeletonTopology& topology) {
  nlohmann::json j;
  j["joints"] = topology.joint_names();
  auto bones = nlohmann::json::array();
  for (const auto& b : topology.bones()) bones.push_back({b.start, b.end});
  j["bones"] = std::move(bones);
  j["root"] = topology.root();
  const auto& s = topology.special();
  j["special"] = {{"nose", s.nose}, {"neck", s.neck}, {"lshoulder", s.left_shoulder}, {"rshoulder", s.right_shoulder}};
  if (topology.rest_pose()) {
    auto rest = nlohmann::json::array();
    const auto& p = *topology.rest_pose();
    for (Index k = 0; k < p.cols(); ++k) rest.push_back({p(0, k), p(1, k), p(2, k)});
    j["rest_pose"] = std::move(rest);
  }
  return j;
}

SkeletonTopology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open topology file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError("cannot parse topology file " + path.string() + ": " + e.what());
  }
  return topology_from_json(j);
}

void save_topology(const SkeletonTopology& topology, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write topology file " + path.string());
  out << topology_to_json(topology).dump(2) << '\n';
}

IntMatrix build_incidence(const SkeletonTopology& topology) {
  IntMatrix c = IntMatrix::Zero(topology.num_joints(), topology.num_bones());
  for (int k = 0; k < topology.num_bones(); ++k) {
    const auto& bone = topology.bones()[k];
    c(bone.start, k) = 1;
    c(bone.end, k) = -1;
  }
  return c;
}

IntMatrix bone_distances(const SkeletonTopology& topology) {
  const int b = topology.num_bones();
  const auto adj = bone_adjacency(topology.bones());
  IntMatrix d(b, b);
  for (int i = 0; i < b; ++i) {
    const auto hops = bfs_hops(adj, i);
    for (int j = 0; j < b; ++j) {
      if (hops[j] < 0) throw TopologyError("bone graph is disconnected; distance undefined");
      d(i, j) = hops[j];
    }
  }
  return d;
}

KinematicTree kinematic_tree(const SkeletonTopology& topology) {
  const int n = topology.num_joints();
  std::vector<std::vector<int>> neighbours(n);
  for (const auto& b : topology.bones()) {
    neighbours[b.start].push_back(b.end);
    neighbours[b.end].push_back(b.start);
  }
  KinematicTree tree;
  tree.parent.assign(n, -2);
  tree.parent[topology.root()] = -1;
  std::queue<int> frontier;
  frontier.push(topology.root());
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    tree.order.push_back(u);
    for (int v : neighbours[u]) {
      if (tree.parent[v] == -2) {
        tree.parent[v] = u;
        frontier.push(v);
      }
    }
  }
  return tree;
}

}  // namespace synclift
