#include "cge/pose_graph.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "cge/error.hpp"

namespace cge {

const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Odometry: return "odometry";
    case EdgeKind::Revisit: return "revisit";
    case EdgeKind::InterRobot: return "inter-robot";
    case EdgeKind::Loop: return "loop";
  }
  return "unknown";
}

EdgeKind edge_kind_from_string(const std::string& name) {
  if (name == "odometry") return EdgeKind::Odometry;
  if (name == "revisit") return EdgeKind::Revisit;
  if (name == "inter-robot") return EdgeKind::InterRobot;
  if (name == "loop") return EdgeKind::Loop;
  throw Error(ErrorKind::Argument, "unknown edge kind '" + name + "'");
}

Covariance default_covariance() {
  return Eigen::Vector3d(0.1, 0.1, 0.001).asDiagonal();
}

double d_opt_weight(const Covariance& cov) {
  if (!cov.isApprox(cov.transpose(), 1e-12)) {
    throw Error(ErrorKind::Argument, "covariance is not symmetric");
  }
  Eigen::LLT<Covariance> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Argument, "covariance is not positive definite");
  }
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return std::exp(-log_det / 3.0);
}

RobotPoseGraph build_abstracted(const Walk& walk, const Covariance& cov) {
  if (walk.vertices.empty()) throw Error(ErrorKind::Argument, "empty walk");
  const double weight = d_opt_weight(cov);
  RobotPoseGraph g;
  g.robot = walk.robot;
  std::map<VertexId, PoseId> local;
  std::map<std::pair<PoseId, PoseId>, bool> seen;
  PoseId prev = -1;
  for (VertexId v : walk.vertices) {
    auto it = local.find(v);
    bool fresh = false;
    if (it == local.end()) {
      it = local.emplace(v, static_cast<PoseId>(g.pose_vertices.size())).first;
      g.pose_vertices.push_back(v);
      fresh = true;
    }
    const PoseId cur = it->second;
    if (prev >= 0 && prev != cur) {
      const auto k = std::minmax(prev, cur);
      if (seen.emplace(k, true).second) {
        g.edges.push_back({prev, cur, fresh ? EdgeKind::Odometry : EdgeKind::Revisit, cov, weight});
      }
    }
    prev = cur;
  }
  return g;
}

std::uint64_t CollabPoseGraph::key(PoseId a, PoseId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::uint64_t CollabPoseGraph::pose_key(int robot, VertexId vertex) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(robot)) << 32) |
         static_cast<std::uint32_t>(vertex);
}

CollabPoseGraph::CollabPoseGraph(std::vector<Pose> poses, std::vector<PoseEdge> edges,
                                 std::vector<PoseId> anchors)
    : poses_(std::move(poses)),
      edges_(std::move(edges)),
      anchors_(std::move(anchors)),
      row_(poses_.size(), 0) {
  const int n = pose_count();
  for (PoseId p = 0; p < n; ++p) {
    if (!pose_index_.emplace(pose_key(poses_[p].robot, poses_[p].vertex), p).second) {
      throw Error(ErrorKind::Argument, "robot has two poses at the same vertex");
    }
  }
  for (PoseId a : anchors_) {
    if (a < 0 || a >= n) throw Error(ErrorKind::Argument, "anchor out of range");
    row_[a] = -1;
  }
  for (PoseId p = 0; p < n; ++p) {
    if (row_[p] == 0) row_[p] = free_count_++;
    else row_[p] = -1;
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (edge.i < 0 || edge.j < 0 || edge.i >= n || edge.j >= n || edge.i == edge.j) {
      throw Error(ErrorKind::Argument, "pose edge endpoints invalid");
    }
    if (!(edge.weight > 0.0)) throw Error(ErrorKind::Argument, "edge weight must be positive");
    if (!edge_index_.emplace(key(edge.i, edge.j), e).second) {
      throw Error(ErrorKind::Argument, "duplicate pose edge");
    }
  }
}

int CollabPoseGraph::robot_count() const {
  int robots = 0;
  for (const auto& p : poses_) robots = std::max(robots, p.robot + 1);
  return robots;
}

bool CollabPoseGraph::has_edge(PoseId a, PoseId b) const {
  return edge_index_.contains(key(a, b));
}

std::optional<PoseId> CollabPoseGraph::find_pose(int robot, VertexId vertex) const {
  auto it = pose_index_.find(pose_key(robot, vertex));
  if (it == pose_index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<int> components(const CollabPoseGraph& g) {
  std::vector<int> parent(g.pose_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges()) parent[find(e.i)] = find(e.j);
  std::vector<int> out(g.pose_count());
  for (int p = 0; p < g.pose_count(); ++p) out[p] = find(p);
  return out;
}

}  // namespace

bool CollabPoseGraph::is_connected() const {
  if (poses_.empty()) return true;
  const auto comp = components(*this);
  return std::all_of(comp.begin(), comp.end(), [&](int c) { return c == comp[0]; });
}

bool CollabPoseGraph::every_component_anchored() const {
  const auto comp = components(*this);
  std::vector<char> anchored(poses_.size(), 0);
  for (PoseId a : anchors_) anchored[comp[a]] = 1;
  for (int p = 0; p < pose_count(); ++p) {
    if (!anchored[comp[p]]) return false;
  }
  return true;
}

bool CollabPoseGraph::operator==(const CollabPoseGraph& other) const {
  if (poses_.size() != other.poses_.size() || edges_.size() != other.edges_.size() ||
      anchors_ != other.anchors_) {
    return false;
  }
  for (std::size_t p = 0; p < poses_.size(); ++p) {
    if (poses_[p].robot != other.poses_[p].robot || poses_[p].vertex != other.poses_[p].vertex) {
      return false;
    }
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& a = edges_[e];
    const auto& b = other.edges_[e];
    if (a.i != b.i || a.j != b.j || a.kind != b.kind || a.weight != b.weight ||
        a.covariance != b.covariance) {
      return false;
    }
  }
  return true;
}

CollabPoseGraph merge_collaborative(std::span<const RobotPoseGraph> graphs,
                                    const Covariance& cov) {
  if (graphs.empty()) throw Error(ErrorKind::Argument, "no robot pose graphs to merge");
  const double weight = d_opt_weight(cov);
  std::vector<Pose> poses;
  std::vector<PoseEdge> edges;
  std::vector<PoseId> anchors;
  std::map<VertexId, std::vector<PoseId>> visitors;
  for (const auto& g : graphs) {
    const PoseId offset = static_cast<PoseId>(poses.size());
    if (g.pose_vertices.empty()) throw Error(ErrorKind::Argument, "robot graph has no poses");
    anchors.push_back(offset);
    for (std::size_t k = 0; k < g.pose_vertices.size(); ++k) {
      poses.push_back({g.robot, g.pose_vertices[k]});
      visitors[g.pose_vertices[k]].push_back(offset + static_cast<PoseId>(k));
    }
    for (const auto& e : g.edges) {
      PoseEdge shifted = e;
      shifted.i += offset;
      shifted.j += offset;
      edges.push_back(shifted);
    }
  }
  for (const auto& [vertex, ids] : visitors) {
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        edges.push_back({ids[a], ids[b], EdgeKind::InterRobot, cov, weight});
      }
    }
  }
  return CollabPoseGraph(std::move(poses), std::move(edges), std::move(anchors));
}

CollabPoseGraph build_collab_pose_graph(std::span<const Walk> walks, const Covariance& cov) {
  std::vector<RobotPoseGraph> graphs;
  graphs.reserve(walks.size());
  for (const auto& w : walks) graphs.push_back(build_abstracted(w, cov));
  return merge_collaborative(graphs, cov);
}

void add_weighted_edge(Eigen::MatrixXd& laplacian, int row_i, int row_j, double weight) {
  if (row_i >= 0) laplacian(row_i, row_i) += weight;
  if (row_j >= 0) laplacian(row_j, row_j) += weight;
  if (row_i >= 0 && row_j >= 0) {
    laplacian(row_i, row_j) -= weight;
    laplacian(row_j, row_i) -= weight;
  }
}

namespace {

ReducedLaplacian assemble(const CollabPoseGraph& cpg, bool weighted) {
  if (!cpg.every_component_anchored()) {
    throw Error(ErrorKind::SingularLaplacian,
                "a pose-graph component has no anchored pose");
  }
  ReducedLaplacian out;
  out.matrix = Eigen::MatrixXd::Zero(cpg.free_count(), cpg.free_count());
  out.row_of_pose.resize(cpg.pose_count());
  for (PoseId p = 0; p < cpg.pose_count(); ++p) out.row_of_pose[p] = cpg.row(p);
  for (const auto& e : cpg.edges()) {
    add_weighted_edge(out.matrix, cpg.row(e.i), cpg.row(e.j), weighted ? e.weight : 1.0);
  }
  return out;
}

}  // namespace

ReducedLaplacian reduced_weighted_laplacian(const CollabPoseGraph& cpg) {
  return assemble(cpg, true);
}

ReducedLaplacian reduced_unweighted_laplacian(const CollabPoseGraph& cpg) {
  return assemble(cpg, false);
}

}  // namespace cge
