#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cge/env_graph.hpp"
#include "cge/vrp.hpp"

namespace cge {

using PoseId = int;
using Covariance = Eigen::Matrix3d;  // SE(2): x, y, heading

enum class EdgeKind { Odometry, Revisit, InterRobot, Loop };

const char* to_string(EdgeKind kind);
EdgeKind edge_kind_from_string(const std::string& name);

// Covariance used for every odometry, closure and candidate edge unless
// overridden: diag{0.1 m, 0.1 m, 0.001 rad}.
Covariance default_covariance();

// D-optimal information weight det(Sigma^-1)^(1/3). Throws on non-SPD input.
double d_opt_weight(const Covariance& cov);

struct Pose {
  int robot = 0;
  VertexId vertex = 0;
};

struct PoseEdge {
  PoseId i = 0;
  PoseId j = 0;
  EdgeKind kind = EdgeKind::Odometry;
  Covariance covariance = Covariance::Identity();
  double weight = 1.0;
};

// Abstracted single-robot pose graph: one pose per distinct visited vertex
// (first-visit order), an edge between poses of consecutively visited
// vertices. Edge endpoints are local pose indices.
struct RobotPoseGraph {
  int robot = 0;
  std::vector<VertexId> pose_vertices;
  std::vector<PoseEdge> edges;
};

RobotPoseGraph build_abstracted(const Walk& walk, const Covariance& cov = default_covariance());

class CollabPoseGraph {
 public:
  CollabPoseGraph() = default;
  CollabPoseGraph(std::vector<Pose> poses, std::vector<PoseEdge> edges,
                  std::vector<PoseId> anchors);

  int pose_count() const { return static_cast<int>(poses_.size()); }
  const std::vector<Pose>& poses() const { return poses_; }
  const Pose& pose(PoseId id) const { return poses_[id]; }
  const std::vector<PoseEdge>& edges() const { return edges_; }
  const std::vector<PoseId>& anchors() const { return anchors_; }
  bool is_anchor(PoseId id) const { return row_[id] < 0; }
  int robot_count() const;

  // Number of non-anchored poses, the dimension of the reduced Laplacian.
  int free_count() const { return free_count_; }
  // Row of a pose in the reduced Laplacian, or -1 when anchored.
  int row(PoseId id) const { return row_[id]; }

  bool has_edge(PoseId a, PoseId b) const;
  std::optional<PoseId> find_pose(int robot, VertexId vertex) const;

  bool is_connected() const;
  bool every_component_anchored() const;

  bool operator==(const CollabPoseGraph& other) const;

 private:
  static std::uint64_t key(PoseId a, PoseId b);
  static std::uint64_t pose_key(int robot, VertexId vertex);

  std::vector<Pose> poses_;
  std::vector<PoseEdge> edges_;
  std::vector<PoseId> anchors_;
  std::vector<int> row_;
  int free_count_ = 0;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
  std::unordered_map<std::uint64_t, PoseId> pose_index_;
};

// Disjoint union of robot graphs; every vertex visited by k >= 2 robots gets
// the C(k,2) pairwise inter-robot edges. Anchors are the robots' first poses.
CollabPoseGraph merge_collaborative(std::span<const RobotPoseGraph> graphs,
                                    const Covariance& cov = default_covariance());

// build_abstracted per walk, then merge_collaborative.
CollabPoseGraph build_collab_pose_graph(std::span<const Walk> walks,
                                        const Covariance& cov = default_covariance());

struct ReducedLaplacian {
  Eigen::MatrixXd matrix;      // free_count x free_count, SPD
  std::vector<int> row_of_pose;  // -1 for anchored poses
};

// Accumulates w * b b^T where b = e_row_i - e_row_j restricted to free rows.
void add_weighted_edge(Eigen::MatrixXd& laplacian, int row_i, int row_j, double weight);

// Sum of gamma_ij B_ij B_ij^T over all edges with anchored rows removed.
// Throws SingularLaplacian when a connected component has no anchor.
ReducedLaplacian reduced_weighted_laplacian(const CollabPoseGraph& cpg);

// Same with every edge weight set to one.
ReducedLaplacian reduced_unweighted_laplacian(const CollabPoseGraph& cpg);

}  // namespace cge
