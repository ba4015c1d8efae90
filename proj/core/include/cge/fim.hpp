#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "cge/pose_graph.hpp"

namespace cge {

// An edge outside the pose graph (e.g. a selected loop closure) with its own
// covariance.
struct ExtraEdge {
  PoseId i = 0;
  PoseId j = 0;
  Covariance covariance = default_covariance();
};

// Fisher information of the SE(2) pose graph with identity orientations:
// sum over edges of B_ij B_ij^T (x) Sigma_ij^{-1}, anchored blocks removed.
// The global factor 1/2 of the Hessian is dropped.
struct FullFim {
  Eigen::MatrixXd matrix;  // 3 * free_count square
  int free_count = 0;

  double log_det() const;
};

// edge_covariances[e] belongs to cpg.edges()[e]. Throws Argument on a
// non-SPD covariance.
FullFim build_full_fim(const CollabPoseGraph& cpg, std::span<const Covariance> edge_covariances,
                       std::span<const ExtraEdge> extra = {});

// Reduced Laplacian weighted by the D-opt weight of each edge's covariance.
Eigen::MatrixXd covariance_weighted_laplacian(const CollabPoseGraph& cpg,
                                              std::span<const Covariance> edge_covariances,
                                              std::span<const ExtraEdge> extra = {});

double spd_log_det(const Eigen::MatrixXd& m);

struct UncertaintyPoint {
  double laplacian = 0.0;  // -log det L_gamma
  double fim = 0.0;        // -log det FIM
};

struct CorrelationParams {
  double side = 120.0;
  int trials = 50;
  int robots = 3;
  std::uint64_t seed = 7;
  bool heterogeneous = true;
  int max_extra_edges = 60;
  double vrp_time_limit_s = 5.0;
};

struct CorrelationReport {
  std::vector<UncertaintyPoint> points;
  std::vector<std::uint64_t> trial_seeds;
  double spearman = 0.0;
  double pearson = 0.0;
};

// Random environments, coverage walks and random loop subsets; for each
// trial records both uncertainty metrics. Heterogeneous trials draw each
// edge covariance as diag(s1^2, s2^2, t) with s ~ U[0.05, 0.2] m and
// t ~ U[0.0005, 0.002] rad^2.
CorrelationReport correlation_experiment(const CorrelationParams& params);

// Uncertainty metrics after adding each edge of `sequence` in turn; the
// first point is the bare pose graph.
std::vector<UncertaintyPoint> monotone_experiment(const CollabPoseGraph& cpg,
                                                  std::span<const Covariance> edge_covariances,
                                                  std::span<const ExtraEdge> sequence);

}  // namespace cge
