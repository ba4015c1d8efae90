#pragma once

#include <memory>
#include <vector>

#include "cge/env_graph.hpp"
#include "cge/objective.hpp"
#include "cge/pose_graph.hpp"

namespace cge {

// Travel distance assigned to candidates whose two poses sit on the same
// environment vertex.
inline constexpr double kColocatedTravelFloor = 0.1;

struct LoopCandidate {
  PoseId i = 0;  // i < j
  PoseId j = 0;
  double gamma = 0.0;
  double travel = 0.0;        // shortest-path distance in G, meters
  double initial_gain = 0.0;  // (1/n) log(1 + gamma b^T L0^{-1} b)

  // Topology gain per meter of detour, the quantity alpha is compared to.
  double ratio() const { return initial_gain / (2.0 * travel); }
};

struct AlphaBounds {
  double min = 0.0;
  double max = 0.0;
  double alpha = 0.0;
};

struct GroundSet {
  std::vector<LoopCandidate> candidates;  // pruned, deterministic order
  std::size_t total_candidates = 0;       // |S| before pruning
  double d_max = 0.0;                     // frozen over the unpruned set
  AlphaBounds alpha;
  double lambda = 0.0;
};

// Every pose pair (i < j) without a direct edge. Initial gains are left at 0;
// attach_initial_gains fills them from the reduced Laplacian.
std::vector<LoopCandidate> enumerate_candidates(const CollabPoseGraph& cpg,
                                                const DistanceOracle& oracle,
                                                const Covariance& cov = default_covariance());

void attach_initial_gains(std::vector<LoopCandidate>& candidates, const CollabPoseGraph& cpg,
                          const ReducedLaplacian& laplacian);

// 2 * max omega * |S|.
double compute_d_max(const std::vector<LoopCandidate>& candidates);

// alpha = alpha_min + lambda (alpha_max - alpha_min) over the ratio of the
// topology-only initial gain to the 2 omega detour cost.
AlphaBounds compute_alpha(const std::vector<LoopCandidate>& candidates, double lambda = 0.3);

// Keeps candidates whose ratio strictly exceeds alpha, sorted by descending
// initial gain and then ascending (i, j).
GroundSet prune_candidates(std::vector<LoopCandidate> candidates, const AlphaBounds& alpha,
                           double lambda);

// Full stage: enumerate, score, bound alpha, prune.
GroundSet build_ground_set(const CollabPoseGraph& cpg, const DistanceOracle& oracle,
                           const ReducedLaplacian& laplacian, double lambda = 0.3);

std::shared_ptr<const SelectionProblem> make_problem(const GroundSet& ground,
                                                     const CollabPoseGraph& cpg,
                                                     const ReducedLaplacian& laplacian);

}  // namespace cge
