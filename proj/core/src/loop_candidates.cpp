#include "cge/loop_candidates.hpp"

#include <algorithm>

#include "cge/error.hpp"

namespace cge {

std::vector<LoopCandidate> enumerate_candidates(const CollabPoseGraph& cpg,
                                                const DistanceOracle& oracle,
                                                const Covariance& cov) {
  const double gamma = d_opt_weight(cov);
  std::vector<LoopCandidate> out;
  const int n = cpg.pose_count();
  for (PoseId i = 0; i < n; ++i) {
    for (PoseId j = i + 1; j < n; ++j) {
      if (cpg.has_edge(i, j)) continue;
      double travel = oracle.distance(cpg.pose(i).vertex, cpg.pose(j).vertex);
      if (!(travel > 0.0)) travel = kColocatedTravelFloor;
      out.push_back({i, j, gamma, travel, 0.0});
    }
  }
  return out;
}

namespace {

std::vector<LoopEdge> to_loop_edges(const std::vector<LoopCandidate>& candidates,
                                    const CollabPoseGraph& cpg) {
  std::vector<LoopEdge> edges;
  edges.reserve(candidates.size());
  for (const auto& c : candidates) {
    edges.push_back({cpg.row(c.i), cpg.row(c.j), c.gamma, c.travel});
  }
  return edges;
}

}  // namespace

void attach_initial_gains(std::vector<LoopCandidate>& candidates, const CollabPoseGraph& cpg,
                          const ReducedLaplacian& laplacian) {
  const auto edges = to_loop_edges(candidates, cpg);
  const auto gains = base_topology_gains(laplacian.matrix, edges);
  for (std::size_t k = 0; k < candidates.size(); ++k) candidates[k].initial_gain = gains[k];
}

double compute_d_max(const std::vector<LoopCandidate>& candidates) {
  double longest = 0.0;
  for (const auto& c : candidates) longest = std::max(longest, c.travel);
  return 2.0 * longest * static_cast<double>(candidates.size());
}

AlphaBounds compute_alpha(const std::vector<LoopCandidate>& candidates, double lambda) {
  if (candidates.empty()) throw Error(ErrorKind::NoCandidates, "ground set is empty");
  AlphaBounds b;
  b.min = b.max = candidates.front().ratio();
  for (const auto& c : candidates) {
    b.min = std::min(b.min, c.ratio());
    b.max = std::max(b.max, c.ratio());
  }
  b.alpha = b.min + lambda * (b.max - b.min);
  return b;
}

GroundSet prune_candidates(std::vector<LoopCandidate> candidates, const AlphaBounds& alpha,
                           double lambda) {
  GroundSet ground;
  ground.total_candidates = candidates.size();
  ground.d_max = compute_d_max(candidates);
  ground.alpha = alpha;
  ground.lambda = lambda;
  for (auto& c : candidates) {
    if (c.ratio() > alpha.alpha) ground.candidates.push_back(c);
  }
  std::sort(ground.candidates.begin(), ground.candidates.end(),
            [](const LoopCandidate& a, const LoopCandidate& b) {
              if (a.initial_gain != b.initial_gain) return a.initial_gain > b.initial_gain;
              if (a.i != b.i) return a.i < b.i;
              return a.j < b.j;
            });
  return ground;
}

GroundSet build_ground_set(const CollabPoseGraph& cpg, const DistanceOracle& oracle,
                           const ReducedLaplacian& laplacian, double lambda) {
  auto candidates = enumerate_candidates(cpg, oracle);
  attach_initial_gains(candidates, cpg, laplacian);
  const auto bounds = compute_alpha(candidates, lambda);
  return prune_candidates(std::move(candidates), bounds, lambda);
}

std::shared_ptr<const SelectionProblem> make_problem(const GroundSet& ground,
                                                     const CollabPoseGraph& cpg,
                                                     const ReducedLaplacian& laplacian) {
  auto problem = std::make_shared<SelectionProblem>();
  problem->base = laplacian.matrix;
  problem->edges = to_loop_edges(ground.candidates, cpg);
  problem->alpha = ground.alpha.alpha;
  problem->d_max = ground.d_max;
  return problem;
}

}  // namespace cge
