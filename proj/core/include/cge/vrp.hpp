#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cge/env_graph.hpp"

namespace cge {

// Open min-makespan coverage routes over the metric closure of G. Route r
// starts at that robot's start vertex; ends are free.
struct VrpSolution {
  std::vector<std::vector<VertexId>> routes;
  std::vector<double> lengths;  // meters, metric-closure lengths
  double makespan = 0.0;
  std::uint64_t seed = 0;
  int improving_moves = 0;  // local-search moves applied
  bool hit_time_limit = false;
};

// A route realized on G: consecutive vertices are adjacent.
struct Walk {
  int robot = 0;
  std::vector<VertexId> vertices;
  double length = 0.0;
};

struct VrpOptions {
  double time_limit_s = 20.0;
  std::uint64_t seed = 0;
};

double route_length(const DistanceOracle& oracle, std::span<const VertexId> route);

// Greedy balanced construction (the shortest current route claims its
// nearest unassigned vertex), nearest-neighbor reordering, then 2-opt,
// relocate and swap moves accepted only when (makespan, total length)
// strictly decreases lexicographically with makespan never increasing.
VrpSolution solve_vrp(const EnvGraph& env, const DistanceOracle& oracle,
                      std::span<const VertexId> starts, const VrpOptions& options = {});

Walk expand_to_walk(const DistanceOracle& oracle, int robot,
                    std::span<const VertexId> route);

std::vector<Walk> expand_all(const DistanceOracle& oracle, const VrpSolution& solution);

}  // namespace cge
