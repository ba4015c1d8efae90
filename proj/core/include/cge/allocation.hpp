#pragma once

#include <span>
#include <vector>

#include "cge/env_graph.hpp"
#include "cge/loop_candidates.hpp"
#include "cge/pose_graph.hpp"
#include "cge/vrp.hpp"

namespace cge {

// A selected loop edge resolved to robots and environment vertices.
struct SelectedLoop {
  PoseId i = 0;
  PoseId j = 0;
  int robot_i = 0;
  int robot_j = 0;
  VertexId vertex_i = 0;
  VertexId vertex_j = 0;
  double travel = 0.0;  // omega(z), meters

  bool intra() const { return robot_i == robot_j; }
};

std::vector<SelectedLoop> resolve_selection(const GroundSet& ground, std::span<const int> selected,
                                            const CollabPoseGraph& cpg);

// Go-and-return excursion spliced into a walk right after base_index:
// at -> target -> at along shortest paths in G.
struct Detour {
  int robot = 0;
  std::size_t base_index = 0;
  VertexId at = 0;
  VertexId target = 0;
  double travel = 0.0;  // one-way omega; the detour costs 2 * travel
  int loop = -1;        // index into the selected loops
};

// Base walks plus the detours inserted so far.
struct PlanDraft {
  std::vector<Walk> walks;
  std::vector<Detour> detours;

  double length(int robot) const;
};

// Splices <v_j, v_i, v_j> at the first occurrence of v_j in the robot's
// walk. Requires robot_i == robot_j.
void insert_intra(PlanDraft& draft, const SelectedLoop& loop, int loop_index);

struct InterEdge {
  int robot_first = 0;   // M_R(x_i)
  int robot_second = 0;  // M_R(x_j)
  double cost = 0.0;     // 2 omega
};

struct Allocation {
  std::vector<char> to_first;  // 1: assigned to robot_first
  std::vector<double> lengths;
  double makespan = 0.0;
  std::size_t nodes = 0;
  // False when the node budget ran out before optimality was proven; the
  // assignment is then the best one found.
  bool proven_optimal = true;
};

inline constexpr std::size_t kAllocationNodeBudget = 2'000'000;

// Min-makespan assignment by depth-first branch-and-bound. Among optimal
// assignments, returns the first in lexicographic order with
// "assign to robot_first" ranked before "assign to robot_second".
// Each of the two search passes stops after node_budget nodes.
Allocation allocate_inter(std::span<const InterEdge> edges, std::span<const double> base_lengths,
                          std::size_t node_budget = kAllocationNodeBudget);

struct FinalPlan {
  std::vector<Walk> walks;      // materialized, detours included
  std::vector<double> base_lengths;  // VRP walk lengths
  std::vector<double> lengths;  // base + sum of 2 omega of the robot's detours
  double makespan = 0.0;
  std::vector<Detour> detours;
  std::vector<SelectedLoop> loops;
  std::vector<int> assigned_robot;  // per loop
  bool allocation_optimal = true;
};

// Materializes the draft: every detour expands to shortest paths both ways.
// Throws Consistency if the walks no longer cover every vertex of G.
FinalPlan finalize(const EnvGraph& env, const DistanceOracle& oracle, const PlanDraft& draft,
                   std::vector<SelectedLoop> loops);

// Intra loops first, then inter loops by allocate_inter, then finalize.
FinalPlan plan_with_loops(const EnvGraph& env, const DistanceOracle& oracle,
                          std::vector<Walk> walks, std::vector<SelectedLoop> loops);

}  // namespace cge
