#include "cge/allocation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "cge/error.hpp"

namespace cge {

std::vector<SelectedLoop> resolve_selection(const GroundSet& ground, std::span<const int> selected,
                                            const CollabPoseGraph& cpg) {
  std::vector<SelectedLoop> out;
  for (int k : selected) {
    const auto& c = ground.candidates.at(k);
    const auto& pi = cpg.pose(c.i);
    const auto& pj = cpg.pose(c.j);
    out.push_back({c.i, c.j, pi.robot, pj.robot, pi.vertex, pj.vertex, c.travel});
  }
  return out;
}

double PlanDraft::length(int robot) const {
  double total = walks.at(robot).length;
  for (const auto& d : detours) {
    if (d.robot == robot) total += 2.0 * d.travel;
  }
  return total;
}

namespace {

Detour make_detour(const PlanDraft& draft, int robot, VertexId at, VertexId target,
                   double travel, int loop_index) {
  if (robot < 0 || robot >= static_cast<int>(draft.walks.size())) {
    throw Error(ErrorKind::Consistency, "loop edge references an unknown robot");
  }
  const auto& vs = draft.walks[robot].vertices;
  const auto it = std::find(vs.begin(), vs.end(), at);
  if (it == vs.end()) {
    throw Error(ErrorKind::Consistency, "loop edge pose is not on the robot's walk");
  }
  return {robot, static_cast<std::size_t>(it - vs.begin()), at, target, travel, loop_index};
}

}  // namespace

void insert_intra(PlanDraft& draft, const SelectedLoop& loop, int loop_index) {
  if (!loop.intra()) throw Error(ErrorKind::Argument, "loop edge spans two robots");
  draft.detours.push_back(
      make_detour(draft, loop.robot_j, loop.vertex_j, loop.vertex_i, loop.travel, loop_index));
}

namespace {

// Two passes. The first finds the optimal makespan, visiting large edges
// first and the lighter robot first so a good incumbent appears early. The
// second walks assignments in lexicographic order (first robot before second)
// and stops at the first one that reaches that makespan.
class BranchAndBound {
 public:
  BranchAndBound(std::span<const InterEdge> edges, std::span<const double> base,
                 std::size_t budget)
      : budget_(budget),
        edges_(edges.begin(), edges.end()),
        base_(base.begin(), base.end()),
        robots_(static_cast<int>(base.size())) {
    for (const auto& e : edges_) {
      const int hi = std::max(e.robot_first, e.robot_second);
      if (e.robot_first < 0 || e.robot_second < 0 || hi >= robots_) {
        throw Error(ErrorKind::Argument, "inter edge references an unknown robot");
      }
      if (e.robot_first == e.robot_second) {
        throw Error(ErrorKind::Argument, "inter edge must reference two distinct robots");
      }
      if (!(e.cost >= 0.0) || !std::isfinite(e.cost)) {
        throw Error(ErrorKind::Argument, "inter edge cost must be finite and non-negative");
      }
    }
  }

  Allocation run() {
    const double optimum = optimal_value();
    bool proven = nodes_ <= budget_;
    Pass lex(edges_, robots_, base_);
    std::vector<char> choice(edges_.size(), 1);
    const double cap = optimum + tolerance(optimum);
    nodes_lex_ = 0;
    if (!feasible(lex, 0, cap, choice)) {
      if (nodes_lex_ <= budget_) {
        throw Error(ErrorKind::SolverInternal, "allocation search lost its optimum");
      }
      // Budget ran out before the lexicographic pass met the incumbent.
      choice = incumbent_;
      proven = false;
    }
    Allocation out;
    out.proven_optimal = proven;
    out.to_first = choice;
    out.lengths = base_;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const auto& e = edges_[k];
      out.lengths[choice[k] ? e.robot_first : e.robot_second] += e.cost;
    }
    out.makespan = *std::max_element(out.lengths.begin(), out.lengths.end());
    out.nodes = nodes_ + nodes_lex_;
    return out;
  }

 private:
  static double tolerance(double value) { return 1e-9 * std::max(1.0, std::abs(value)); }

  // Edge order plus per-depth suffix sums of the cost carried by each robot
  // pair, for the subset relaxation below.
  struct Pass {
    Pass(std::vector<InterEdge> e, int robots, const std::vector<double>& base)
        : edges(std::move(e)), loads(base), m(robots) {
      const std::size_t k = edges.size();
      pair_cost.assign((k + 1) * m * m, 0.0);
      for (std::size_t d = k; d-- > 0;) {
        std::copy_n(pair_cost.begin() + (d + 1) * m * m, m * m, pair_cost.begin() + d * m * m);
        const int a = std::min(edges[d].robot_first, edges[d].robot_second);
        const int b = std::max(edges[d].robot_first, edges[d].robot_second);
        pair_cost[d * m * m + a * m + b] += edges[d].cost;
      }
    }
    std::vector<InterEdge> edges;
    std::vector<double> loads;
    int m;
    std::vector<double> pair_cost;
  };

  static constexpr int kMaxSubsetRobots = 10;

  // Any robot subset R must absorb the remaining edges with both ends in R,
  // so the makespan is at least (load(R) + inside(R)) / |R|. Also each
  // remaining edge lands on one of its two robots.
  static double lower_bound(const Pass& p, std::size_t depth) {
    double bound = *std::max_element(p.loads.begin(), p.loads.end());
    const std::size_t k = p.edges.size();
    if (depth == k) return bound;
    for (std::size_t d = depth; d < k; ++d) {
      const auto& e = p.edges[d];
      bound = std::max(bound, std::min(p.loads[e.robot_first], p.loads[e.robot_second]) + e.cost);
    }
    const int m = p.m;
    const double* pc = p.pair_cost.data() + depth * m * m;
    if (m <= kMaxSubsetRobots) {
      for (unsigned mask = 3; mask < (1U << m); ++mask) {
        if (std::popcount(mask) < 2) continue;
        double total = 0.0;
        for (int a = 0; a < m; ++a) {
          if (!(mask >> a & 1U)) continue;
          total += p.loads[a];
          for (int b = a + 1; b < m; ++b) {
            if (mask >> b & 1U) total += pc[a * m + b];
          }
        }
        bound = std::max(bound, total / std::popcount(mask));
      }
    } else {
      double total = 0.0;
      for (int a = 0; a < m; ++a) {
        total += p.loads[a];
        for (int b = a + 1; b < m; ++b) total += pc[a * m + b];
      }
      bound = std::max(bound, total / m);
    }
    return bound;
  }

  double optimal_value() {
    std::vector<std::size_t> order(edges_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return edges_[x].cost > edges_[y].cost; });
    std::vector<InterEdge> sorted;
    for (std::size_t k : order) sorted.push_back(edges_[k]);
    Pass p(std::move(sorted), robots_, base_);

    order_ = std::move(order);
    current_.assign(edges_.size(), 1);
    incumbent_.assign(edges_.size(), 1);

    // Greedy incumbent: each edge to whichever endpoint stays lighter.
    std::vector<double> loads = base_;
    for (std::size_t d = 0; d < p.edges.size(); ++d) {
      const auto& e = p.edges[d];
      const bool first = loads[e.robot_first] <= loads[e.robot_second];
      loads[first ? e.robot_first : e.robot_second] += e.cost;
      incumbent_[order_[d]] = first ? 1 : 0;
    }
    double best = *std::max_element(loads.begin(), loads.end());
    improve(p, 0, best);
    return best;
  }

  void improve(Pass& p, std::size_t depth, double& best) {
    if (++nodes_ > budget_) return;
    if (depth == p.edges.size()) {
      const double value = *std::max_element(p.loads.begin(), p.loads.end());
      if (value < best) {
        best = value;
        incumbent_ = current_;
      }
      return;
    }
    if (lower_bound(p, depth) >= best - tolerance(best)) return;
    const auto& e = p.edges[depth];
    const bool first_lighter = p.loads[e.robot_first] <= p.loads[e.robot_second];
    for (const int r : {first_lighter ? e.robot_first : e.robot_second,
                        first_lighter ? e.robot_second : e.robot_first}) {
      const double saved = p.loads[r];
      p.loads[r] += e.cost;
      current_[order_[depth]] = r == e.robot_first ? 1 : 0;
      improve(p, depth + 1, best);
      p.loads[r] = saved;
      if (nodes_ > budget_) return;
      if (lower_bound(p, depth) >= best - tolerance(best)) return;
    }
  }

  bool feasible(Pass& p, std::size_t depth, double cap, std::vector<char>& choice) {
    if (++nodes_lex_ > budget_) return false;
    if (lower_bound(p, depth) > cap) return false;
    if (depth == p.edges.size()) return true;
    const auto& e = p.edges[depth];
    for (const char first : {char{1}, char{0}}) {
      const int r = first ? e.robot_first : e.robot_second;
      const double saved = p.loads[r];
      p.loads[r] += e.cost;
      choice[depth] = first;
      const bool ok = feasible(p, depth + 1, cap, choice);
      p.loads[r] = saved;
      if (ok) return true;
    }
    return false;
  }

  std::size_t budget_;
  std::vector<InterEdge> edges_;
  std::vector<double> base_;
  int robots_;
  std::vector<std::size_t> order_;  // search position -> edge index
  std::vector<char> current_;
  std::vector<char> incumbent_;
  std::size_t nodes_ = 0;
  std::size_t nodes_lex_ = 0;
};

}  // namespace

Allocation allocate_inter(std::span<const InterEdge> edges, std::span<const double> base_lengths,
                          std::size_t node_budget) {
  if (base_lengths.empty()) throw Error(ErrorKind::Argument, "no robots to allocate to");
  return BranchAndBound(edges, base_lengths, node_budget).run();
}

FinalPlan finalize(const EnvGraph& env, const DistanceOracle& oracle, const PlanDraft& draft,
                   std::vector<SelectedLoop> loops) {
  FinalPlan plan;
  plan.loops = std::move(loops);
  plan.assigned_robot.assign(plan.loops.size(), -1);
  plan.detours = draft.detours;
  for (const auto& d : plan.detours) {
    if (d.loop >= 0) plan.assigned_robot.at(d.loop) = d.robot;
  }

  std::vector<char> covered(env.vertex_count(), 0);
  for (std::size_t r = 0; r < draft.walks.size(); ++r) {
    const Walk& base = draft.walks[r];
    std::vector<std::vector<const Detour*>> at_index(base.vertices.size());
    for (const auto& d : plan.detours) {
      if (d.robot == static_cast<int>(r)) at_index.at(d.base_index).push_back(&d);
    }
    Walk walk;
    walk.robot = base.robot;
    for (std::size_t k = 0; k < base.vertices.size(); ++k) {
      walk.vertices.push_back(base.vertices[k]);
      for (const Detour* d : at_index[k]) {
        const auto out = oracle.path(d->at, d->target);
        const auto back = oracle.path(d->target, d->at);
        walk.vertices.insert(walk.vertices.end(), out.begin() + 1, out.end());
        walk.vertices.insert(walk.vertices.end(), back.begin() + 1, back.end());
      }
    }
    for (std::size_t k = 1; k < walk.vertices.size(); ++k) {
      walk.length += env.edge_length(walk.vertices[k - 1], walk.vertices[k]);
    }
    for (VertexId v : walk.vertices) covered[v] = 1;
    plan.base_lengths.push_back(base.length);
    plan.lengths.push_back(draft.length(static_cast<int>(r)));
    plan.walks.push_back(std::move(walk));
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    throw Error(ErrorKind::Consistency, "final plan does not cover every vertex");
  }
  plan.makespan = plan.lengths.empty()
                      ? 0.0
                      : *std::max_element(plan.lengths.begin(), plan.lengths.end());
  return plan;
}

FinalPlan plan_with_loops(const EnvGraph& env, const DistanceOracle& oracle,
                          std::vector<Walk> walks, std::vector<SelectedLoop> loops) {
  PlanDraft draft;
  draft.walks = std::move(walks);
  std::vector<InterEdge> inter;
  std::vector<int> inter_loop;
  for (std::size_t k = 0; k < loops.size(); ++k) {
    const auto& loop = loops[k];
    if (loop.intra()) {
      insert_intra(draft, loop, static_cast<int>(k));
    } else {
      inter.push_back({loop.robot_i, loop.robot_j, 2.0 * loop.travel});
      inter_loop.push_back(static_cast<int>(k));
    }
  }
  std::vector<double> base;
  for (std::size_t r = 0; r < draft.walks.size(); ++r) base.push_back(draft.length(static_cast<int>(r)));
  bool optimal = true;
  if (!inter.empty()) {
    const Allocation alloc = allocate_inter(inter, base);
    optimal = alloc.proven_optimal;
    for (std::size_t e = 0; e < inter.size(); ++e) {
      const auto& loop = loops[inter_loop[e]];
      if (alloc.to_first[e]) {
        draft.detours.push_back(make_detour(draft, loop.robot_i, loop.vertex_i, loop.vertex_j,
                                            loop.travel, inter_loop[e]));
      } else {
        draft.detours.push_back(make_detour(draft, loop.robot_j, loop.vertex_j, loop.vertex_i,
                                            loop.travel, inter_loop[e]));
      }
    }
  }
  FinalPlan plan = finalize(env, oracle, draft, std::move(loops));
  plan.allocation_optimal = optimal;
  return plan;
}

}  // namespace cge
