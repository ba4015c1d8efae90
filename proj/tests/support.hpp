#pragma once

// Shared fixtures and independent reference implementations for the tests.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "cge/allocation.hpp"
#include "cge/objective.hpp"
#include "cge/rng.hpp"
#include "cge/usm.hpp"

namespace cge::testing {

// Dense log det via a fresh Eigen LDLT, no shared code with the library.
inline double dense_log_det(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  double s = 0.0;
  for (int k = 0; k < m.rows(); ++k) s += std::log(ldlt.vectorD()(k));
  return s;
}

inline Eigen::VectorXd edge_vector(int dim, int ri, int rj) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  if (ri >= 0) b(ri) += 1.0;
  if (rj >= 0) b(rj) -= 1.0;
  return b;
}

inline double reference_log_det(const SelectionProblem& p, const std::vector<int>& subset) {
  Eigen::MatrixXd l = p.base;
  for (int z : subset) {
    const auto& e = p.edges[z];
    const Eigen::VectorXd b = edge_vector(p.dim(), e.row_i, e.row_j);
    l += e.gamma * b * b.transpose();
  }
  return dense_log_det(l);
}

// Independent evaluation of the set function from its definition.
inline double reference_objective(const SelectionProblem& p, const std::vector<int>& subset) {
  double travel = 0.0;
  for (int z : subset) travel += 2.0 * p.edges[z].travel;
  return reference_log_det(p, subset) / p.dim() - p.alpha * travel + p.d_max;
}

// f(A + z) - f(A) from two dense factorizations, without the d_max offset
// that would otherwise cancel.
inline double reference_marginal(const SelectionProblem& p, std::vector<int> subset, int z) {
  const double before = reference_log_det(p, subset);
  subset.push_back(z);
  return (reference_log_det(p, subset) - before) / p.dim() - 2.0 * p.alpha * p.edges[z].travel;
}

struct RandomProblemSpec {
  int poses = 8;       // reduced dimension; pose 0 is the anchor (row -1)
  int candidates = 10;
  double gamma_lo = 1.0;
  double gamma_hi = 50.0;
  double travel_lo = 1.0;
  double travel_hi = 30.0;
  double alpha_quantile = 0.5;  // alpha sits at this quantile of gain/(2 omega)
  bool with_d_max = true;
};

// Anchored chain plus a few random chords as the base graph, random extra
// pose pairs as candidates. Rows are pose index - 1.
inline std::shared_ptr<SelectionProblem> random_problem(Rng& rng, const RandomProblemSpec& spec) {
  auto p = std::make_shared<SelectionProblem>();
  const int n = spec.poses;
  p->base = Eigen::MatrixXd::Zero(n, n);
  auto row = [](int pose) { return pose - 1; };
  auto add = [&](int a, int b, double w) {
    const Eigen::VectorXd v = edge_vector(n, row(a), row(b));
    p->base += w * v * v.transpose();
  };
  for (int k = 0; k < n; ++k) add(k, k + 1, rng.uniform(spec.gamma_lo, spec.gamma_hi));
  const int chords = static_cast<int>(rng.below(3));
  for (int c = 0; c < chords; ++c) {
    const int a = static_cast<int>(rng.below(n + 1));
    const int b = static_cast<int>(rng.below(n + 1));
    if (a != b) add(a, b, rng.uniform(spec.gamma_lo, spec.gamma_hi));
  }
  for (int c = 0; c < spec.candidates; ++c) {
    int a = static_cast<int>(rng.below(n + 1));
    int b = static_cast<int>(rng.below(n + 1));
    while (b == a) b = static_cast<int>(rng.below(n + 1));
    p->edges.push_back({row(std::min(a, b)), row(std::max(a, b)),
                        rng.uniform(spec.gamma_lo, spec.gamma_hi),
                        rng.uniform(spec.travel_lo, spec.travel_hi)});
  }
  if (!p->edges.empty()) {
    const auto gains = base_topology_gains(p->base, p->edges);
    std::vector<double> ratios;
    double max_travel = 0.0;
    for (std::size_t k = 0; k < gains.size(); ++k) {
      ratios.push_back(gains[k] / (2.0 * p->edges[k].travel));
      max_travel = std::max(max_travel, p->edges[k].travel);
    }
    std::sort(ratios.begin(), ratios.end());
    const auto idx = static_cast<std::size_t>(spec.alpha_quantile * (ratios.size() - 1));
    p->alpha = ratios[idx];
    if (spec.with_d_max) p->d_max = 2.0 * max_travel * static_cast<double>(p->edges.size());
  }
  return p;
}

// Optimum by enumerating every subset through reference_objective.
inline std::pair<double, std::vector<int>> reference_optimum(const SelectionProblem& p) {
  const int n = p.size();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> arg;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<int> s;
    for (int k = 0; k < n; ++k) {
      if (mask >> k & 1U) s.push_back(k);
    }
    const double v = reference_objective(p, s);
    if (v > best) {
      best = v;
      arg = s;
    }
  }
  return {best, arg};
}

inline double reference_minimum(const SelectionProblem& p) {
  const int n = p.size();
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<int> s;
    for (int k = 0; k < n; ++k) {
      if (mask >> k & 1U) s.push_back(k);
    }
    worst = std::min(worst, reference_objective(p, s));
  }
  return worst;
}

// Exhaustive min-makespan assignment; lexicographically first optimum with
// "first robot" before "second robot".
inline std::pair<double, std::vector<char>> exhaustive_allocation(
    const std::vector<InterEdge>& edges, const std::vector<double>& base) {
  const int k = static_cast<int>(edges.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> arg;
  // Enumerate in lexicographic order where bit value 0 = to_first.
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << k); ++code) {
    std::vector<double> len = base;
    std::vector<char> to_first(k);
    for (int e = 0; e < k; ++e) {
      const bool second = (code >> (k - 1 - e)) & 1U;
      to_first[e] = second ? 0 : 1;
      len[second ? edges[e].robot_second : edges[e].robot_first] += edges[e].cost;
    }
    const double m = *std::max_element(len.begin(), len.end());
    if (m < best) {
      best = m;
      arg = to_first;
    }
  }
  return {best, arg};
}

// Spanning-tree count of a multigraph by brute force over edge subsets.
// Vertices in `contracted` are merged into one node first.
inline long spanning_tree_count(int vertices, std::vector<std::pair<int, int>> edges,
                                const std::vector<int>& contracted) {
  std::vector<int> id(vertices);
  std::iota(id.begin(), id.end(), 0);
  for (int c : contracted) id[c] = contracted.front();
  std::vector<int> compact(vertices, -1);
  int nodes = 0;
  for (int v = 0; v < vertices; ++v) {
    if (compact[id[v]] < 0) compact[id[v]] = nodes++;
  }
  std::vector<std::pair<int, int>> merged;
  for (auto [a, b] : edges) {
    const int x = compact[id[a]];
    const int y = compact[id[b]];
    if (x != y) merged.emplace_back(x, y);
  }
  const int m = static_cast<int>(merged.size());
  long count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (std::popcount(mask) != nodes - 1) continue;
    std::vector<int> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool acyclic = true;
    for (int e = 0; e < m && acyclic; ++e) {
      if (!(mask >> e & 1U)) continue;
      const int a = find(merged[e].first);
      const int b = find(merged[e].second);
      if (a == b) acyclic = false;
      else parent[a] = b;
    }
    count += acyclic ? 1 : 0;
  }
  return count;
}

}  // namespace cge::testing
