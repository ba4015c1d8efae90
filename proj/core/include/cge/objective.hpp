#pragma once

#include <Eigen/Core>
#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cge/cholesky.hpp"

namespace cge {

// One candidate loop edge as seen by the objective: an edge vector
// b = e_row_i - e_row_j over the reduced Laplacian (negative rows are
// anchored and dropped), its information weight and its travel distance.
struct LoopEdge {
  int row_i = -1;
  int row_j = -1;
  double gamma = 1.0;
  double travel = 1.0;  // omega(z), meters
};

// Inputs of the set function
//   f(A) = (1/n) log det(L0 + sum_{z in A} gamma_z b_z b_z^T)
//          - alpha * sum_{z in A} 2 omega(z) + d_max.
struct SelectionProblem {
  Eigen::MatrixXd base;  // L0, SPD
  std::vector<LoopEdge> edges;
  double alpha = 0.0;
  double d_max = 0.0;

  int dim() const { return static_cast<int>(base.rows()); }
  int size() const { return static_cast<int>(edges.size()); }
};

// Shared evaluation counter; clones of a state report into the same counter.
class OracleCounter {
 public:
  OracleCounter() : count_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}
  void tick(std::uint64_t n = 1) const { count_->fetch_add(n, std::memory_order_relaxed); }
  std::uint64_t value() const { return count_->load(std::memory_order_relaxed); }

 private:
  std::shared_ptr<std::atomic<std::uint64_t>> count_;
};

// (1/n) log(1 + gamma b^T L0^{-1} b) for every edge, from one explicit
// inverse of L0. Used for the alpha bounds and the ground-set ordering.
std::vector<double> base_topology_gains(const Eigen::MatrixXd& base,
                                        std::span<const LoopEdge> edges);

// From-scratch dense evaluation of f(A); independent of ObjectiveState.
double objective_value(const SelectionProblem& problem, std::span<const int> selected,
                       const OracleCounter* counter = nullptr);

// Incrementally maintained L_A = L0 + sum gamma b b^T for the current
// selection A, with a cached log det. Copying a state clones it.
class ObjectiveState {
 public:
  ObjectiveState(std::shared_ptr<const SelectionProblem> problem, OracleCounter counter,
                 bool select_all = false);

  const SelectionProblem& problem() const { return *problem_; }
  const OracleCounter& counter() const { return counter_; }

  double value() const;
  // f(A + z) - f(A); z must not be selected.
  double marginal_gain(int z) const;
  // f(A - z) - f(A); z must be selected.
  double removal_gain(int z) const;
  // (1/n) log(1 + gamma b^T L_A^{-1} b), uncounted helper.
  double topology_gain(int z) const;

  void add(int z);
  void remove(int z);

  bool contains(int z) const { return members_[z] != 0; }
  const std::vector<char>& members() const { return members_; }
  std::vector<int> selected() const;
  int selected_count() const { return selected_count_; }

  double log_det() const { return factor_.log_det(); }
  double recompute_log_det() const;
  double travel_cost() const { return travel_cost_; }

  // Downdates between full refactorizations.
  static constexpr int kRefactorInterval = 64;

 private:
  double raw_value() const;
  double quadratic(int z) const;
  Eigen::MatrixXd assemble() const;
  Eigen::VectorXd edge_vector(int z) const;

  std::shared_ptr<const SelectionProblem> problem_;
  OracleCounter counter_;
  IncrementalCholesky factor_;
  std::vector<char> members_;
  int selected_count_ = 0;
  double travel_cost_ = 0.0;  // sum of 2 omega over A
  int downdates_ = 0;
};

}  // namespace cge
