#include "cge/objective.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <iostream>
#include <numeric>

#include "cge/error.hpp"
#include "cge/pose_graph.hpp"

namespace cge {

namespace {

Eigen::MatrixXd assemble_dense(const SelectionProblem& problem, std::span<const int> selected) {
  Eigen::MatrixXd m = problem.base;
  for (int z : selected) {
    const auto& e = problem.edges[z];
    add_weighted_edge(m, e.row_i, e.row_j, e.gamma);
  }
  return m;
}

}  // namespace

std::vector<double> base_topology_gains(const Eigen::MatrixXd& base,
                                        std::span<const LoopEdge> edges) {
  const int n = static_cast<int>(base.rows());
  std::vector<double> gains(edges.size(), 0.0);
  if (n == 0) return gains;
  Eigen::LLT<Eigen::MatrixXd> llt(base);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Factorization, "base Laplacian is not positive definite");
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    double q = 0.0;
    if (e.row_i >= 0) q += inv(e.row_i, e.row_i);
    if (e.row_j >= 0) q += inv(e.row_j, e.row_j);
    if (e.row_i >= 0 && e.row_j >= 0) q -= 2.0 * inv(e.row_i, e.row_j);
    gains[k] = std::log1p(e.gamma * q) / n;
  }
  return gains;
}

double objective_value(const SelectionProblem& problem, std::span<const int> selected,
                       const OracleCounter* counter) {
  if (counter) counter->tick();
  const Eigen::MatrixXd m = assemble_dense(problem, selected);
  double log_det = 0.0;
  if (m.rows() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::Factorization, "selection Laplacian is not positive definite");
    }
    log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  double travel = 0.0;
  for (int z : selected) travel += 2.0 * problem.edges[z].travel;
  const int n = std::max(problem.dim(), 1);
  return log_det / n - problem.alpha * travel + problem.d_max;
}

ObjectiveState::ObjectiveState(std::shared_ptr<const SelectionProblem> problem,
                               OracleCounter counter, bool select_all)
    : problem_(std::move(problem)),
      counter_(std::move(counter)),
      members_(problem_->edges.size(), select_all ? 1 : 0) {
  if (select_all) {
    selected_count_ = problem_->size();
    for (const auto& e : problem_->edges) travel_cost_ += 2.0 * e.travel;
  }
  factor_.refactor(assemble());
}

Eigen::MatrixXd ObjectiveState::assemble() const {
  return assemble_dense(*problem_, selected());
}

std::vector<int> ObjectiveState::selected() const {
  std::vector<int> out;
  out.reserve(selected_count_);
  for (int z = 0; z < static_cast<int>(members_.size()); ++z) {
    if (members_[z]) out.push_back(z);
  }
  return out;
}

Eigen::VectorXd ObjectiveState::edge_vector(int z) const {
  const auto& e = problem_->edges[z];
  Eigen::VectorXd v = Eigen::VectorXd::Zero(problem_->dim());
  const double s = std::sqrt(e.gamma);
  if (e.row_i >= 0) v(e.row_i) += s;
  if (e.row_j >= 0) v(e.row_j) -= s;
  return v;
}

double ObjectiveState::quadratic(int z) const {
  const auto& e = problem_->edges[z];
  return e.gamma * factor_.edge_quadratic(e.row_i, e.row_j);
}

double ObjectiveState::raw_value() const {
  const int n = std::max(problem_->dim(), 1);
  return factor_.log_det() / n - problem_->alpha * travel_cost_ + problem_->d_max;
}

double ObjectiveState::value() const {
  counter_.tick();
  const double f = raw_value();
  // Only meaningful with the d_max offset in place.
  if (f < 0.0 && problem_->d_max > 0.0) {
    std::clog << "warning: objective negative (" << f << ") for selection of size "
              << selected_count_ << ":";
    for (int z : selected()) std::clog << ' ' << z;
    std::clog << '\n';
  }
  return f;
}

double ObjectiveState::topology_gain(int z) const {
  const int n = std::max(problem_->dim(), 1);
  return std::log1p(quadratic(z)) / n;
}

double ObjectiveState::marginal_gain(int z) const {
  counter_.tick();
  return topology_gain(z) - 2.0 * problem_->alpha * problem_->edges[z].travel;
}

double ObjectiveState::removal_gain(int z) const {
  counter_.tick();
  // det(L - g b b^T) = det(L) (1 - g b^T L^{-1} b)
  const int n = std::max(problem_->dim(), 1);
  const double q = quadratic(z);
  return std::log1p(-q) / n + 2.0 * problem_->alpha * problem_->edges[z].travel;
}

void ObjectiveState::add(int z) {
  if (members_[z]) throw Error(ErrorKind::Argument, "edge already selected");
  factor_.update(edge_vector(z));
  members_[z] = 1;
  ++selected_count_;
  travel_cost_ += 2.0 * problem_->edges[z].travel;
}

void ObjectiveState::remove(int z) {
  if (!members_[z]) throw Error(ErrorKind::Argument, "edge is not selected");
  members_[z] = 0;
  --selected_count_;
  travel_cost_ -= 2.0 * problem_->edges[z].travel;
  if (++downdates_ >= kRefactorInterval) {
    downdates_ = 0;
    factor_.refactor(assemble());
  } else {
    factor_.downdate(edge_vector(z));
  }
}

double ObjectiveState::recompute_log_det() const {
  const Eigen::MatrixXd m = assemble();
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Factorization, "selection Laplacian is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace cge
