#pragma once

#include <Eigen/Core>

namespace cge {

// Dense lower Cholesky factor A = L L^T with O(n^2) rank-one updates and
// downdates. Updates start at the first nonzero of the update vector, so
// edge vectors touching high rows only pay for the trailing block.
class IncrementalCholesky {
 public:
  IncrementalCholesky() = default;
  explicit IncrementalCholesky(const Eigen::MatrixXd& spd) { refactor(spd); }

  // Throws Error(Factorization) if the matrix is not numerically SPD.
  void refactor(const Eigen::MatrixXd& spd);

  int dim() const { return static_cast<int>(factor_.rows()); }
  const Eigen::MatrixXd& factor() const { return factor_; }
  double log_det() const { return log_det_; }

  // A <- A + v v^T.
  void update(Eigen::VectorXd v);
  // A <- A - v v^T. Throws Error(Factorization) if A loses definiteness.
  void downdate(Eigen::VectorXd v);

  // b^T A^{-1} b for b = e_i - e_j, where a negative row is dropped (an
  // anchored endpoint).
  double edge_quadratic(int row_i, int row_j) const;

  // Solves L y = v in place.
  void forward_solve(Eigen::VectorXd& v) const;

 private:
  void rotate(Eigen::VectorXd& v, double sign);
  void refresh_log_det();

  Eigen::MatrixXd factor_;
  double log_det_ = 0.0;
};

}  // namespace cge
