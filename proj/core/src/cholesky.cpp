#include "cge/cholesky.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "cge/error.hpp"

namespace cge {

void IncrementalCholesky::refactor(const Eigen::MatrixXd& spd) {
  if (spd.rows() != spd.cols()) throw Error(ErrorKind::Argument, "matrix is not square");
  Eigen::LLT<Eigen::MatrixXd> llt(spd);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Factorization, "matrix is not positive definite");
  }
  factor_ = llt.matrixL();
  refresh_log_det();
}

void IncrementalCholesky::refresh_log_det() {
  log_det_ = 2.0 * factor_.diagonal().array().log().sum();
}

void IncrementalCholesky::rotate(Eigen::VectorXd& v, double sign) {
  const Eigen::Index n = factor_.rows();
  Eigen::Index start = 0;
  while (start < n && v(start) == 0.0) ++start;
  for (Eigen::Index k = start; k < n; ++k) {
    const double lkk = factor_(k, k);
    const double r2 = lkk * lkk + sign * v(k) * v(k);
    if (!(r2 > 0.0)) {
      throw Error(ErrorKind::Factorization, "rank-one downdate lost positive definiteness");
    }
    const double r = std::sqrt(r2);
    const double c = r / lkk;
    const double s = v(k) / lkk;
    factor_(k, k) = r;
    const Eigen::Index tail = n - k - 1;
    if (tail > 0) {
      auto col = factor_.col(k).tail(tail);
      auto rest = v.tail(tail);
      col = (col + sign * s * rest) / c;
      rest = c * rest - s * col;
    }
  }
  refresh_log_det();
}

void IncrementalCholesky::update(Eigen::VectorXd v) { rotate(v, 1.0); }

void IncrementalCholesky::downdate(Eigen::VectorXd v) { rotate(v, -1.0); }

double IncrementalCholesky::edge_quadratic(int row_i, int row_j) const {
  const int lo = std::min(row_i < 0 ? dim() : row_i, row_j < 0 ? dim() : row_j);
  if (lo >= dim()) return 0.0;
  const int len = dim() - lo;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(len);
  if (row_i >= 0) y(row_i - lo) += 1.0;
  if (row_j >= 0) y(row_j - lo) -= 1.0;
  factor_.bottomRightCorner(len, len).triangularView<Eigen::Lower>().solveInPlace(y);
  return y.squaredNorm();
}

void IncrementalCholesky::forward_solve(Eigen::VectorXd& v) const {
  factor_.triangularView<Eigen::Lower>().solveInPlace(v);
}

}  // namespace cge
