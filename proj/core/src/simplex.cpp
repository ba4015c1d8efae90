#include "cge/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "cge/error.hpp"

namespace cge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-11;
constexpr double kPivotTol = 1e-12;
constexpr double kFeasTol = 1e-9;

enum class Status : char { Basic, AtLower, AtUpper };

class Tableau {
 public:
  Tableau(const LinearProgram& lp) : structurals_(static_cast<int>(lp.objective.size())) {
    const int m = static_cast<int>(lp.constraints.size());
    const int n = structurals_;
    if (static_cast<int>(lp.lower.size()) != n || static_cast<int>(lp.upper.size()) != n) {
      throw Error(ErrorKind::Argument, "bound vectors do not match objective size");
    }
    // Column layout: structurals | one slack per inequality | one artificial per row.
    std::vector<int> slack_of(m, -1);
    int columns = n;
    for (int i = 0; i < m; ++i) {
      if (static_cast<int>(lp.constraints[i].coeffs.size()) != n) {
        throw Error(ErrorKind::Argument, "constraint width does not match objective size");
      }
      if (lp.constraints[i].sense != Sense::Equal) slack_of[i] = columns++;
    }
    const int first_artificial = columns;
    columns += m;

    rows_.assign(m, std::vector<double>(columns, 0.0));
    lower_.assign(columns, 0.0);
    upper_.assign(columns, kInf);
    value_.assign(columns, 0.0);
    status_.assign(columns, Status::AtLower);
    basis_.assign(m, -1);
    rhs_.assign(m, 0.0);
    artificial_begin_ = first_artificial;

    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(lp.lower[j])) throw Error(ErrorKind::Argument, "lower bound must be finite");
      if (lp.upper[j] < lp.lower[j]) throw Error(ErrorKind::Argument, "empty variable range");
      lower_[j] = lp.lower[j];
      upper_[j] = lp.upper[j];
      value_[j] = lp.lower[j];
    }

    for (int i = 0; i < m; ++i) {
      const auto& con = lp.constraints[i];
      double scale = 0.0;
      for (double a : con.coeffs) scale = std::max(scale, std::abs(a));
      if (scale == 0.0) scale = 1.0;
      auto& row = rows_[i];
      for (int j = 0; j < n; ++j) row[j] = con.coeffs[j] / scale;
      double residual = con.rhs / scale;
      for (int j = 0; j < n; ++j) residual -= row[j] * value_[j];
      if (slack_of[i] >= 0) row[slack_of[i]] = con.sense == Sense::LessEqual ? 1.0 : -1.0;
      const int art = first_artificial + i;
      // Slack absorbs the residual when its sign allows; otherwise an
      // artificial of matching sign starts in the basis.
      if (slack_of[i] >= 0 && residual * row[slack_of[i]] >= 0.0) {
        basis_[i] = slack_of[i];
        upper_[art] = 0.0;
      } else {
        row[art] = residual >= 0.0 ? 1.0 : -1.0;
        basis_[i] = art;
      }
      const double pivot = row[basis_[i]];
      for (double& a : row) a /= pivot;
      rhs_[i] = residual / pivot;
      status_[basis_[i]] = Status::Basic;
      value_[basis_[i]] = rhs_[i];
    }
  }

  int columns() const { return static_cast<int>(lower_.size()); }

  // Returns false if unbounded.
  bool optimize(const std::vector<double>& cost, int& iterations) {
    const int m = static_cast<int>(rows_.size());
    const int cols = columns();
    for (;;) {
      int entering = -1;
      double direction = 0.0;
      for (int j = 0; j < cols && entering < 0; ++j) {
        if (status_[j] == Status::Basic || upper_[j] - lower_[j] <= 0.0) continue;
        double d = cost[j];
        for (int i = 0; i < m; ++i) d -= cost[basis_[i]] * rows_[i][j];
        if (status_[j] == Status::AtLower && d > kCostTol) {
          entering = j;
          direction = 1.0;
        } else if (status_[j] == Status::AtUpper && d < -kCostTol) {
          entering = j;
          direction = -1.0;
        }
      }
      if (entering < 0) return true;
      ++iterations;

      double step = upper_[entering] - lower_[entering];
      int leave_row = -1;
      for (int i = 0; i < m; ++i) {
        const double rate = -direction * rows_[i][entering];
        const int b = basis_[i];
        double limit = kInf;
        if (rate < -kPivotTol) {
          limit = (value_[b] - lower_[b]) / -rate;
        } else if (rate > kPivotTol && std::isfinite(upper_[b])) {
          limit = (upper_[b] - value_[b]) / rate;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        if (limit < step || (limit == step && leave_row >= 0 && b < basis_[leave_row])) {
          step = limit;
          leave_row = i;
        }
      }
      if (!std::isfinite(step)) return false;

      for (int i = 0; i < m; ++i) {
        value_[basis_[i]] += -direction * rows_[i][entering] * step;
      }
      value_[entering] += direction * step;

      if (leave_row < 0) {
        status_[entering] = direction > 0 ? Status::AtUpper : Status::AtLower;
        value_[entering] = direction > 0 ? upper_[entering] : lower_[entering];
        continue;
      }
      const int leaving = basis_[leave_row];
      const double rate = -direction * rows_[leave_row][entering];
      status_[leaving] = rate < 0 ? Status::AtLower : Status::AtUpper;
      value_[leaving] = rate < 0 ? lower_[leaving] : upper_[leaving];
      pivot(leave_row, entering);
    }
  }

  void pivot(int r, int e) {
    auto& prow = rows_[r];
    const double p = prow[e];
    for (double& a : prow) a /= p;
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
      if (i == r) continue;
      const double factor = rows_[i][e];
      if (factor == 0.0) continue;
      auto& row = rows_[i];
      for (std::size_t j = 0; j < row.size(); ++j) row[j] -= factor * prow[j];
      row[e] = 0.0;
    }
    basis_[r] = e;
    status_[e] = Status::Basic;
  }

  double artificial_sum() const {
    double s = 0.0;
    for (int j = artificial_begin_; j < columns(); ++j) s += value_[j];
    return s;
  }

  void fix_artificials() {
    for (int j = artificial_begin_; j < columns(); ++j) upper_[j] = 0.0;
  }

  int artificial_begin() const { return artificial_begin_; }
  int structurals() const { return structurals_; }
  double value(int j) const { return value_[j]; }
  double lower(int j) const { return lower_[j]; }
  double upper(int j) const { return upper_[j]; }
  bool is_basic(int j) const { return status_[j] == Status::Basic; }

 private:
  int structurals_ = 0;
  int artificial_begin_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> value_;
  std::vector<Status> status_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  Tableau tab(lp);
  LpSolution out;
  const int cols = tab.columns();

  std::vector<double> phase1(cols, 0.0);
  for (int j = tab.artificial_begin(); j < cols; ++j) phase1[j] = -1.0;
  tab.optimize(phase1, out.iterations);
  if (tab.artificial_sum() > kFeasTol) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  tab.fix_artificials();

  std::vector<double> phase2(cols, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), phase2.begin());
  if (!tab.optimize(phase2, out.iterations)) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  out.status = LpStatus::Optimal;
  out.x.resize(tab.structurals());
  for (int j = 0; j < tab.structurals(); ++j) {
    double v = std::clamp(tab.value(j), tab.lower(j), tab.upper(j));
    if (std::abs(v - tab.lower(j)) < kFeasTol) v = tab.lower(j);
    if (std::isfinite(tab.upper(j)) && std::abs(v - tab.upper(j)) < kFeasTol) v = tab.upper(j);
    out.x[j] = v;
    out.objective += lp.objective[j] * v;
    if (tab.is_basic(j)) ++out.basic_structurals;
  }
  return out;
}

}  // namespace cge
