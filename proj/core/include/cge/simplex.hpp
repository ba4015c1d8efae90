#pragma once

#include <limits>
#include <vector>

namespace cge {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct LpConstraint {
  std::vector<double> coeffs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// maximize c^T x  s.t.  constraints,  lower <= x <= upper.
// Lower bounds must be finite; upper bounds may be +infinity.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpConstraint> constraints;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  // Number of structural variables in the final basis.
  int basic_structurals = 0;
};

// Two-phase primal simplex with bounded variables on a dense tableau,
// Bland's rule for both entering and leaving choices. The returned point is
// a basic solution, hence an extreme point of the feasible region: at most
// one structural variable per constraint row lies strictly between its
// bounds.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace cge
