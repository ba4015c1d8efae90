#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cge/objective.hpp"

namespace cge {

enum class Algorithm {
  SimpleGreedy,
  DoubleGreedy,
  DoubleGreedyOrdered,
  DeterministicUsm,
  DeterministicUsmOrdered,
};

// sgre | dgre | dgre-order | dusm | dusm-order
const char* label(Algorithm algo);
Algorithm algorithm_from_label(const std::string& name);
std::vector<Algorithm> all_algorithms();

struct SolverResult {
  std::string algorithm;
  std::vector<int> selected;  // ascending ground-set indices
  double objective = 0.0;     // f(S*)
  double empty_objective = 0.0;  // f(empty)
  double gain = 0.0;          // f(S*) - f(empty)
  std::uint64_t oracle_calls = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  bool lazy = false;
};

using ProblemPtr = std::shared_ptr<const SelectionProblem>;

// Adds the best candidate while its marginal gain is positive. With lazy,
// stale marginals sit in a max-heap and only the top is refreshed.
SolverResult simple_greedy(const ProblemPtr& problem, bool lazy);

// Randomized double greedy. With ordering, the next element is the one with
// the largest marginal gain w.r.t. the current X; lazy applies to that
// argmax only.
SolverResult double_greedy(const ProblemPtr& problem, std::uint64_t seed, bool ordering,
                           bool lazy = false);

// Deterministic USM over an explicit distribution of (X, Y) pairs, split
// each round by an extreme point of a two-constraint LP.
SolverResult deterministic_usm(const ProblemPtr& problem, bool ordering, bool lazy = false);

// Exhaustive search in Gray-code order. Refuses ground sets above 20.
SolverResult brute_force_opt(const ProblemPtr& problem);

SolverResult run_algorithm(Algorithm algo, const ProblemPtr& problem, std::uint64_t seed,
                           bool lazy);

// Coefficients of one support pair in the split LP.
struct SplitCoefficients {
  double probability = 1.0;
  double a = 0.0;  // f(X + u) - f(X)
  double b = 0.0;  // f(Y - u) - f(Y)
};

inline constexpr double kSplitWeightZ = 0.5;
inline constexpr double kSplitWeightW = 0.6;

// Extreme point (z_k, w_k = 1 - z_k) of
//   E[z a + w b] >= 2 E[z b],  E[z a + w b] >= 2 E[w a],  z + w = 1,
// minimizing weight_z * sum z + weight_w * sum w. Returns the z_k.
std::vector<double> lp_extreme_point(std::span<const SplitCoefficients> pairs,
                                     double weight_z = kSplitWeightZ,
                                     double weight_w = kSplitWeightW);

}  // namespace cge
