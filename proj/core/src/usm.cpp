#include "cge/usm.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <queue>

#include "cge/error.hpp"
#include "cge/rng.hpp"
#include "cge/simplex.hpp"

namespace cge {

const char* label(Algorithm algo) {
  switch (algo) {
    case Algorithm::SimpleGreedy: return "sgre";
    case Algorithm::DoubleGreedy: return "dgre";
    case Algorithm::DoubleGreedyOrdered: return "dgre-order";
    case Algorithm::DeterministicUsm: return "dusm";
    case Algorithm::DeterministicUsmOrdered: return "dusm-order";
  }
  return "unknown";
}

Algorithm algorithm_from_label(const std::string& name) {
  for (Algorithm a : all_algorithms()) {
    if (name == label(a)) return a;
  }
  throw Error(ErrorKind::Argument, "unknown algorithm '" + name + "'");
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::SimpleGreedy, Algorithm::DoubleGreedy, Algorithm::DoubleGreedyOrdered,
          Algorithm::DeterministicUsm, Algorithm::DeterministicUsmOrdered};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Heap entry ordered by (bound desc, index asc).
struct Bound {
  double value;
  int index;
  std::uint64_t stamp;
};

struct BoundLess {
  bool operator()(const Bound& a, const Bound& b) const {
    if (a.value != b.value) return a.value < b.value;
    return a.index > b.index;
  }
};

using BoundHeap = std::priority_queue<Bound, std::vector<Bound>, BoundLess>;

SolverResult finish(const std::string& name, const ObjectiveState& state,
                    const ObjectiveState& empty_ref, Clock::time_point start,
                    std::uint64_t seed, bool lazy) {
  SolverResult r;
  r.algorithm = name;
  r.selected = state.selected();
  r.wall_time_s = seconds_since(start);
  r.objective = state.value();
  r.empty_objective = empty_ref.value();
  r.gain = r.objective - r.empty_objective;
  r.oracle_calls = state.counter().value();
  r.seed = seed;
  r.lazy = lazy;
  return r;
}

// Eager argmax of marginal gains over the remaining elements; ties go to the
// lowest index.
int eager_argmax(const ObjectiveState& state, const std::vector<char>& remaining,
                 double* best_gain) {
  int best = -1;
  double best_value = 0.0;
  for (int k = 0; k < static_cast<int>(remaining.size()); ++k) {
    if (!remaining[k]) continue;
    const double g = state.marginal_gain(k);
    if (best < 0 || g > best_value) {
      best = k;
      best_value = g;
    }
  }
  if (best_gain) *best_gain = best_value;
  return best;
}

// Pops until the top entry is fresh for `stamp`, refreshing stale ones.
int lazy_argmax(BoundHeap& heap, const ObjectiveState& state, std::uint64_t stamp,
                double* best_gain) {
  while (!heap.empty()) {
    Bound top = heap.top();
    heap.pop();
    if (top.stamp == stamp) {
      if (best_gain) *best_gain = top.value;
      return top.index;
    }
    top.value = state.marginal_gain(top.index);
    top.stamp = stamp;
    heap.push(top);
  }
  return -1;
}

}  // namespace

SolverResult simple_greedy(const ProblemPtr& problem, bool lazy) {
  const auto start = Clock::now();
  OracleCounter counter;
  ObjectiveState state(problem, counter);
  const int n = problem->size();
  std::vector<char> remaining(n, 1);

  if (lazy) {
    BoundHeap heap;
    std::uint64_t stamp = 1;
    for (int k = 0; k < n; ++k) heap.push({state.marginal_gain(k), k, stamp});
    for (;;) {
      double g = 0.0;
      const int best = lazy_argmax(heap, state, stamp, &g);
      if (best < 0 || !(g > 0.0)) break;
      state.add(best);
      ++stamp;
    }
  } else {
    for (;;) {
      double g = 0.0;
      const int best = eager_argmax(state, remaining, &g);
      if (best < 0 || !(g > 0.0)) break;
      state.add(best);
      remaining[best] = 0;
    }
  }
  const ObjectiveState empty(problem, counter);
  return finish(label(Algorithm::SimpleGreedy), state, empty, start, 0, lazy);
}

SolverResult double_greedy(const ProblemPtr& problem, std::uint64_t seed, bool ordering,
                           bool lazy) {
  const auto start = Clock::now();
  OracleCounter counter;
  ObjectiveState x(problem, counter);
  ObjectiveState y(problem, counter, true);
  Rng rng(seed);
  const int n = problem->size();
  std::vector<char> remaining(n, 1);

  BoundHeap heap;
  std::uint64_t stamp = 1;  // bumps whenever X grows
  if (ordering && lazy) {
    for (int k = 0; k < n; ++k) heap.push({x.marginal_gain(k), k, stamp});
  }

  for (int step = 0; step < n; ++step) {
    int u = step;
    double gain_x = 0.0;
    if (ordering) {
      u = lazy ? lazy_argmax(heap, x, stamp, &gain_x) : eager_argmax(x, remaining, &gain_x);
    } else {
      gain_x = x.marginal_gain(u);
    }
    remaining[u] = 0;
    const double a = std::max(gain_x, 0.0);
    const double b = std::max(y.removal_gain(u), 0.0);
    const double threshold = (a + b == 0.0) ? 1.0 : a / (a + b);
    const double p = rng.uniform01();
    if (p < threshold) {
      x.add(u);
      ++stamp;
    } else {
      y.remove(u);
    }
  }
  const ObjectiveState empty(problem, counter);
  const Algorithm algo = ordering ? Algorithm::DoubleGreedyOrdered : Algorithm::DoubleGreedy;
  return finish(label(algo), x, empty, start, seed, lazy);
}

std::vector<double> lp_extreme_point(std::span<const SplitCoefficients> pairs,
                                     double weight_z, double weight_w) {
  const int k = static_cast<int>(pairs.size());
  if (k == 0) throw Error(ErrorKind::Argument, "split LP needs at least one support pair");
  // Substituting w = 1 - z:
  //   sum p (a - 3b) z >= -sum p b
  //   sum p (3a - b) z >= sum p (2a - b)
  LinearProgram lp;
  lp.objective.assign(k, weight_w - weight_z);
  lp.lower.assign(k, 0.0);
  lp.upper.assign(k, 1.0);
  LpConstraint first{std::vector<double>(k), Sense::GreaterEqual, 0.0};
  LpConstraint second{std::vector<double>(k), Sense::GreaterEqual, 0.0};
  for (int i = 0; i < k; ++i) {
    const auto& c = pairs[i];
    first.coeffs[i] = c.probability * (c.a - 3.0 * c.b);
    first.rhs -= c.probability * c.b;
    second.coeffs[i] = c.probability * (3.0 * c.a - c.b);
    second.rhs += c.probability * (2.0 * c.a - c.b);
  }
  lp.constraints = {first, second};
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorKind::SolverInternal, "split LP has no optimal extreme point");
  }
  return sol.x;
}

namespace {

struct SupportPair {
  double probability;
  ObjectiveState x;
  ObjectiveState y;
};

bool is_superset(const std::vector<char>& big, const std::vector<char>& small) {
  for (std::size_t k = 0; k < big.size(); ++k) {
    if (small[k] && !big[k]) return false;
  }
  return true;
}

}  // namespace

SolverResult deterministic_usm(const ProblemPtr& problem, bool ordering, bool lazy) {
  const auto start = Clock::now();
  OracleCounter counter;
  const int n = problem->size();
  const std::size_t support_cap = std::max<std::size_t>(4 * static_cast<std::size_t>(n), 4);

  std::vector<SupportPair> support;
  support.push_back({1.0, ObjectiveState(problem, counter), ObjectiveState(problem, counter, true)});
  std::vector<char> remaining(n, 1);

  BoundHeap heap;
  std::vector<char> heap_reference;  // X the heap bounds are valid below
  std::uint64_t stamp = 0;

  for (int step = 0; step < n; ++step) {
    int u = step;
    if (ordering) {
      std::size_t top = 0;
      for (std::size_t s = 1; s < support.size(); ++s) {
        if (support[s].probability > support[top].probability) top = s;
      }
      const ObjectiveState& xmax = support[top].x;
      if (lazy) {
        if (xmax.members() != heap_reference) ++stamp;
        if (heap_reference.empty() || !is_superset(xmax.members(), heap_reference)) {
          heap = BoundHeap();
          for (int k = 0; k < n; ++k) {
            if (remaining[k]) heap.push({xmax.marginal_gain(k), k, stamp});
          }
        }
        heap_reference = xmax.members();
        u = lazy_argmax(heap, xmax, stamp, nullptr);
      } else {
        u = eager_argmax(xmax, remaining, nullptr);
      }
    }
    remaining[u] = 0;

    std::vector<SplitCoefficients> coeffs;
    coeffs.reserve(support.size());
    for (const auto& pair : support) {
      coeffs.push_back({pair.probability, pair.x.marginal_gain(u), pair.y.removal_gain(u)});
    }
    const std::vector<double> z = lp_extreme_point(coeffs);

    std::vector<SupportPair> next;
    next.reserve(support.size() + 2);
    double mass = 0.0;
    for (std::size_t s = 0; s < support.size(); ++s) {
      auto& pair = support[s];
      const double pz = z[s] * pair.probability;
      const double pw = (1.0 - z[s]) * pair.probability;
      const bool take = pz > 0.0;
      const bool drop = pw > 0.0;
      if (take && drop) {
        SupportPair added{pz, pair.x, pair.y};
        added.x.add(u);
        next.push_back(std::move(added));
        pair.y.remove(u);
        next.push_back({pw, std::move(pair.x), std::move(pair.y)});
      } else if (take) {
        pair.x.add(u);
        next.push_back({pz, std::move(pair.x), std::move(pair.y)});
      } else if (drop) {
        pair.y.remove(u);
        next.push_back({pw, std::move(pair.x), std::move(pair.y)});
      }
      mass += pz + pw;
    }
    for (auto& pair : next) pair.probability /= mass;
    support = std::move(next);
    if (support.size() > support_cap) {
      throw Error(ErrorKind::SolverInternal,
                  "support distribution exceeded " + std::to_string(support_cap) + " pairs");
    }
  }

  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t s = 0; s < support.size(); ++s) {
    const double v = support[s].x.value();
    if (s == 0 || v > best_value) {
      best = s;
      best_value = v;
    }
  }
  const ObjectiveState empty(problem, counter);
  const Algorithm algo =
      ordering ? Algorithm::DeterministicUsmOrdered : Algorithm::DeterministicUsm;
  return finish(label(algo), support[best].x, empty, start, 0, lazy);
}

SolverResult brute_force_opt(const ProblemPtr& problem) {
  const auto start = Clock::now();
  const int n = problem->size();
  if (n > 20) {
    throw Error(ErrorKind::Refusal, "brute force refuses ground sets larger than 20");
  }
  OracleCounter counter;
  ObjectiveState state(problem, counter);
  std::vector<char> best_members = state.members();
  double best = state.value();
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int bit = std::countr_zero(k);
    if (state.contains(bit)) state.remove(bit);
    else state.add(bit);
    const double v = state.value();
    if (v > best) {
      best = v;
      best_members = state.members();
    }
  }
  ObjectiveState result(problem, counter);
  for (int k = 0; k < n; ++k) {
    if (best_members[k]) result.add(k);
  }
  const ObjectiveState empty(problem, counter);
  return finish("brute-force", result, empty, start, 0, false);
}

SolverResult run_algorithm(Algorithm algo, const ProblemPtr& problem, std::uint64_t seed,
                           bool lazy) {
  switch (algo) {
    case Algorithm::SimpleGreedy: return simple_greedy(problem, lazy);
    case Algorithm::DoubleGreedy: return double_greedy(problem, seed, false, false);
    case Algorithm::DoubleGreedyOrdered: return double_greedy(problem, seed, true, lazy);
    case Algorithm::DeterministicUsm: return deterministic_usm(problem, false, false);
    case Algorithm::DeterministicUsmOrdered: return deterministic_usm(problem, true, lazy);
  }
  throw Error(ErrorKind::Argument, "unknown algorithm");
}

}  // namespace cge
