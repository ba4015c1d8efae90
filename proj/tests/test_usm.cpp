#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cge/error.hpp"
#include "cge/simplex.hpp"
#include "cge/usm.hpp"
#include "support.hpp"

using namespace cge;

namespace {

int fractional_count(const std::vector<double>& x, double eps = 1e-9) {
  int n = 0;
  for (double v : x) n += (v > eps && v < 1.0 - eps) ? 1 : 0;
  return n;
}

std::shared_ptr<SelectionProblem> single_edge(double alpha) {
  auto p = std::make_shared<SelectionProblem>();
  p->base.resize(2, 2);
  p->base << 2, -1, -1, 1;
  p->edges.push_back({-1, 1, 1.0, 3.0});
  p->alpha = alpha;
  return p;
}

// Independent pieces of a modular instance: each edge touches its own
// anchored pose, so the log det splits into per-edge terms.
std::shared_ptr<SelectionProblem> modular_problem(Rng& rng, int n) {
  auto p = std::make_shared<SelectionProblem>();
  p->base = Eigen::MatrixXd::Identity(n, n);
  for (int k = 0; k < n; ++k) {
    p->edges.push_back({-1, k, rng.uniform(0.1, 20.0), rng.uniform(1.0, 10.0)});
  }
  p->alpha = 0.05;
  return p;
}

}  // namespace

TEST_CASE("lp: textbook maximum") {
  LinearProgram lp;
  lp.objective = {3, 5};
  lp.lower = {0, 0};
  lp.upper = {INFINITY, INFINITY};
  lp.constraints = {{{1, 0}, Sense::LessEqual, 4},
                    {{0, 2}, Sense::LessEqual, 12},
                    {{3, 2}, Sense::LessEqual, 18}};
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(36));
  CHECK(s.x[0] == doctest::Approx(2));
  CHECK(s.x[1] == doctest::Approx(6));
}

TEST_CASE("lp: equality, infeasible and unbounded") {
  LinearProgram eq;
  eq.objective = {1, 1};
  eq.lower = {0, 0};
  eq.upper = {3, 3};
  eq.constraints = {{{1, -1}, Sense::Equal, 1}};
  const auto s = solve_lp(eq);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(5));

  LinearProgram bad = eq;
  bad.constraints.push_back({{1, 1}, Sense::GreaterEqual, 7});
  CHECK(solve_lp(bad).status == LpStatus::Infeasible);

  LinearProgram open;
  open.objective = {1, 0};
  open.lower = {0, 0};
  open.upper = {INFINITY, 1};
  open.constraints = {{{-1, 1}, Sense::LessEqual, 1}};
  CHECK(solve_lp(open).status == LpStatus::Unbounded);
}

TEST_CASE("split lp: single pair with a = 2, b = 1 takes the element") {
  const std::vector<SplitCoefficients> c{{1.0, 2.0, 1.0}};
  const auto z = lp_extreme_point(c);
  CHECK(z[0] == doctest::Approx(1.0));
}

TEST_CASE("split lp: all b zero takes every element") {
  const std::vector<SplitCoefficients> c{{0.5, 1.0, 0.0}, {0.3, 2.0, 0.0}, {0.2, 0.1, 0.0}};
  for (double z : lp_extreme_point(c)) CHECK(z == doctest::Approx(1.0));
}

TEST_CASE("split lp: all a zero keeps z at the first constraint") {
  // With a = 0 the constraints read z <= 1/3 and z <= 1; the objective
  // prefers larger z, so the optimum sits at z = 1/3 rather than w = 1.
  const std::vector<SplitCoefficients> c{{1.0, 0.0, 2.0}};
  const auto z = lp_extreme_point(c);
  CHECK(z[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("split lp: extreme points have at most two fractional entries") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(12));
    std::vector<SplitCoefficients> c(k);
    double mass = 0.0;
    for (auto& s : c) {
      s.probability = rng.uniform(0.01, 1.0);
      mass += s.probability;
      s.a = rng.uniform(-1.0, 1.0);
      s.b = rng.uniform(-1.0, 1.0);
      // Submodularity makes a + b >= 0 for every support pair.
      if (s.a + s.b < 0.0) s.b = -s.a + rng.uniform(0.0, 0.5);
    }
    for (auto& s : c) s.probability /= mass;
    const auto z = lp_extreme_point(c);
    REQUIRE(z.size() == c.size());
    CHECK(fractional_count(z) <= 2);
    double lhs1 = 0.0, rhs1 = 0.0, lhs2 = 0.0, rhs2 = 0.0;
    for (int i = 0; i < k; ++i) {
      const double w = 1.0 - z[i];
      lhs1 += c[i].probability * (z[i] * c[i].a + w * c[i].b);
      rhs1 += 2.0 * c[i].probability * z[i] * c[i].b;
      lhs2 += c[i].probability * (z[i] * c[i].a + w * c[i].b);
      rhs2 += 2.0 * c[i].probability * w * c[i].a;
    }
    CHECK(lhs1 >= rhs1 - 1e-9);
    CHECK(lhs2 >= rhs2 - 1e-9);
  }
}

TEST_CASE("labels round trip") {
  for (Algorithm a : all_algorithms()) CHECK(algorithm_from_label(label(a)) == a);
  CHECK_THROWS_AS(algorithm_from_label("nope"), Error);
}

TEST_CASE("empty ground set") {
  auto p = std::make_shared<SelectionProblem>();
  p->base = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  for (Algorithm a : all_algorithms()) {
    for (bool lazy : {false, true}) {
      const auto r = run_algorithm(a, p, 1, lazy);
      CHECK(r.selected.empty());
      CHECK(r.objective == doctest::Approx(std::log(2.0)));
      CHECK(r.gain == 0.0);
    }
  }
}

TEST_CASE("one candidate: every algorithm picks the better of two values") {
  for (double alpha : {0.0, 1.0}) {
    const auto p = single_edge(alpha);
    const bool take = alpha == 0.0;  // gain 0.5 log 3 vs 0.5 log 3 - 6
    for (Algorithm a : all_algorithms()) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = run_algorithm(a, p, seed, true);
        CHECK(r.selected.size() == (take ? 1U : 0U));
      }
    }
    CHECK(brute_force_opt(p).selected.size() == (take ? 1U : 0U));
  }
}

TEST_CASE("all marginals negative: greedy stops immediately") {
  Rng rng(12);
  auto p = testing::random_problem(rng, {8, 10});
  p->alpha = 10.0;
  CHECK(simple_greedy(p, false).selected.empty());
  CHECK(simple_greedy(p, true).selected.empty());
}

TEST_CASE("brute force agrees with independent enumeration") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testing::random_problem(rng, {7, 1 + static_cast<int>(rng.below(10))});
    const auto r = brute_force_opt(p);
    const auto [best, arg] = testing::reference_optimum(*p);
    CHECK(r.objective == doctest::Approx(best).epsilon(1e-9));
    CHECK(testing::reference_objective(*p, r.selected) == doctest::Approx(best).epsilon(1e-9));
  }
  auto big = testing::random_problem(rng, {5, 21});
  try {
    brute_force_opt(big);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Refusal);
  }
}

TEST_CASE("modular instance: greedy and deterministic USM are optimal") {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = modular_problem(rng, 10);
    const double opt = brute_force_opt(p).objective;
    CHECK(simple_greedy(p, true).objective == doctest::Approx(opt).epsilon(1e-12));
    CHECK(deterministic_usm(p, false).objective == doctest::Approx(opt).epsilon(1e-12));
    CHECK(deterministic_usm(p, true, true).objective == doctest::Approx(opt).epsilon(1e-12));
    CHECK(double_greedy(p, 3, false).objective == doctest::Approx(opt).epsilon(1e-12));
  }
}

TEST_CASE("lazy greedy equals eager greedy with fewer evaluations") {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    testing::RandomProblemSpec spec{10, 14};
    spec.alpha_quantile = rng.uniform(0.0, 0.8);
    const auto p = testing::random_problem(rng, spec);
    const auto eager = simple_greedy(p, false);
    const auto lazy = simple_greedy(p, true);
    CHECK(lazy.selected == eager.selected);
    CHECK(lazy.oracle_calls <= eager.oracle_calls);
  }
}

TEST_CASE("lazy ordered variants follow their eager counterparts") {
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testing::random_problem(rng, {10, 12});
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      CHECK(double_greedy(p, seed, true, true).selected ==
            double_greedy(p, seed, true, false).selected);
    }
    CHECK(deterministic_usm(p, true, true).selected == deterministic_usm(p, true, false).selected);
  }
}

TEST_CASE("double greedy is reproducible per seed") {
  Rng rng(17);
  const auto p = testing::random_problem(rng, {10, 12});
  CHECK(double_greedy(p, 9, false).selected == double_greedy(p, 9, false).selected);
  CHECK(double_greedy(p, 9, false).seed == 9);
}

TEST_CASE("results report a consistent objective") {
  Rng rng(18);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testing::random_problem(rng, {9, 11});
    for (Algorithm a : all_algorithms()) {
      const auto r = run_algorithm(a, p, trial, true);
      CHECK(std::is_sorted(r.selected.begin(), r.selected.end()));
      CHECK(r.objective == doctest::Approx(testing::reference_objective(*p, r.selected)).epsilon(1e-9));
      CHECK(r.gain == doctest::Approx(r.objective - r.empty_objective));
      CHECK(r.oracle_calls > 0);
    }
  }
}

TEST_CASE("half-optimality on small instances") {
  Rng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testing::random_problem(rng, {8, 10});
    const double opt = brute_force_opt(p).objective;
    CHECK(deterministic_usm(p, false).objective >= 0.5 * opt);
    CHECK(deterministic_usm(p, true, true).objective >= 0.5 * opt);
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) sum += double_greedy(p, seed, false).objective;
    CHECK(sum / 200.0 >= 0.5 * opt);
  }
}
