#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cge/error.hpp"
#include "cge/loop_candidates.hpp"
#include "cge/vrp.hpp"

using namespace cge;

namespace {

struct Fixture {
  EnvGraph env;
  DistanceOracle oracle;
  CollabPoseGraph cpg;
  ReducedLaplacian lap;
};

Fixture from_walks(EnvGraph env, const std::vector<Walk>& walks) {
  DistanceOracle oracle(env);
  CollabPoseGraph cpg = build_collab_pose_graph(walks);
  ReducedLaplacian lap = reduced_weighted_laplacian(cpg);
  return {std::move(env), std::move(oracle), std::move(cpg), std::move(lap)};
}

Fixture grid_instance(double side, std::uint64_t seed) {
  EnvParams p;
  p.side = side;
  p.seed = seed;
  EnvGraph env = generate_random_env(p);
  DistanceOracle oracle(env);
  const std::vector<VertexId> starts{0, 0, 0};
  const auto vrp = solve_vrp(env, oracle, starts, {2.0, seed});
  return from_walks(std::move(env), expand_all(oracle, vrp));
}

}  // namespace

TEST_CASE("a chain has one candidate") {
  const EnvGraph env({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 1.0}, {1, 2, 1.0}});
  const auto f = from_walks(env, {Walk{0, {0, 1, 2}, 2.0}});
  const auto s = enumerate_candidates(f.cpg, f.oracle);
  REQUIRE(s.size() == 1);
  CHECK(s[0].i == 0);
  CHECK(s[0].j == 2);
  CHECK(s[0].travel == doctest::Approx(2.0));
  CHECK(s[0].gamma == doctest::Approx(d_opt_weight(default_covariance())));
}

TEST_CASE("a complete pose graph has no candidates") {
  const EnvGraph env({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1.0}, {1, 2, 1.5}, {0, 2, 1.0}});
  const auto f = from_walks(env, {Walk{0, {0, 1, 2, 0}, 3.5}});
  const auto s = enumerate_candidates(f.cpg, f.oracle);
  CHECK(s.empty());
  try {
    compute_alpha(s, 0.3);
    FAIL("expected NoCandidates");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoCandidates);
  }
}

TEST_CASE("co-located poses get the travel floor") {
  const EnvGraph env({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 1.0}, {1, 2, 1.0}});
  const auto f = from_walks(env, {Walk{0, {0, 1}, 1.0}, Walk{1, {2, 1}, 1.0}});
  const auto s = enumerate_candidates(f.cpg, f.oracle);
  for (const auto& c : s) {
    if (f.cpg.pose(c.i).vertex == f.cpg.pose(c.j).vertex) {
      CHECK(c.travel == kColocatedTravelFloor);
    } else {
      CHECK(c.travel > kColocatedTravelFloor);
    }
  }
}

TEST_CASE("alpha interpolates between the ratio extremes") {
  const auto f = grid_instance(60, 1);
  auto s = enumerate_candidates(f.cpg, f.oracle);
  attach_initial_gains(s, f.cpg, f.lap);
  double lo = 1e300, hi = -1e300;
  for (const auto& c : s) {
    lo = std::min(lo, c.ratio());
    hi = std::max(hi, c.ratio());
  }
  const auto a0 = compute_alpha(s, 0.0);
  const auto a1 = compute_alpha(s, 1.0);
  const auto a3 = compute_alpha(s, 0.3);
  CHECK(a0.alpha == doctest::Approx(lo));
  CHECK(a1.alpha == doctest::Approx(hi));
  CHECK(a3.alpha == doctest::Approx(lo + 0.3 * (hi - lo)));
  CHECK(a3.min == a0.min);
  CHECK(a3.max == a1.max);

  std::vector<LoopCandidate> one{s.front()};
  const auto single = compute_alpha(one, 0.7);
  CHECK(single.min == single.max);
  CHECK(single.alpha == single.min);
}

TEST_CASE("pruning keeps strictly better ratios") {
  const auto f = grid_instance(60, 2);
  auto s = enumerate_candidates(f.cpg, f.oracle);
  attach_initial_gains(s, f.cpg, f.lap);
  const auto bounds = compute_alpha(s, 0.3);

  AlphaBounds top = bounds;
  top.alpha = bounds.max;
  CHECK(prune_candidates(s, top, 1.0).candidates.size() <= 1);

  AlphaBounds below = bounds;
  below.alpha = bounds.min - 1.0;
  CHECK(prune_candidates(s, below, 0.0).candidates.size() == s.size());

  const auto g = prune_candidates(s, bounds, 0.3);
  CHECK(g.total_candidates == s.size());
  CHECK(g.d_max == doctest::Approx(compute_d_max(s)));
  for (const auto& c : g.candidates) CHECK(c.ratio() > bounds.alpha);
  for (std::size_t k = 1; k < g.candidates.size(); ++k) {
    CHECK(g.candidates[k - 1].initial_gain >= g.candidates[k].initial_gain);
  }
}

TEST_CASE("d_max uses the unpruned set") {
  const auto f = grid_instance(60, 3);
  auto s = enumerate_candidates(f.cpg, f.oracle);
  double max_travel = 0.0;
  for (const auto& c : s) max_travel = std::max(max_travel, c.travel);
  CHECK(compute_d_max(s) == doctest::Approx(2.0 * max_travel * double(s.size())));
  const auto g = build_ground_set(f.cpg, f.oracle, f.lap, 0.9);
  CHECK(g.d_max == doctest::Approx(compute_d_max(s)));
}

TEST_CASE("larger lambda never keeps more candidates") {
  const auto f = grid_instance(80, 4);
  std::size_t previous = SIZE_MAX;
  for (double lambda : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    const auto g = build_ground_set(f.cpg, f.oracle, f.lap, lambda);
    CHECK(g.candidates.size() <= previous);
    previous = g.candidates.size();
  }
}

TEST_CASE("initial gains agree with the objective at the empty set") {
  const auto f = grid_instance(60, 5);
  const auto g = build_ground_set(f.cpg, f.oracle, f.lap, 0.3);
  const auto problem = make_problem(g, f.cpg, f.lap);
  CHECK(problem->alpha == g.alpha.alpha);
  CHECK(problem->d_max == g.d_max);
  OracleCounter counter;
  const ObjectiveState s(problem, counter);
  for (int k = 0; k < problem->size(); ++k) {
    CHECK(s.topology_gain(k) == doctest::Approx(g.candidates[k].initial_gain).epsilon(1e-9));
  }
}
