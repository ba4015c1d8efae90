#include <doctest.h>

#include <cmath>

#include "cge/fim.hpp"
#include "cge/loop_candidates.hpp"
#include "cge/stats.hpp"
#include "cge/vrp.hpp"
#include "support.hpp"

using namespace cge;

namespace {

CollabPoseGraph grid_pose_graph(double side, std::uint64_t seed, EnvGraph* env_out = nullptr) {
  EnvParams p;
  p.side = side;
  p.seed = seed;
  EnvGraph env = generate_random_env(p);
  const DistanceOracle d(env);
  const std::vector<VertexId> starts{0, 0, 0};
  const auto vrp = solve_vrp(env, d, starts, {2.0, seed});
  auto cpg = build_collab_pose_graph(expand_all(d, vrp));
  if (env_out) *env_out = std::move(env);
  return cpg;
}

Covariance random_cov(Rng& rng) {
  Covariance c = Covariance::Zero();
  c(0, 0) = std::pow(rng.uniform(0.05, 0.2), 2);
  c(1, 1) = std::pow(rng.uniform(0.05, 0.2), 2);
  c(2, 2) = rng.uniform(0.0005, 0.002);
  return c;
}

}  // namespace

TEST_CASE("identity covariance on a single edge gives the identity FIM") {
  const CollabPoseGraph g({{0, 0}, {0, 1}}, {{0, 1, EdgeKind::Odometry, Covariance::Identity(), 1.0}},
                          {0});
  const std::vector<Covariance> covs{Covariance::Identity()};
  const auto f = build_full_fim(g, covs);
  CHECK((f.matrix - Eigen::Matrix3d::Identity()).norm() == doctest::Approx(0.0));
  CHECK(f.log_det() == doctest::Approx(0.0));
}

TEST_CASE("homogeneous covariance satisfies the Kronecker identity") {
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    const auto g = grid_pose_graph(60, seed);
    const Covariance sigma = default_covariance();
    const std::vector<Covariance> covs(g.edges().size(), sigma);
    const Eigen::MatrixXd lu = reduced_unweighted_laplacian(g).matrix;
    const double lhs = build_full_fim(g, covs).log_det();
    const double rhs =
        3.0 * testing::dense_log_det(lu) + g.free_count() * std::log(sigma.inverse().determinant());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    // The D-opt weighted Laplacian is gamma * L, the same affine relation.
    const double lw = spd_log_det(covariance_weighted_laplacian(g, covs));
    CHECK(3.0 * lw == doctest::Approx(lhs).epsilon(1e-6));
  }
}

TEST_CASE("fim blocks follow the kronecker pattern for mixed covariances") {
  Rng rng(3);
  const CollabPoseGraph g({{0, 0}, {0, 1}, {0, 2}},
                          {{0, 1, EdgeKind::Odometry, Covariance::Identity(), 1.0},
                           {1, 2, EdgeKind::Odometry, Covariance::Identity(), 1.0}},
                          {0});
  const std::vector<Covariance> covs{random_cov(rng), random_cov(rng)};
  const auto f = build_full_fim(g, covs);
  const Eigen::Matrix3d i01 = covs[0].inverse();
  const Eigen::Matrix3d i12 = covs[1].inverse();
  CHECK((f.matrix.block<3, 3>(0, 0) - (i01 + i12)).norm() < 1e-9 * i01.norm());
  CHECK((f.matrix.block<3, 3>(0, 3) + i12).norm() < 1e-9 * i12.norm());
  CHECK((f.matrix.block<3, 3>(3, 3) - i12).norm() < 1e-9 * i12.norm());
}

TEST_CASE("edge additions never increase either uncertainty metric") {
  EnvGraph env;
  const auto g = grid_pose_graph(60, 5, &env);
  const DistanceOracle d(env);
  Rng rng(6);
  std::vector<Covariance> covs;
  for (std::size_t e = 0; e < g.edges().size(); ++e) covs.push_back(random_cov(rng));
  auto cands = enumerate_candidates(g, d);
  std::vector<ExtraEdge> seq;
  for (int k = 0; k < 25; ++k) {
    const auto& c = cands[rng.below(cands.size())];
    seq.push_back({c.i, c.j, random_cov(rng)});
  }
  const auto trace = monotone_experiment(g, covs, seq);
  REQUIRE(trace.size() == seq.size() + 1);
  for (std::size_t k = 1; k < trace.size(); ++k) {
    CHECK(trace[k].laplacian <= trace[k - 1].laplacian + 1e-9);
    CHECK(trace[k].fim <= trace[k - 1].fim + 1e-9);
  }
  std::vector<ExtraEdge> reversed(seq.rbegin(), seq.rend());
  const auto back = monotone_experiment(g, covs, reversed);
  CHECK(back.back().laplacian == doctest::Approx(trace.back().laplacian).epsilon(1e-9));
  CHECK(back.back().fim == doctest::Approx(trace.back().fim).epsilon(1e-9));

  CHECK(monotone_experiment(g, covs, {}).size() == 1);
}

TEST_CASE("correlation experiment is deterministic and homogeneous is rank-exact") {
  CorrelationParams p;
  p.side = 60;
  p.trials = 8;
  p.vrp_time_limit_s = 1.0;
  p.heterogeneous = false;
  const auto a = correlation_experiment(p);
  const auto b = correlation_experiment(p);
  REQUIRE(a.points.size() == 8);
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    CHECK(a.points[k].laplacian == b.points[k].laplacian);
    CHECK(a.points[k].fim == b.points[k].fim);
  }
  CHECK(a.trial_seeds == b.trial_seeds);
}

TEST_CASE("rank and linear correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  const std::vector<double> cubic{1, 8, 27, 64, 125};
  const std::vector<double> down{5, 4, 3, 2, 1};
  CHECK(pearson(x, y) == doctest::Approx(1.0));
  CHECK(spearman(x, cubic) == doctest::Approx(1.0));
  CHECK(pearson(x, cubic) < 1.0);
  CHECK(spearman(x, down) == doctest::Approx(-1.0));
  const std::vector<double> ties{1, 2, 2, 3};
  CHECK(average_ranks(ties) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  CHECK(mean(x) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
}
