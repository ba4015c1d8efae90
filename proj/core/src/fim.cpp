#include "cge/fim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <numeric>

#include "cge/error.hpp"
#include "cge/loop_candidates.hpp"
#include "cge/rng.hpp"
#include "cge/stats.hpp"
#include "cge/vrp.hpp"

namespace cge {

double spd_log_det(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Factorization, "matrix is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double FullFim::log_det() const { return spd_log_det(matrix); }

namespace {

Eigen::Matrix3d information(const Covariance& cov) {
  d_opt_weight(cov);  // SPD check
  return cov.inverse();
}

void add_block_edge(Eigen::MatrixXd& fim, int ri, int rj, const Eigen::Matrix3d& info) {
  if (ri >= 0) fim.block<3, 3>(3 * ri, 3 * ri) += info;
  if (rj >= 0) fim.block<3, 3>(3 * rj, 3 * rj) += info;
  if (ri >= 0 && rj >= 0) {
    fim.block<3, 3>(3 * ri, 3 * rj) -= info;
    fim.block<3, 3>(3 * rj, 3 * ri) -= info;
  }
}

void check_sizes(const CollabPoseGraph& cpg, std::span<const Covariance> covs) {
  if (covs.size() != cpg.edges().size()) {
    throw Error(ErrorKind::Argument, "one covariance per pose-graph edge is required");
  }
  if (!cpg.every_component_anchored()) {
    throw Error(ErrorKind::SingularLaplacian, "a pose-graph component has no anchored pose");
  }
}

}  // namespace

FullFim build_full_fim(const CollabPoseGraph& cpg, std::span<const Covariance> edge_covariances,
                       std::span<const ExtraEdge> extra) {
  check_sizes(cpg, edge_covariances);
  FullFim out;
  out.free_count = cpg.free_count();
  out.matrix = Eigen::MatrixXd::Zero(3 * out.free_count, 3 * out.free_count);
  for (std::size_t e = 0; e < cpg.edges().size(); ++e) {
    const auto& edge = cpg.edges()[e];
    add_block_edge(out.matrix, cpg.row(edge.i), cpg.row(edge.j), information(edge_covariances[e]));
  }
  for (const auto& x : extra) {
    add_block_edge(out.matrix, cpg.row(x.i), cpg.row(x.j), information(x.covariance));
  }
  return out;
}

Eigen::MatrixXd covariance_weighted_laplacian(const CollabPoseGraph& cpg,
                                              std::span<const Covariance> edge_covariances,
                                              std::span<const ExtraEdge> extra) {
  check_sizes(cpg, edge_covariances);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(cpg.free_count(), cpg.free_count());
  for (std::size_t e = 0; e < cpg.edges().size(); ++e) {
    const auto& edge = cpg.edges()[e];
    add_weighted_edge(l, cpg.row(edge.i), cpg.row(edge.j), d_opt_weight(edge_covariances[e]));
  }
  for (const auto& x : extra) {
    add_weighted_edge(l, cpg.row(x.i), cpg.row(x.j), d_opt_weight(x.covariance));
  }
  return l;
}

std::vector<UncertaintyPoint> monotone_experiment(const CollabPoseGraph& cpg,
                                                  std::span<const Covariance> edge_covariances,
                                                  std::span<const ExtraEdge> sequence) {
  std::vector<UncertaintyPoint> trace;
  for (std::size_t k = 0; k <= sequence.size(); ++k) {
    const auto prefix = sequence.first(k);
    const double l = spd_log_det(covariance_weighted_laplacian(cpg, edge_covariances, prefix));
    const double f = build_full_fim(cpg, edge_covariances, prefix).log_det();
    trace.push_back({-l, -f});
  }
  return trace;
}

namespace {

Covariance random_covariance(Rng& rng) {
  const double sx = rng.uniform(0.05, 0.2);
  const double sy = rng.uniform(0.05, 0.2);
  const double t = rng.uniform(0.0005, 0.002);
  return Eigen::Vector3d(sx * sx, sy * sy, t).asDiagonal();
}

}  // namespace

CorrelationReport correlation_experiment(const CorrelationParams& params) {
  if (params.trials < 2) throw Error(ErrorKind::Argument, "correlation needs at least two trials");
  CorrelationReport report;
  for (int t = 0; t < params.trials; ++t) {
    const std::uint64_t seed = derive_seed(params.seed, static_cast<std::uint64_t>(t));
    report.trial_seeds.push_back(seed);
    EnvParams env_params;
    env_params.side = params.side;
    env_params.seed = seed;
    const EnvGraph env = generate_random_env(env_params);
    const DistanceOracle oracle(env);
    const std::vector<VertexId> starts(params.robots, 0);
    const VrpSolution vrp = solve_vrp(env, oracle, starts, {params.vrp_time_limit_s, seed});
    const auto walks = expand_all(oracle, vrp);
    const CollabPoseGraph cpg = build_collab_pose_graph(walks);

    Rng rng(derive_seed(seed, 1));
    auto candidates = enumerate_candidates(cpg, oracle);
    const std::size_t limit =
        std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(params.max_extra_edges));
    const std::size_t count = limit == 0 ? 0 : rng.below(limit + 1);
    // Partial Fisher-Yates for a uniform subset.
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t pick = k + rng.below(candidates.size() - k);
      std::swap(candidates[k], candidates[pick]);
    }

    std::vector<Covariance> covs;
    for (std::size_t e = 0; e < cpg.edges().size(); ++e) {
      covs.push_back(params.heterogeneous ? random_covariance(rng) : default_covariance());
    }
    std::vector<ExtraEdge> extra;
    for (std::size_t k = 0; k < count; ++k) {
      extra.push_back({candidates[k].i, candidates[k].j,
                       params.heterogeneous ? random_covariance(rng) : default_covariance()});
    }
    const double l = spd_log_det(covariance_weighted_laplacian(cpg, covs, extra));
    const double f = build_full_fim(cpg, covs, extra).log_det();
    report.points.push_back({-l, -f});
  }
  std::vector<double> xs, ys;
  for (const auto& p : report.points) {
    xs.push_back(p.laplacian);
    ys.push_back(p.fim);
  }
  report.spearman = spearman(xs, ys);
  report.pearson = pearson(xs, ys);
  return report;
}

}  // namespace cge
