#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cge/allocation.hpp"
#include "cge/env_graph.hpp"
#include "cge/json_io.hpp"
#include "cge/loop_candidates.hpp"
#include "cge/pose_graph.hpp"
#include "cge/usm.hpp"
#include "cge/vrp.hpp"

namespace cge {

struct PipelineConfig {
  int robots = 3;
  std::vector<VertexId> starts;  // empty: every robot starts at vertex 0
  double lambda = 0.3;
  Algorithm algorithm = Algorithm::SimpleGreedy;
  bool lazy = true;
  std::uint64_t seed = 7;
  double vrp_time_limit_s = 20.0;
};

struct PipelineResult {
  EnvGraph env;
  VrpSolution vrp;
  std::vector<Walk> walks;
  CollabPoseGraph pose_graph;
  GroundSet ground;
  SolverResult solver;
  FinalPlan plan;
};

// Stage 1 (coverage) products shared by every selection run on an instance.
struct CoverageInstance {
  EnvGraph env;
  DistanceOracle oracle;
  VrpSolution vrp;
  std::vector<Walk> walks;
  CollabPoseGraph pose_graph;
  ReducedLaplacian laplacian;
};

CoverageInstance prepare_instance(EnvGraph env, std::span<const VertexId> starts,
                                  std::uint64_t seed, double vrp_time_limit_s);

// Enumerate, bound alpha, prune. An instance without any candidate pair
// yields an empty ground set instead of an error.
GroundSet ground_set_for(const CoverageInstance& inst, double lambda);

// Env -> VRP -> pose graph -> ground set -> selection -> allocation. Stage
// failures are rethrown with the stage name prefixed to the message.
PipelineResult run_pipeline(EnvGraph env, const PipelineConfig& config);
PipelineResult run_pipeline(const EnvParams& env_params, const PipelineConfig& config);

struct ExperimentConfig {
  std::vector<double> sizes{60.0, 80.0, 100.0, 120.0};
  int trials = 50;
  int robots = 3;
  bool common_start = true;
  std::vector<double> lambdas{0.3};
  std::vector<Algorithm> algorithms = all_algorithms();
  bool lazy = true;
  bool include_eager_variants = false;  // extra timing rows for eager sgre/dgre-order/dusm-order
  std::uint64_t seed = 7;
  double vrp_time_limit_s = 20.0;
  int threads = 1;
  std::string out_dir;  // empty: no files written
};

ExperimentConfig experiment_config_from_json(const Json& j);
Json to_json(const ExperimentConfig& config);

struct BenchmarkRow {
  double size = 0.0;
  int trial = 0;
  std::uint64_t env_seed = 0;
  double lambda = 0.0;
  std::string algorithm;
  bool lazy = false;
  double gain = 0.0;
  double objective = 0.0;
  std::uint64_t oracle_calls = 0;
  double wall_time_s = 0.0;
  std::size_t total_candidates = 0;
  std::size_t valid_candidates = 0;
  std::size_t selected = 0;
  double vrp_makespan = 0.0;
  double plan_makespan = 0.0;
  bool coverage_ok = false;
  bool lengths_ok = false;  // plan lengths == base + sum 2 omega within 1e-9
  bool allocation_optimal = false;
  std::string error;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::vector<std::string> files;
};

// Every row is a pure function of (config, size, trial); env seeds derive
// from config.seed and are recorded per row.
BenchmarkReport run_benchmark(const ExperimentConfig& config);

std::uint64_t trial_seed(std::uint64_t seed, double size, int trial);

// Checks the final plan against the coverage and bookkeeping invariants.
bool plan_covers(const EnvGraph& env, const FinalPlan& plan);
bool plan_lengths_consistent(const FinalPlan& plan, double tol = 1e-9);

}  // namespace cge
