#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cge/error.hpp"
#include "cge/fim.hpp"
#include "cge/json_io.hpp"
#include "cge/pipeline.hpp"

namespace {

using namespace cge;

// Every subcommand body runs under a stage tag so failures print as
// "cge: [stage] message".
struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
void tagged(const std::string& stage, F&& body) {
  try {
    body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    throw StageError(what.rfind('[', 0) == 0 ? what : "[" + stage + "] " + what);
  }
}

std::vector<VertexId> parse_starts(const std::string& text) {
  std::vector<VertexId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Argument, "bad start vertex '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::Argument, "--starts needs at least one vertex");
  return out;
}

void emit(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(1) << '\n';
  } else {
    write_json_file(path, j);
  }
}

struct PgInputs {
  EnvGraph env;
  std::vector<Walk> walks;
  CollabPoseGraph cpg;
};

PgInputs load_pg(const std::string& path) {
  const Json j = read_json_file(path);
  if (!j.contains("env") || !j.contains("pose_graph")) {
    throw Error(ErrorKind::Io, path + ": expected a build-pg output with env and pose_graph");
  }
  return {env_from_json(j.at("env")), j.contains("walks") ? walks_from_json(j.at("walks"))
                                                           : std::vector<Walk>{},
          pose_graph_from_json(j.at("pose_graph"))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage planning with informative loop closures"};
  app.require_subcommand(1);

  // gen-env
  EnvParams env_params;
  std::string env_out;
  auto* gen = app.add_subcommand("gen-env", "Generate a random grid-like environment");
  gen->add_option("--side", env_params.side, "Side length in meters")->check(CLI::PositiveNumber);
  gen->add_option("--seed", env_params.seed, "Random seed");
  gen->add_option("--grid-step", env_params.grid_step, "Grid spacing in meters")
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", env_out, "Output JSON (stdout if omitted)");

  // solve-vrp
  std::string vrp_env, vrp_starts = "0,0,0", vrp_out;
  VrpOptions vrp_opts;
  auto* vrp = app.add_subcommand("solve-vrp", "Min-makespan coverage routes");
  vrp->add_option("--env", vrp_env, "Environment JSON")->required();
  vrp->add_option("--starts", vrp_starts, "Comma-separated start vertex per robot");
  vrp->add_option("--time-limit", vrp_opts.time_limit_s, "Local search limit in seconds");
  vrp->add_option("--seed", vrp_opts.seed, "Seed recorded with the solution");
  vrp->add_option("--out", vrp_out, "Output JSON");

  // build-pg
  std::string pg_env, pg_vrp, pg_out;
  auto* pg = app.add_subcommand("build-pg", "Collaborative pose graph from VRP walks");
  pg->add_option("--env", pg_env, "Environment JSON (defaults to the one inside --vrp)");
  pg->add_option("--vrp", pg_vrp, "solve-vrp output")->required();
  pg->add_option("--out", pg_out, "Output JSON");

  // select-loops
  std::string sel_pg, sel_algo = "sgre", sel_out;
  bool sel_lazy = false;
  std::uint64_t sel_seed = 7;
  double sel_lambda = 0.3;
  auto* sel = app.add_subcommand("select-loops", "Choose loop-closing edges");
  sel->add_option("--pg", sel_pg, "build-pg output")->required();
  sel->add_option("--algo", sel_algo, "sgre | dgre | dgre-order | dusm | dusm-order")
      ->check(CLI::IsMember({"sgre", "dgre", "dgre-order", "dusm", "dusm-order"}));
  sel->add_flag("--lazy", sel_lazy, "Use lazy marginal checks");
  sel->add_option("--seed", sel_seed, "Seed for randomized solvers");
  sel->add_option("--lambda", sel_lambda, "Pruning level in [0, 1]")->check(CLI::Range(0.0, 1.0));
  sel->add_option("--out", sel_out, "Output JSON");

  // finalize
  std::string fin_vrp, fin_sel, fin_out;
  auto* fin = app.add_subcommand("finalize", "Insert selected loops into the coverage walks");
  fin->add_option("--vrp", fin_vrp, "solve-vrp output")->required();
  fin->add_option("--sel", fin_sel, "select-loops output")->required();
  fin->add_option("--out", fin_out, "Output JSON");

  // validate-fim
  CorrelationParams fim_params;
  bool fim_homogeneous = false;
  std::string fim_out;
  auto* fim = app.add_subcommand("validate-fim", "Laplacian vs FIM uncertainty correlation");
  fim->add_option("--side", fim_params.side, "Environment side in meters");
  fim->add_option("--trials", fim_params.trials, "Number of trials")->check(CLI::PositiveNumber);
  fim->add_option("--seed", fim_params.seed, "Base seed");
  fim->add_option("--robots", fim_params.robots, "Robot count")->check(CLI::PositiveNumber);
  fim->add_flag("--homogeneous", fim_homogeneous, "Use the default covariance on every edge");
  fim->add_option("--out", fim_out, "Output CSV (stdout if omitted)");

  // bench
  std::string bench_config, bench_out_dir;
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench", "Seeded benchmark batch");
  bench->add_option("--config", bench_config, "Experiment config JSON");
  bench->add_option("--out-dir", bench_out_dir, "Directory for CSV/JSON reports");
  auto* bench_seed_opt = bench->add_option("--seed", bench_seed, "Override the config seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      tagged("gen-env", [&] { emit(env_out, to_json(generate_random_env(env_params))); });
    } else if (*vrp) {
      tagged("solve-vrp", [&] {
        EnvGraph env = env_from_json(read_json_file(vrp_env));
        const auto starts = parse_starts(vrp_starts);
        for (VertexId s : starts) {
          if (!env.contains(s)) throw Error(ErrorKind::Argument, "start vertex out of range");
        }
        const DistanceOracle oracle(env);
        const VrpSolution solution = solve_vrp(env, oracle, starts, vrp_opts);
        const auto walks = expand_all(oracle, solution);
        Json j = to_json(solution, walks);
        j["starts"] = starts;
        j["env"] = to_json(env);
        emit(vrp_out, j);
      });
    } else if (*pg) {
      tagged("build-pg", [&] {
        const Json vj = read_json_file(pg_vrp);
        EnvGraph env = pg_env.empty() ? env_from_json(vj.at("env"))
                                      : env_from_json(read_json_file(pg_env));
        const auto walks = walks_from_json(vj.at("walks"));
        for (const auto& w : walks) {
          for (VertexId v : w.vertices) {
            if (!env.contains(v)) throw Error(ErrorKind::Consistency, "walk leaves the environment");
          }
        }
        const CollabPoseGraph cpg = build_collab_pose_graph(walks);
        Json walks_json = Json::array();
        for (const auto& w : walks) walks_json.push_back(to_json(w));
        emit(pg_out, {{"env", to_json(env)}, {"walks", walks_json}, {"pose_graph", to_json(cpg)}});
      });
    } else if (*sel) {
      tagged("select-loops", [&] {
        const PgInputs in = load_pg(sel_pg);
        const DistanceOracle oracle(in.env);
        const ReducedLaplacian lap = reduced_weighted_laplacian(in.cpg);
        GroundSet ground;
        ground.lambda = sel_lambda;
        auto candidates = enumerate_candidates(in.cpg, oracle);
        if (!candidates.empty()) {
          attach_initial_gains(candidates, in.cpg, lap);
          const AlphaBounds bounds = compute_alpha(candidates, sel_lambda);
          ground = prune_candidates(std::move(candidates), bounds, sel_lambda);
        }
        const auto problem = make_problem(ground, in.cpg, lap);
        const SolverResult result =
            run_algorithm(algorithm_from_label(sel_algo), problem, sel_seed, sel_lazy);
        const auto loops = resolve_selection(ground, result.selected, in.cpg);
        Json lj = Json::array();
        for (const auto& l : loops) lj.push_back(to_json(l));
        emit(sel_out, {{"ground_set", ground_summary(ground)},
                       {"result", to_json(result)},
                       {"loops", lj}});
      });
    } else if (*fin) {
      tagged("finalize", [&] {
        const Json vj = read_json_file(fin_vrp);
        const Json sj = read_json_file(fin_sel);
        EnvGraph env = env_from_json(vj.at("env"));
        const DistanceOracle oracle(env);
        auto walks = walks_from_json(vj.at("walks"));
        std::vector<SelectedLoop> loops;
        for (const auto& l : sj.at("loops")) loops.push_back(selected_loop_from_json(l));
        emit(fin_out, to_json(plan_with_loops(env, oracle, std::move(walks), std::move(loops))));
      });
    } else if (*fim) {
      tagged("validate-fim", [&] {
        fim_params.heterogeneous = !fim_homogeneous;
        const CorrelationReport report = correlation_experiment(fim_params);
        std::ofstream file;
        if (!fim_out.empty()) {
          file.open(fim_out);
          if (!file) throw Error(ErrorKind::Io, "cannot write " + fim_out);
        }
        std::ostream& out = fim_out.empty() ? std::cout : file;
        out.precision(12);
        out << "trial,seed,neg_logdet_laplacian,neg_logdet_fim\n";
        for (std::size_t t = 0; t < report.points.size(); ++t) {
          out << t << ',' << report.trial_seeds[t] << ',' << report.points[t].laplacian << ','
              << report.points[t].fim << '\n';
        }
        std::cerr << "spearman " << report.spearman << " pearson " << report.pearson << '\n';
      });
    } else if (*bench) {
      tagged("bench", [&] {
        ExperimentConfig config = bench_config.empty()
                                      ? ExperimentConfig{}
                                      : experiment_config_from_json(read_json_file(bench_config));
        if (!bench_out_dir.empty()) config.out_dir = bench_out_dir;
        if (*bench_seed_opt) config.seed = bench_seed;
        if (config.out_dir.empty()) config.out_dir = "bench_out";
        const BenchmarkReport report = run_benchmark(config);
        std::size_t failed = 0;
        for (const auto& r : report.rows) failed += r.error.empty() ? 0 : 1;
        std::cerr << report.rows.size() << " rows, " << failed << " failed\n";
        for (const auto& f : report.files) std::cerr << "wrote " << f << '\n';
      });
    }
  } catch (const StageError& e) {
    std::cerr << "cge: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
