#include "cge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "cge/error.hpp"
#include "cge/rng.hpp"
#include "cge/stats.hpp"

namespace cge {

namespace {

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + name + "] " + e.what());
  }
}

std::vector<VertexId> resolve_starts(const PipelineConfig& config) {
  if (!config.starts.empty()) return config.starts;
  if (config.robots < 1) throw Error(ErrorKind::Argument, "at least one robot is required");
  return std::vector<VertexId>(config.robots, 0);
}

}  // namespace

CoverageInstance prepare_instance(EnvGraph env, std::span<const VertexId> starts,
                                  std::uint64_t seed, double vrp_time_limit_s) {
  DistanceOracle oracle = stage("paths", [&] { return DistanceOracle(env); });
  VrpSolution vrp = stage("vrp", [&] {
    return solve_vrp(env, oracle, starts, VrpOptions{vrp_time_limit_s, seed});
  });
  std::vector<Walk> walks = expand_all(oracle, vrp);
  CollabPoseGraph cpg = stage("pose-graph", [&] { return build_collab_pose_graph(walks); });
  ReducedLaplacian lap = stage("pose-graph", [&] { return reduced_weighted_laplacian(cpg); });
  return {std::move(env), std::move(oracle), std::move(vrp), std::move(walks), std::move(cpg),
          std::move(lap)};
}

GroundSet ground_set_for(const CoverageInstance& inst, double lambda) {
  return stage("ground-set", [&] {
    auto candidates = enumerate_candidates(inst.pose_graph, inst.oracle);
    if (candidates.empty()) {
      GroundSet empty;
      empty.lambda = lambda;
      return empty;
    }
    attach_initial_gains(candidates, inst.pose_graph, inst.laplacian);
    const auto bounds = compute_alpha(candidates, lambda);
    return prune_candidates(std::move(candidates), bounds, lambda);
  });
}

PipelineResult run_pipeline(EnvGraph env, const PipelineConfig& config) {
  const auto starts = resolve_starts(config);
  CoverageInstance inst = prepare_instance(std::move(env), starts, config.seed,
                                           config.vrp_time_limit_s);
  PipelineResult out;
  out.ground = ground_set_for(inst, config.lambda);
  const auto problem = make_problem(out.ground, inst.pose_graph, inst.laplacian);
  out.solver = stage("select", [&] {
    return run_algorithm(config.algorithm, problem, config.seed, config.lazy);
  });
  auto loops = resolve_selection(out.ground, out.solver.selected, inst.pose_graph);
  out.plan = stage("finalize", [&] {
    return plan_with_loops(inst.env, inst.oracle, inst.walks, std::move(loops));
  });
  out.env = std::move(inst.env);
  out.vrp = std::move(inst.vrp);
  out.walks = std::move(inst.walks);
  out.pose_graph = std::move(inst.pose_graph);
  return out;
}

PipelineResult run_pipeline(const EnvParams& env_params, const PipelineConfig& config) {
  EnvGraph env = stage("gen-env", [&] { return generate_random_env(env_params); });
  return run_pipeline(std::move(env), config);
}

bool plan_covers(const EnvGraph& env, const FinalPlan& plan) {
  std::vector<char> covered(env.vertex_count(), 0);
  for (const auto& w : plan.walks) {
    for (std::size_t k = 0; k < w.vertices.size(); ++k) {
      if (!env.contains(w.vertices[k])) return false;
      if (k > 0 && !env.has_edge(w.vertices[k - 1], w.vertices[k])) return false;
      covered[w.vertices[k]] = 1;
    }
  }
  return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
}

bool plan_lengths_consistent(const FinalPlan& plan, double tol) {
  std::vector<double> expected(plan.base_lengths);
  for (const auto& d : plan.detours) expected.at(d.robot) += 2.0 * d.travel;
  for (std::size_t r = 0; r < expected.size(); ++r) {
    const double scale = std::max(1.0, std::abs(expected[r]));
    if (std::abs(expected[r] - plan.lengths[r]) > tol * scale) return false;
    // The realized walk travels exactly the shortest paths it splices in.
    if (std::abs(plan.walks[r].length - plan.lengths[r]) > 1e-6 * scale) return false;
  }
  return true;
}

std::uint64_t trial_seed(std::uint64_t seed, double size, int trial) {
  const auto size_key = static_cast<std::uint64_t>(std::llround(size * 1000.0));
  return derive_seed(derive_seed(seed, size_key), static_cast<std::uint64_t>(trial));
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<double>>();
    c.trials = j.value("trials", c.trials);
    c.robots = j.value("robots", c.robots);
    c.common_start = j.value("common_start", c.common_start);
    if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : j.at("algorithms")) c.algorithms.push_back(algorithm_from_label(a));
    }
    c.lazy = j.value("lazy", c.lazy);
    c.include_eager_variants = j.value("include_eager_variants", c.include_eager_variants);
    c.seed = j.value("seed", c.seed);
    c.vrp_time_limit_s = j.value("vrp_time_limit_s", c.vrp_time_limit_s);
    c.threads = j.value("threads", c.threads);
    c.out_dir = j.value("out_dir", c.out_dir);
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::Io, std::string("malformed experiment config: ") + ex.what());
  }
  if (c.trials < 1) throw Error(ErrorKind::Argument, "trials must be >= 1");
  if (c.robots < 1) throw Error(ErrorKind::Argument, "robots must be >= 1");
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json algos = Json::array();
  for (Algorithm a : c.algorithms) algos.push_back(label(a));
  return {{"sizes", c.sizes},
          {"trials", c.trials},
          {"robots", c.robots},
          {"common_start", c.common_start},
          {"lambdas", c.lambdas},
          {"algorithms", algos},
          {"lazy", c.lazy},
          {"include_eager_variants", c.include_eager_variants},
          {"seed", c.seed},
          {"vrp_time_limit_s", c.vrp_time_limit_s},
          {"threads", c.threads},
          {"out_dir", c.out_dir}};
}

namespace {

struct Variant {
  Algorithm algorithm;
  bool lazy;
};

bool has_lazy_form(Algorithm a) {
  return a == Algorithm::SimpleGreedy || a == Algorithm::DoubleGreedyOrdered ||
         a == Algorithm::DeterministicUsmOrdered;
}

std::vector<Variant> variants_for(const ExperimentConfig& config) {
  std::vector<Variant> out;
  for (Algorithm a : config.algorithms) {
    out.push_back({a, config.lazy && has_lazy_form(a)});
  }
  if (config.include_eager_variants && config.lazy) {
    for (Algorithm a : config.algorithms) {
      if (has_lazy_form(a)) out.push_back({a, false});
    }
  }
  return out;
}

std::vector<VertexId> trial_starts(const ExperimentConfig& config, const EnvGraph& env,
                                   std::uint64_t seed) {
  if (config.common_start) return std::vector<VertexId>(config.robots, 0);
  Rng rng(derive_seed(seed, 2));
  std::vector<VertexId> starts;
  for (int r = 0; r < config.robots; ++r) {
    starts.push_back(static_cast<VertexId>(rng.below(static_cast<std::uint64_t>(env.vertex_count()))));
  }
  return starts;
}

std::vector<BenchmarkRow> run_trial(const ExperimentConfig& config, double size, int trial) {
  std::vector<BenchmarkRow> rows;
  const std::uint64_t seed = trial_seed(config.seed, size, trial);
  const auto variants = variants_for(config);
  auto fail_all = [&](const std::string& what) {
    for (double lambda : config.lambdas) {
      for (const auto& v : variants) {
        BenchmarkRow row;
        row.size = size;
        row.trial = trial;
        row.env_seed = seed;
        row.lambda = lambda;
        row.algorithm = label(v.algorithm);
        row.lazy = v.lazy;
        row.error = what;
        rows.push_back(row);
      }
    }
  };
  try {
    EnvParams params;
    params.side = size;
    params.seed = seed;
    EnvGraph env = stage("gen-env", [&] { return generate_random_env(params); });
    const auto starts = trial_starts(config, env, seed);
    const CoverageInstance inst =
        prepare_instance(std::move(env), starts, seed, config.vrp_time_limit_s);
    for (double lambda : config.lambdas) {
      const GroundSet ground = ground_set_for(inst, lambda);
      const auto problem = make_problem(ground, inst.pose_graph, inst.laplacian);
      for (const auto& v : variants) {
        BenchmarkRow row;
        row.size = size;
        row.trial = trial;
        row.env_seed = seed;
        row.lambda = lambda;
        row.algorithm = label(v.algorithm);
        row.lazy = v.lazy;
        row.total_candidates = ground.total_candidates;
        row.valid_candidates = ground.candidates.size();
        row.vrp_makespan = inst.vrp.makespan;
        try {
          const SolverResult r = run_algorithm(v.algorithm, problem, seed, v.lazy);
          row.gain = r.gain;
          row.objective = r.objective;
          row.oracle_calls = r.oracle_calls;
          row.wall_time_s = r.wall_time_s;
          row.selected = r.selected.size();
          auto loops = resolve_selection(ground, r.selected, inst.pose_graph);
          const FinalPlan plan = plan_with_loops(inst.env, inst.oracle, inst.walks, std::move(loops));
          row.plan_makespan = plan.makespan;
          row.coverage_ok = plan_covers(inst.env, plan);
          row.lengths_ok = plan_lengths_consistent(plan);
          row.allocation_optimal = plan.allocation_optimal;
        } catch (const Error& e) {
          row.error = std::string("[select] ") + e.what();
        }
        rows.push_back(row);
      }
    }
  } catch (const Error& e) {
    fail_all(e.what());
  }
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void write_results_csv(const std::string& path, const std::vector<BenchmarkRow>& rows) {
  std::ofstream out(path);
  out << "size,trial,env_seed,lambda,algorithm,lazy,gain,objective,oracle_calls,wall_time_s,"
         "total_candidates,valid_candidates,selected,vrp_makespan,plan_makespan,coverage_ok,"
         "lengths_ok,allocation_optimal,error\n";
  for (const auto& r : rows) {
    out << num(r.size) << ',' << r.trial << ',' << r.env_seed << ',' << num(r.lambda) << ','
        << r.algorithm << ',' << (r.lazy ? 1 : 0) << ',' << num(r.gain) << ','
        << num(r.objective) << ',' << r.oracle_calls << ',' << num(r.wall_time_s) << ','
        << r.total_candidates << ',' << r.valid_candidates << ',' << r.selected << ','
        << num(r.vrp_makespan) << ',' << num(r.plan_makespan) << ',' << (r.coverage_ok ? 1 : 0)
        << ',' << (r.lengths_ok ? 1 : 0) << ',' << (r.allocation_optimal ? 1 : 0) << ','
        << csv_escape(r.error) << '\n';
  }
}

using TrialKey = std::tuple<double, int, double>;  // size, trial, lambda

// Primary rows: the configured variant of each algorithm, keyed per trial.
std::map<TrialKey, std::map<std::string, const BenchmarkRow*>> primary_rows(
    const ExperimentConfig& config, const std::vector<BenchmarkRow>& rows) {
  std::map<TrialKey, std::map<std::string, const BenchmarkRow*>> out;
  for (const auto& r : rows) {
    const bool primary = r.lazy == (config.lazy && has_lazy_form(algorithm_from_label(r.algorithm)));
    if (!primary || !r.error.empty()) continue;
    out[{r.size, r.trial, r.lambda}][r.algorithm] = &r;
  }
  return out;
}

void write_fig4(const std::string& path, const ExperimentConfig& config,
                const std::vector<BenchmarkRow>& rows) {
  const auto keyed = primary_rows(config, rows);
  std::ofstream out(path);
  out << "size,lambda,rank,trial,env_seed";
  for (Algorithm a : config.algorithms) out << ',' << label(a);
  out << '\n';
  for (double size : config.sizes) {
    for (double lambda : config.lambdas) {
      std::vector<std::pair<double, int>> order;
      for (const auto& [key, by_algo] : keyed) {
        if (std::get<0>(key) != size || std::get<2>(key) != lambda) continue;
        const auto it = by_algo.find("sgre");
        order.emplace_back(it == by_algo.end() ? 0.0 : it->second->objective, std::get<1>(key));
      }
      std::sort(order.begin(), order.end());
      int rank = 0;
      for (const auto& [score, trial] : order) {
        const auto& by_algo = keyed.at({size, trial, lambda});
        out << num(size) << ',' << num(lambda) << ',' << rank++ << ',' << trial << ','
            << by_algo.begin()->second->env_seed;
        for (Algorithm a : config.algorithms) {
          const auto it = by_algo.find(label(a));
          out << ',' << (it == by_algo.end() ? std::string() : num(it->second->gain));
        }
        out << '\n';
      }
    }
  }
}

double improvement(const BenchmarkRow* alg, const BenchmarkRow* ref) {
  if (!alg || !ref || ref->gain == 0.0) return std::nan("");
  return (alg->objective - ref->objective) / std::abs(ref->gain);
}

void write_fig5(const std::string& path, const ExperimentConfig& config,
                const std::vector<BenchmarkRow>& rows) {
  const auto keyed = primary_rows(config, rows);
  std::ofstream out(path);
  out << "size,lambda,trial,env_seed,dusm_vs_dgre,sgre_vs_dgre,dgre_order_vs_dgre,"
         "dusm_order_vs_dusm\n";
  for (const auto& [key, by_algo] : keyed) {
    auto get = [&](const char* name) -> const BenchmarkRow* {
      const auto it = by_algo.find(name);
      return it == by_algo.end() ? nullptr : it->second;
    };
    out << num(std::get<0>(key)) << ',' << num(std::get<2>(key)) << ',' << std::get<1>(key) << ','
        << by_algo.begin()->second->env_seed << ',' << num(improvement(get("dusm"), get("dgre")))
        << ',' << num(improvement(get("sgre"), get("dgre"))) << ','
        << num(improvement(get("dgre-order"), get("dgre"))) << ','
        << num(improvement(get("dusm-order"), get("dusm"))) << '\n';
  }
}

void write_fig6(const std::string& path, const std::vector<BenchmarkRow>& rows) {
  std::ofstream out(path);
  out << "size,trial,env_seed,lambda,algorithm,lazy,total_candidates,valid_candidates,selected\n";
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    out << num(r.size) << ',' << r.trial << ',' << r.env_seed << ',' << num(r.lambda) << ','
        << r.algorithm << ',' << (r.lazy ? 1 : 0) << ',' << r.total_candidates << ','
        << r.valid_candidates << ',' << r.selected << '\n';
  }
}

void write_table1(const std::string& path, const ExperimentConfig& config,
                  const std::vector<BenchmarkRow>& rows) {
  std::map<std::tuple<double, double, std::string, bool>, std::vector<const BenchmarkRow*>> groups;
  for (const auto& r : rows) {
    if (r.error.empty()) groups[{r.size, r.lambda, r.algorithm, r.lazy}].push_back(&r);
  }
  std::ofstream out(path);
  out << "size,lambda,algorithm,lazy,trials,mean_wall_time_s,median_wall_time_s,"
         "mean_oracle_calls,mean_gain,mean_selected\n";
  (void)config;
  for (const auto& [key, members] : groups) {
    std::vector<double> times, calls, gains, selected;
    for (const auto* r : members) {
      times.push_back(r->wall_time_s);
      calls.push_back(static_cast<double>(r->oracle_calls));
      gains.push_back(r->gain);
      selected.push_back(static_cast<double>(r->selected));
    }
    out << num(std::get<0>(key)) << ',' << num(std::get<1>(key)) << ',' << std::get<2>(key) << ','
        << (std::get<3>(key) ? 1 : 0) << ',' << members.size() << ',' << num(mean(times)) << ','
        << num(median(times)) << ',' << num(mean(calls)) << ',' << num(mean(gains)) << ','
        << num(mean(selected)) << '\n';
  }
}

}  // namespace

BenchmarkReport run_benchmark(const ExperimentConfig& config) {
  struct Job {
    double size;
    int trial;
  };
  std::vector<Job> jobs;
  for (double size : config.sizes) {
    for (int t = 0; t < config.trials; ++t) jobs.push_back({size, t});
  }
  std::vector<std::vector<BenchmarkRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      results[k] = run_trial(config, jobs[k].size, jobs[k].trial);
    }
  };
  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BenchmarkReport report;
  for (auto& chunk : results) {
    for (auto& row : chunk) report.rows.push_back(std::move(row));
  }
  if (!config.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    const auto path = [&](const char* name) { return (fs::path(config.out_dir) / name).string(); };
    write_results_csv(path("results.csv"), report.rows);
    write_fig4(path("fig4_objectives.csv"), config, report.rows);
    write_fig5(path("fig5_ratios.csv"), config, report.rows);
    write_fig6(path("fig6_lambda.csv"), report.rows);
    write_table1(path("table1_times.csv"), config, report.rows);
    write_json_file(path("config.json"), to_json(config));
    report.files = {path("results.csv"), path("fig4_objectives.csv"), path("fig5_ratios.csv"),
                    path("fig6_lambda.csv"), path("table1_times.csv"), path("config.json")};
  }
  return report;
}

}  // namespace cge
