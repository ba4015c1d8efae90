#include "cge/json_io.hpp"

#include <fstream>

#include "cge/error.hpp"

namespace cge {

Json to_json(const EnvGraph& env) {
  Json j;
  j["seed"] = env.seed();
  j["side"] = env.side();
  Json vs = Json::array();
  for (int v = 0; v < env.vertex_count(); ++v) {
    vs.push_back({{"id", v}, {"x", env.position(v).x}, {"y", env.position(v).y}});
  }
  j["vertices"] = std::move(vs);
  Json es = Json::array();
  for (const auto& e : env.edges()) es.push_back({{"u", e.u}, {"v", e.v}, {"w", e.length}});
  j["edges"] = std::move(es);
  return j;
}

EnvGraph env_from_json(const Json& j) {
  try {
    const auto& vs = j.at("vertices");
    std::vector<Point2> points(vs.size());
    std::vector<char> seen(vs.size(), 0);
    for (const auto& v : vs) {
      const int id = v.at("id").get<int>();
      if (id < 0 || id >= static_cast<int>(vs.size()) || seen[id]) {
        throw Error(ErrorKind::Io, "vertex ids must be unique and contiguous from 0");
      }
      seen[id] = 1;
      points[id] = {v.at("x").get<double>(), v.at("y").get<double>()};
    }
    std::vector<EnvEdge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at("u").get<int>(), e.at("v").get<int>(), e.at("w").get<double>()});
    }
    return EnvGraph(std::move(points), std::move(edges), j.value("seed", std::uint64_t{0}),
                    j.value("side", 0.0));
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::Io, std::string("malformed environment JSON: ") + ex.what());
  }
}

Json to_json(const Walk& walk) {
  return {{"robot", walk.robot}, {"vertices", walk.vertices}, {"length", walk.length}};
}

Walk walk_from_json(const Json& j) {
  Walk w;
  w.robot = j.at("robot").get<int>();
  w.vertices = j.at("vertices").get<std::vector<VertexId>>();
  w.length = j.at("length").get<double>();
  return w;
}

std::vector<Walk> walks_from_json(const Json& j) {
  std::vector<Walk> out;
  for (const auto& w : j) out.push_back(walk_from_json(w));
  return out;
}

Json to_json(const VrpSolution& vrp, std::span<const Walk> walks) {
  Json j;
  j["seed"] = vrp.seed;
  j["routes"] = vrp.routes;
  j["lengths"] = vrp.lengths;
  j["makespan"] = vrp.makespan;
  j["improving_moves"] = vrp.improving_moves;
  j["hit_time_limit"] = vrp.hit_time_limit;
  Json ws = Json::array();
  for (const auto& w : walks) ws.push_back(to_json(w));
  j["walks"] = std::move(ws);
  return j;
}

VrpSolution vrp_from_json(const Json& j) {
  try {
    VrpSolution vrp;
    vrp.seed = j.value("seed", std::uint64_t{0});
    vrp.routes = j.at("routes").get<std::vector<std::vector<VertexId>>>();
    vrp.lengths = j.at("lengths").get<std::vector<double>>();
    vrp.makespan = j.at("makespan").get<double>();
    vrp.improving_moves = j.value("improving_moves", 0);
    vrp.hit_time_limit = j.value("hit_time_limit", false);
    return vrp;
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::Io, std::string("malformed VRP JSON: ") + ex.what());
  }
}

namespace {

Json covariance_json(const Covariance& c) {
  Json out = Json::array();
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) out.push_back(c(r, col));
  }
  return out;
}

Covariance covariance_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 9) throw Error(ErrorKind::Io, "covariance must have 9 entries");
  Covariance c;
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) c(r, col) = v[3 * r + col];
  }
  return c;
}

}  // namespace

Json to_json(const CollabPoseGraph& cpg) {
  Json j;
  Json poses = Json::array();
  for (PoseId p = 0; p < cpg.pose_count(); ++p) {
    poses.push_back({{"id", p},
                     {"robot", cpg.pose(p).robot},
                     {"vertex", cpg.pose(p).vertex},
                     {"anchor", cpg.is_anchor(p)}});
  }
  j["poses"] = std::move(poses);
  Json edges = Json::array();
  for (const auto& e : cpg.edges()) {
    edges.push_back({{"i", e.i},
                     {"j", e.j},
                     {"kind", to_string(e.kind)},
                     {"gamma", e.weight},
                     {"covariance", covariance_json(e.covariance)}});
  }
  j["edges"] = std::move(edges);
  j["anchors"] = cpg.anchors();
  j["free_count"] = cpg.free_count();
  j["connected"] = cpg.is_connected();
  return j;
}

CollabPoseGraph pose_graph_from_json(const Json& j) {
  try {
    std::vector<Pose> poses;
    for (const auto& p : j.at("poses")) {
      if (p.at("id").get<int>() != static_cast<int>(poses.size())) {
        throw Error(ErrorKind::Io, "pose ids must be contiguous from 0 and in order");
      }
      poses.push_back({p.at("robot").get<int>(), p.at("vertex").get<VertexId>()});
    }
    std::vector<PoseEdge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at("i").get<int>(), e.at("j").get<int>(),
                       edge_kind_from_string(e.at("kind").get<std::string>()),
                       covariance_from_json(e.at("covariance")), e.at("gamma").get<double>()});
    }
    return CollabPoseGraph(std::move(poses), std::move(edges),
                           j.at("anchors").get<std::vector<PoseId>>());
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::Io, std::string("malformed pose-graph JSON: ") + ex.what());
  }
}

Json ground_summary(const GroundSet& ground) {
  return {{"total_candidates", ground.total_candidates},
          {"valid_candidates", ground.candidates.size()},
          {"alpha_min", ground.alpha.min},
          {"alpha_max", ground.alpha.max},
          {"alpha", ground.alpha.alpha},
          {"lambda", ground.lambda},
          {"d_max", ground.d_max}};
}

Json to_json(const SolverResult& r) {
  return {{"algorithm", r.algorithm},
          {"selected", r.selected},
          {"objective", r.objective},
          {"empty_objective", r.empty_objective},
          {"gain", r.gain},
          {"oracle_calls", r.oracle_calls},
          {"wall_time_s", r.wall_time_s},
          {"seed", r.seed},
          {"lazy", r.lazy}};
}

Json to_json(const SelectedLoop& l) {
  return {{"i", l.i},
          {"j", l.j},
          {"robot_i", l.robot_i},
          {"robot_j", l.robot_j},
          {"vertex_i", l.vertex_i},
          {"vertex_j", l.vertex_j},
          {"travel", l.travel}};
}

SelectedLoop selected_loop_from_json(const Json& j) {
  return {j.at("i").get<int>(),        j.at("j").get<int>(),
          j.at("robot_i").get<int>(),  j.at("robot_j").get<int>(),
          j.at("vertex_i").get<int>(), j.at("vertex_j").get<int>(),
          j.at("travel").get<double>()};
}

Json to_json(const FinalPlan& plan) {
  Json j;
  j["makespan"] = plan.makespan;
  j["allocation_optimal"] = plan.allocation_optimal;
  Json robots = Json::array();
  for (std::size_t r = 0; r < plan.walks.size(); ++r) {
    Json detours = Json::array();
    for (const auto& d : plan.detours) {
      if (d.robot != static_cast<int>(r)) continue;
      detours.push_back({{"base_index", d.base_index},
                         {"at", d.at},
                         {"target", d.target},
                         {"travel", d.travel},
                         {"loop", d.loop}});
    }
    robots.push_back({{"robot", plan.walks[r].robot},
                      {"walk", plan.walks[r].vertices},
                      {"walk_length", plan.walks[r].length},
                      {"length", plan.lengths[r]},
                      {"base_length", plan.base_lengths[r]},
                      {"detours", std::move(detours)}});
  }
  j["robots"] = std::move(robots);
  Json loops = Json::array();
  for (std::size_t k = 0; k < plan.loops.size(); ++k) {
    Json l = to_json(plan.loops[k]);
    l["assigned_robot"] = plan.assigned_robot[k];
    loops.push_back(std::move(l));
  }
  j["loops"] = std::move(loops);
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::Io, "cannot parse '" + path + "': " + ex.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << j.dump(1) << '\n';
}

}  // namespace cge
