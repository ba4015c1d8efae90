#pragma once

#include <json.hpp>
#include <string>

#include "cge/allocation.hpp"
#include "cge/env_graph.hpp"
#include "cge/loop_candidates.hpp"
#include "cge/pose_graph.hpp"
#include "cge/usm.hpp"
#include "cge/vrp.hpp"

namespace cge {

using Json = nlohmann::json;

Json to_json(const EnvGraph& env);
EnvGraph env_from_json(const Json& j);

Json to_json(const VrpSolution& vrp, std::span<const Walk> walks);
VrpSolution vrp_from_json(const Json& j);
Json to_json(const Walk& walk);
Walk walk_from_json(const Json& j);
std::vector<Walk> walks_from_json(const Json& j);

Json to_json(const CollabPoseGraph& cpg);
CollabPoseGraph pose_graph_from_json(const Json& j);

Json ground_summary(const GroundSet& ground);
Json to_json(const SolverResult& result);
Json to_json(const SelectedLoop& loop);
SelectedLoop selected_loop_from_json(const Json& j);
Json to_json(const FinalPlan& plan);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace cge
