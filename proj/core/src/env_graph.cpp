#include "cge/env_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "cge/error.hpp"
#include "cge/rng.hpp"

namespace cge {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument";
    case ErrorKind::GenerationFailure: return "generation-failure";
    case ErrorKind::SingularLaplacian: return "singular-laplacian";
    case ErrorKind::NoCandidates: return "no-candidates";
    case ErrorKind::Factorization: return "factorization";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Refusal: return "refusal";
    case ErrorKind::SolverInternal: return "solver-internal";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

bool is_connected(int vertex_count, std::span<const std::pair<int, int>> edges) {
  if (vertex_count <= 1) return true;
  std::vector<std::vector<int>> adj(vertex_count);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(vertex_count, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == vertex_count;
}

EnvGraph::EnvGraph(std::vector<Point2> vertices, std::vector<EnvEdge> edges,
                   std::uint64_t seed, double side)
    : vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      adjacency_(vertices_.size()),
      seed_(seed),
      side_(side) {
  const int n = vertex_count();
  if (n == 0) throw Error(ErrorKind::Argument, "environment has no vertices");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(edges_.size());
  for (const auto& e : edges_) {
    if (!contains(e.u) || !contains(e.v)) {
      throw Error(ErrorKind::Argument, "edge references unknown vertex");
    }
    if (e.u == e.v) throw Error(ErrorKind::Argument, "self-loop edge");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw Error(ErrorKind::Argument, "edge length must be positive and finite");
    }
    if (has_edge(e.u, e.v)) throw Error(ErrorKind::Argument, "duplicate edge");
    adjacency_[e.u].push_back({e.v, e.length});
    adjacency_[e.v].push_back({e.u, e.length});
    pairs.emplace_back(e.u, e.v);
  }
  if (!is_connected(n, pairs)) {
    throw Error(ErrorKind::Argument, "environment graph is not connected");
  }
}

bool EnvGraph::has_edge(VertexId u, VertexId v) const {
  for (const auto& nb : adjacency_[u]) {
    if (nb.vertex == v) return true;
  }
  return false;
}

double EnvGraph::edge_length(VertexId u, VertexId v) const {
  for (const auto& nb : adjacency_[u]) {
    if (nb.vertex == v) return nb.length;
  }
  throw Error(ErrorKind::Argument, "no edge between vertices");
}

bool EnvGraph::operator==(const EnvGraph& other) const {
  if (seed_ != other.seed_ || side_ != other.side_) return false;
  if (vertices_.size() != other.vertices_.size()) return false;
  if (edges_.size() != other.edges_.size()) return false;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].x != other.vertices_[i].x ||
        vertices_[i].y != other.vertices_[i].y) {
      return false;
    }
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& a = edges_[i];
    const auto& b = other.edges_[i];
    if (a.u != b.u || a.v != b.v || a.length != b.length) return false;
  }
  return true;
}

namespace {

struct GridEdge {
  int u;
  int v;
  bool alive = true;
};

bool alive_connected(const std::vector<char>& vertex_alive,
                     const std::vector<GridEdge>& edges) {
  std::vector<int> relabel(vertex_alive.size(), -1);
  int count = 0;
  for (std::size_t i = 0; i < vertex_alive.size(); ++i) {
    if (vertex_alive[i]) relabel[i] = count++;
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& e : edges) {
    if (e.alive && vertex_alive[e.u] && vertex_alive[e.v]) {
      pairs.emplace_back(relabel[e.u], relabel[e.v]);
    }
  }
  return is_connected(count, pairs);
}

}  // namespace

EnvGraph generate_random_env(const EnvParams& params) {
  if (!(params.grid_step > 0.0)) {
    throw Error(ErrorKind::Argument, "grid step must be positive");
  }
  if (params.side < 2.0 * params.grid_step) {
    throw Error(ErrorKind::Argument, "side must be at least two grid steps");
  }
  const double cells = params.side / params.grid_step;
  if (std::abs(cells - std::round(cells)) > 1e-9) {
    throw Error(ErrorKind::Argument, "side must be a multiple of the grid step");
  }
  const int k = static_cast<int>(std::lround(cells)) + 1;
  const int total = k * k;

  Rng rng(params.seed);
  std::vector<char> alive(total, 1);
  std::vector<GridEdge> edges;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const int id = r * k + c;
      if (c + 1 < k) edges.push_back({id, id + 1});
      if (r + 1 < k) edges.push_back({id, id + k});
    }
  }

  const int vertex_target =
      static_cast<int>(std::floor(params.vertex_removal_frac * total));
  int removed = 0;
  long budget = 100L * std::max(vertex_target, 1);
  while (removed < vertex_target) {
    if (budget-- <= 0) {
      throw Error(ErrorKind::GenerationFailure,
                  "vertex removal retry budget exhausted");
    }
    const int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(total)));
    if (!alive[pick]) continue;
    alive[pick] = 0;
    if (alive_connected(alive, edges)) {
      ++removed;
    } else {
      alive[pick] = 1;
    }
  }

  std::vector<int> live_edges;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (alive[edges[i].u] && alive[edges[i].v]) live_edges.push_back(static_cast<int>(i));
  }
  const int edge_target = static_cast<int>(
      std::floor(params.edge_removal_frac * static_cast<double>(live_edges.size())));
  removed = 0;
  budget = 100L * std::max(edge_target, 1);
  while (removed < edge_target) {
    if (budget-- <= 0) {
      throw Error(ErrorKind::GenerationFailure,
                  "edge removal retry budget exhausted");
    }
    const int pick = live_edges[rng.below(live_edges.size())];
    if (!edges[pick].alive) continue;
    edges[pick].alive = false;
    if (alive_connected(alive, edges)) {
      ++removed;
    } else {
      edges[pick].alive = true;
    }
  }

  std::vector<int> relabel(total, -1);
  std::vector<Point2> points;
  for (int id = 0; id < total; ++id) {
    if (!alive[id]) continue;
    relabel[id] = static_cast<int>(points.size());
    const double x = (id % k) * params.grid_step;
    const double y = (id / k) * params.grid_step;
    points.push_back({x, y});
  }
  if (params.coord_noise_sigma > 0.0) {
    for (auto& p : points) {
      p.x = rng.normal(p.x, params.coord_noise_sigma);
      p.y = rng.normal(p.y, params.coord_noise_sigma);
    }
  }

  std::vector<EnvEdge> out;
  for (const auto& e : edges) {
    if (!e.alive || !alive[e.u] || !alive[e.v]) continue;
    const int u = relabel[e.u];
    const int v = relabel[e.v];
    const double len = std::hypot(points[u].x - points[v].x, points[u].y - points[v].y);
    out.push_back({u, v, len});
  }
  return EnvGraph(std::move(points), std::move(out), params.seed, params.side);
}

DistanceOracle::DistanceOracle(const EnvGraph& env)
    : n_(env.vertex_count()),
      dist_(static_cast<std::size_t>(n_) * n_, std::numeric_limits<double>::infinity()),
      pred_(static_cast<std::size_t>(n_) * n_, -1) {
  using Item = std::pair<double, int>;
  for (int s = 0; s < n_; ++s) {
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist_[index(s, s)] = 0.0;
    queue.emplace(0.0, s);
    while (!queue.empty()) {
      auto [d, u] = queue.top();
      queue.pop();
      if (d > dist_[index(s, u)]) continue;
      for (const auto& nb : env.neighbors(u)) {
        const double nd = d + nb.length;
        auto& slot = dist_[index(s, nb.vertex)];
        if (nd < slot) {
          slot = nd;
          pred_[index(s, nb.vertex)] = u;
          queue.emplace(nd, nb.vertex);
        }
      }
    }
  }
  // Both searches produce the same value up to summation order; pin the
  // lower-source value so the table is exactly symmetric.
  for (int u = 0; u < n_; ++u) {
    for (int v = u + 1; v < n_; ++v) dist_[index(v, u)] = dist_[index(u, v)];
  }
}

std::vector<VertexId> DistanceOracle::path(VertexId u, VertexId v) const {
  std::vector<VertexId> out{v};
  VertexId cur = v;
  while (cur != u) {
    cur = pred_[index(u, cur)];
    if (cur < 0) throw Error(ErrorKind::Consistency, "unreachable vertex in path query");
    out.push_back(cur);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace cge
