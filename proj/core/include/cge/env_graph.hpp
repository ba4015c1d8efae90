#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cge {

using VertexId = int;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct EnvEdge {
  VertexId u = 0;
  VertexId v = 0;
  double length = 0.0;  // meters
};

// Metric 2D exploration graph. Vertex ids are the contiguous range
// [0, vertex_count()); construction validates connectivity, positive finite
// edge lengths, and the absence of self-loops and duplicate edges.
class EnvGraph {
 public:
  EnvGraph() = default;
  EnvGraph(std::vector<Point2> vertices, std::vector<EnvEdge> edges,
           std::uint64_t seed = 0, double side = 0.0);

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  const std::vector<Point2>& vertices() const { return vertices_; }
  const Point2& position(VertexId v) const { return vertices_[v]; }
  const std::vector<EnvEdge>& edges() const { return edges_; }

  struct Neighbor {
    VertexId vertex;
    double length;
  };
  std::span<const Neighbor> neighbors(VertexId v) const { return adjacency_[v]; }

  bool has_edge(VertexId u, VertexId v) const;
  double edge_length(VertexId u, VertexId v) const;  // throws if absent
  bool contains(VertexId v) const { return v >= 0 && v < vertex_count(); }

  std::uint64_t seed() const { return seed_; }
  double side() const { return side_; }

  bool operator==(const EnvGraph& other) const;

 private:
  std::vector<Point2> vertices_;
  std::vector<EnvEdge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::uint64_t seed_ = 0;
  double side_ = 0.0;
};

bool is_connected(int vertex_count, std::span<const std::pair<int, int>> edges);

struct EnvParams {
  double side = 100.0;          // meters per side
  double grid_step = 10.0;      // meters
  double vertex_removal_frac = 0.10;
  double edge_removal_frac = 0.03;
  double coord_noise_sigma = 2.0;  // meters
  std::uint64_t seed = 0;
};

// Random grid-like environment: 4-adjacent grid, random vertex and edge
// removals that keep the graph connected, then Gaussian coordinate noise.
// Edge lengths are the Euclidean distances between the noisy endpoints.
EnvGraph generate_random_env(const EnvParams& params);

// All-pairs shortest paths with predecessor tables for path reconstruction.
class DistanceOracle {
 public:
  explicit DistanceOracle(const EnvGraph& env);

  int vertex_count() const { return n_; }
  double distance(VertexId u, VertexId v) const { return dist_[index(u, v)]; }
  // Vertex sequence u, ..., v along a shortest path.
  std::vector<VertexId> path(VertexId u, VertexId v) const;

 private:
  std::size_t index(VertexId source, VertexId target) const {
    return static_cast<std::size_t>(source) * n_ + target;
  }

  int n_ = 0;
  std::vector<double> dist_;
  std::vector<VertexId> pred_;  // pred_[source * n + target]
};

inline DistanceOracle shortest_paths(const EnvGraph& env) {
  return DistanceOracle(env);
}

}  // namespace cge
