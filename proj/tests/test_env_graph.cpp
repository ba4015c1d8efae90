#include <doctest.h>

#include <cmath>
#include <queue>

#include "cge/env_graph.hpp"
#include "cge/error.hpp"
#include "cge/json_io.hpp"

using namespace cge;

namespace {

bool bfs_connected(const EnvGraph& g) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const auto& nb : g.neighbors(v)) {
      if (!seen[nb.vertex]) {
        seen[nb.vertex] = 1;
        ++reached;
        q.push(nb.vertex);
      }
    }
  }
  return reached == g.vertex_count();
}

EnvGraph triangle() {
  return EnvGraph({{0, 0}, {3, 0}, {3, 4}}, {{0, 1, 3.0}, {1, 2, 4.0}, {0, 2, 10.0}});
}

}  // namespace

TEST_CASE("60 m grid loses exactly 4 of 49 vertices and stays connected") {
  for (std::uint64_t seed : {1ULL, 7ULL, 42ULL, 1234ULL}) {
    EnvParams p;
    p.side = 60;
    p.seed = seed;
    const EnvGraph g = generate_random_env(p);
    CHECK(g.vertex_count() == 45);
    CHECK(bfs_connected(g));
  }
}

TEST_CASE("120 m grid removes floor(0.1 * 169) = 16 of 169 vertices") {
  EnvParams p;
  p.side = 120;
  p.seed = 3;
  const EnvGraph g = generate_random_env(p);
  CHECK(g.vertex_count() == 169 - 16);
  CHECK(bfs_connected(g));
}

TEST_CASE("no removal and no noise gives the exact grid") {
  EnvParams p;
  p.side = 60;
  p.vertex_removal_frac = 0.0;
  p.edge_removal_frac = 0.0;
  p.coord_noise_sigma = 0.0;
  const EnvGraph g = generate_random_env(p);
  CHECK(g.vertex_count() == 49);
  CHECK(g.edges().size() == 2 * 7 * 6);
  for (const auto& e : g.edges()) CHECK(e.length == doctest::Approx(10.0).epsilon(1e-12));

  const DistanceOracle d(g);
  CHECK(d.distance(0, 48) == doctest::Approx(120.0).epsilon(1e-12));
  CHECK(d.distance(6, 42) == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("edge removal keeps every edge length euclidean") {
  EnvParams p;
  p.side = 80;
  p.seed = 11;
  const EnvGraph g = generate_random_env(p);
  for (const auto& e : g.edges()) {
    const auto& a = g.position(e.u);
    const auto& b = g.position(e.v);
    CHECK(e.length == doctest::Approx(std::hypot(a.x - b.x, a.y - b.y)));
  }
}

TEST_CASE("same seed regenerates an identical graph and serialization") {
  EnvParams p;
  p.side = 100;
  p.seed = 99;
  const EnvGraph a = generate_random_env(p);
  const EnvGraph b = generate_random_env(p);
  CHECK(a == b);
  CHECK(to_json(a).dump() == to_json(b).dump());
  p.seed = 100;
  CHECK_FALSE(generate_random_env(p) == a);
}

TEST_CASE("json round trip") {
  EnvParams p;
  p.side = 60;
  p.seed = 5;
  const EnvGraph g = generate_random_env(p);
  CHECK(env_from_json(to_json(g)) == g);
}

TEST_CASE("triangle shortest path goes through the middle vertex") {
  const EnvGraph g = triangle();
  const DistanceOracle d(g);
  CHECK(d.distance(0, 2) == doctest::Approx(7.0));
  CHECK(d.distance(2, 0) == d.distance(0, 2));
  CHECK(d.path(0, 2) == std::vector<VertexId>{0, 1, 2});
  for (int v = 0; v < 3; ++v) CHECK(d.distance(v, v) == 0.0);
}

TEST_CASE("distances are symmetric and satisfy the triangle inequality") {
  EnvParams p;
  p.side = 60;
  p.seed = 21;
  const EnvGraph g = generate_random_env(p);
  const DistanceOracle d(g);
  const int n = g.vertex_count();
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      REQUIRE(d.distance(u, v) == d.distance(v, u));
      for (int w = 0; w < n; w += 7) {
        REQUIRE(d.distance(u, v) <= d.distance(u, w) + d.distance(w, v) + 1e-9);
      }
    }
  }
  const auto path = d.path(0, n - 1);
  double len = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) len += g.edge_length(path[k - 1], path[k]);
  CHECK(len == doctest::Approx(d.distance(0, n - 1)).epsilon(1e-12));
}

TEST_CASE("invalid graphs are rejected") {
  CHECK_THROWS_AS(EnvGraph({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 1.0}}), Error);  // disconnected
  CHECK_THROWS_AS(EnvGraph({{0, 0}, {1, 0}}, {{0, 1, 0.0}}), Error);
  CHECK_THROWS_AS(EnvGraph({{0, 0}, {1, 0}}, {{0, 1, 1.0}, {1, 0, 1.0}}), Error);
  CHECK_THROWS_AS(EnvGraph({{0, 0}, {1, 0}}, {{0, 0, 1.0}, {0, 1, 1.0}}), Error);
  CHECK_THROWS_AS(EnvGraph({{0, 0}}, {{0, 3, 1.0}}), Error);
  EnvParams p;
  p.side = -5;
  CHECK_THROWS_AS(generate_random_env(p), Error);
}
