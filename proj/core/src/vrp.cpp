#include "cge/vrp.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "cge/error.hpp"

namespace cge {

double route_length(const DistanceOracle& oracle, std::span<const VertexId> route) {
  double total = 0.0;
  for (std::size_t k = 1; k < route.size(); ++k) {
    total += oracle.distance(route[k - 1], route[k]);
  }
  return total;
}

namespace {

using Route = std::vector<VertexId>;

class LocalSearch {
 public:
  LocalSearch(const DistanceOracle& oracle, std::vector<Route>& routes,
              double time_limit_s)
      : oracle_(oracle),
        routes_(routes),
        lengths_(routes.size()),
        deadline_(std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(time_limit_s))) {
    for (std::size_t r = 0; r < routes_.size(); ++r) {
      lengths_[r] = route_length(oracle_, routes_[r]);
    }
  }

  void run() {
    bool improved = true;
    while (improved && !timed_out()) {
      improved = false;
      improved |= two_opt_pass();
      improved |= relocate_pass();
      improved |= swap_pass();
    }
  }

  int moves() const { return moves_; }
  bool hit_time_limit() const { return hit_limit_; }

 private:
  double d(VertexId a, VertexId b) const { return oracle_.distance(a, b); }

  bool timed_out() {
    if (std::chrono::steady_clock::now() >= deadline_) hit_limit_ = true;
    return hit_limit_;
  }

  double makespan_with(std::size_t a, double la, std::size_t b, double lb) const {
    double ms = 0.0;
    for (std::size_t r = 0; r < lengths_.size(); ++r) {
      double l = lengths_[r];
      if (r == a) l = la;
      if (r == b) l = lb;
      ms = std::max(ms, l);
    }
    return ms;
  }

  double makespan() const {
    return *std::max_element(lengths_.begin(), lengths_.end());
  }

  // Lexicographic (makespan, total) strict decrease; makespan may not grow.
  bool accepts(double new_ms, double delta_total) const {
    const double ms = makespan();
    if (new_ms < ms - kEps) return true;
    return new_ms <= ms && delta_total < -kEps;
  }

  void commit(std::size_t a, std::size_t b) {
    lengths_[a] = route_length(oracle_, routes_[a]);
    lengths_[b] = route_length(oracle_, routes_[b]);
    ++moves_;
  }

  bool two_opt_pass() {
    bool any = false;
    for (std::size_t r = 0; r < routes_.size(); ++r) {
      Route& route = routes_[r];
      const std::size_t len = route.size();
      for (std::size_t i = 1; i + 1 < len; ++i) {
        for (std::size_t j = i + 1; j < len; ++j) {
          double before = d(route[i - 1], route[i]);
          double after = d(route[i - 1], route[j]);
          if (j + 1 < len) {
            before += d(route[j], route[j + 1]);
            after += d(route[i], route[j + 1]);
          }
          const double delta = after - before;
          if (accepts(makespan_with(r, lengths_[r] + delta, r, lengths_[r] + delta), delta)) {
            std::reverse(route.begin() + static_cast<long>(i),
                         route.begin() + static_cast<long>(j) + 1);
            commit(r, r);
            any = true;
          }
        }
      }
      if (timed_out()) break;
    }
    return any;
  }

  // Length change of removing position p from a route.
  double removal_delta(const Route& route, std::size_t p) const {
    double delta = -d(route[p - 1], route[p]);
    if (p + 1 < route.size()) {
      delta += d(route[p - 1], route[p + 1]) - d(route[p], route[p + 1]);
    }
    return delta;
  }

  // Length change of inserting v between q-1 and q (q == size appends).
  double insertion_delta(const Route& route, std::size_t q, VertexId v) const {
    double delta = d(route[q - 1], v);
    if (q < route.size()) delta += d(v, route[q]) - d(route[q - 1], route[q]);
    return delta;
  }

  bool relocate_pass() {
    bool any = false;
    for (std::size_t a = 0; a < routes_.size(); ++a) {
      for (std::size_t p = 1; p < routes_[a].size(); ++p) {
        for (std::size_t b = 0; b < routes_.size(); ++b) {
          if (try_relocate(a, p, b)) {
            any = true;
            break;
          }
        }
        if (p >= routes_[a].size()) break;
      }
      if (timed_out()) break;
    }
    return any;
  }

  bool try_relocate(std::size_t a, std::size_t p, std::size_t b) {
    const VertexId v = routes_[a][p];
    if (a == b) {
      Route reduced = routes_[a];
      reduced.erase(reduced.begin() + static_cast<long>(p));
      const double rem = removal_delta(routes_[a], p);
      for (std::size_t q = 1; q <= reduced.size(); ++q) {
        if (q == p) continue;
        const double delta = rem + insertion_delta(reduced, q, v);
        const double la = lengths_[a] + delta;
        if (accepts(makespan_with(a, la, a, la), delta)) {
          reduced.insert(reduced.begin() + static_cast<long>(q), v);
          routes_[a] = std::move(reduced);
          commit(a, a);
          return true;
        }
      }
      return false;
    }
    const double rem = removal_delta(routes_[a], p);
    for (std::size_t q = 1; q <= routes_[b].size(); ++q) {
      const double ins = insertion_delta(routes_[b], q, v);
      const double la = lengths_[a] + rem;
      const double lb = lengths_[b] + ins;
      if (accepts(makespan_with(a, la, b, lb), rem + ins)) {
        routes_[a].erase(routes_[a].begin() + static_cast<long>(p));
        routes_[b].insert(routes_[b].begin() + static_cast<long>(q), v);
        commit(a, b);
        return true;
      }
    }
    return false;
  }

  double replace_delta(const Route& route, std::size_t p, VertexId v) const {
    double delta = d(route[p - 1], v) - d(route[p - 1], route[p]);
    if (p + 1 < route.size()) delta += d(v, route[p + 1]) - d(route[p], route[p + 1]);
    return delta;
  }

  bool swap_pass() {
    bool any = false;
    for (std::size_t a = 0; a < routes_.size(); ++a) {
      for (std::size_t b = a + 1; b < routes_.size(); ++b) {
        for (std::size_t p = 1; p < routes_[a].size(); ++p) {
          for (std::size_t q = 1; q < routes_[b].size(); ++q) {
            const VertexId u = routes_[a][p];
            const VertexId v = routes_[b][q];
            const double da = replace_delta(routes_[a], p, v);
            const double db = replace_delta(routes_[b], q, u);
            if (accepts(makespan_with(a, lengths_[a] + da, b, lengths_[b] + db), da + db)) {
              std::swap(routes_[a][p], routes_[b][q]);
              commit(a, b);
              any = true;
            }
          }
        }
      }
      if (timed_out()) break;
    }
    return any;
  }

  static constexpr double kEps = 1e-9;

  const DistanceOracle& oracle_;
  std::vector<Route>& routes_;
  std::vector<double> lengths_;
  std::chrono::steady_clock::time_point deadline_;
  int moves_ = 0;
  bool hit_limit_ = false;
};

Route nearest_neighbor_order(const DistanceOracle& oracle, VertexId start,
                             std::vector<VertexId> members) {
  std::sort(members.begin(), members.end());
  Route route{start};
  std::vector<char> used(members.size(), 0);
  VertexId tail = start;
  for (std::size_t step = 0; step < members.size(); ++step) {
    std::size_t best = members.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (used[k]) continue;
      const double dk = oracle.distance(tail, members[k]);
      if (dk < best_d) {  // ascending ids: first strict minimum wins ties
        best_d = dk;
        best = k;
      }
    }
    used[best] = 1;
    tail = members[best];
    route.push_back(tail);
  }
  return route;
}

}  // namespace

VrpSolution solve_vrp(const EnvGraph& env, const DistanceOracle& oracle,
                      std::span<const VertexId> starts, const VrpOptions& options) {
  if (starts.empty()) throw Error(ErrorKind::Argument, "at least one robot is required");
  for (VertexId s : starts) {
    if (!env.contains(s)) throw Error(ErrorKind::Argument, "start vertex not in environment");
  }
  const int n = env.vertex_count();
  const std::size_t robots = starts.size();

  std::vector<char> covered(n, 0);
  for (VertexId s : starts) covered[s] = 1;
  std::vector<std::vector<VertexId>> members(robots);
  std::vector<VertexId> tails(starts.begin(), starts.end());
  std::vector<double> lengths(robots, 0.0);
  int remaining = static_cast<int>(std::count(covered.begin(), covered.end(), 0));

  while (remaining > 0) {
    const std::size_t r = static_cast<std::size_t>(
        std::min_element(lengths.begin(), lengths.end()) - lengths.begin());
    VertexId best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (VertexId v = 0; v < n; ++v) {
      if (covered[v]) continue;
      const double dv = oracle.distance(tails[r], v);
      if (dv < best_d) {
        best_d = dv;
        best = v;
      }
    }
    covered[best] = 1;
    --remaining;
    members[r].push_back(best);
    lengths[r] += best_d;
    tails[r] = best;
  }

  std::vector<Route> routes(robots);
  for (std::size_t r = 0; r < robots; ++r) {
    routes[r] = nearest_neighbor_order(oracle, starts[r], members[r]);
  }

  LocalSearch search(oracle, routes, options.time_limit_s);
  search.run();

  VrpSolution out;
  out.routes = std::move(routes);
  out.seed = options.seed;
  out.improving_moves = search.moves();
  out.hit_time_limit = search.hit_time_limit();
  for (const auto& route : out.routes) {
    out.lengths.push_back(route_length(oracle, route));
  }
  out.makespan = *std::max_element(out.lengths.begin(), out.lengths.end());
  return out;
}

Walk expand_to_walk(const DistanceOracle& oracle, int robot,
                    std::span<const VertexId> route) {
  Walk walk;
  walk.robot = robot;
  if (route.empty()) return walk;
  walk.vertices.push_back(route.front());
  for (std::size_t k = 1; k < route.size(); ++k) {
    const auto hop = oracle.path(route[k - 1], route[k]);
    walk.vertices.insert(walk.vertices.end(), hop.begin() + 1, hop.end());
    walk.length += oracle.distance(route[k - 1], route[k]);
  }
  return walk;
}

std::vector<Walk> expand_all(const DistanceOracle& oracle, const VrpSolution& solution) {
  std::vector<Walk> walks;
  for (std::size_t r = 0; r < solution.routes.size(); ++r) {
    walks.push_back(expand_to_walk(oracle, static_cast<int>(r), solution.routes[r]));
  }
  return walks;
}

}  // namespace cge
