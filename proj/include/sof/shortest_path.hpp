#pragma once

#include <limits>
#include <map>
#include <memory>
#include <vector>

#include "sof/network.hpp"

namespace sof {

inline constexpr double k_inf = std::numeric_limits<double>::infinity();

enum class path_metric {
  connection_only,
  connection_plus_half_setups,  // edge weight c(e) + (c(u)+c(v))/2
};

struct path_result {
  double cost = k_inf;
  std::vector<int> nodes;  // empty when unreachable
  bool reachable() const { return !nodes.empty(); }
};

// Single-source tree with deterministic tie-breaks: among equal-cost paths
// the lexicographically smallest node sequence wins.
struct sp_tree {
  int source = -1;
  std::map<int, double> dist;
  std::map<int, int> parent;  // absent for source / unreachable

  double dist_to(int v) const {
    auto it = dist.find(v);
    return it == dist.end() ? k_inf : it->second;
  }
  std::vector<int> path_to(int v) const;  // empty when unreachable
};

sp_tree dijkstra(const network& net, int source,
                 path_metric metric = path_metric::connection_only);

path_result shortest_path(const network& net, int u, int v,
                          path_metric metric = path_metric::connection_only);

// Shortest-path lookups behind an interface so the same algorithm code can
// run centralized or on top of the simulated multi-controller exchange.
class path_provider {
 public:
  virtual ~path_provider() = default;
  virtual path_result query(int u, int v) = 0;
};

// Centralized provider; caches one Dijkstra tree per requested source.
class local_path_provider : public path_provider {
 public:
  explicit local_path_provider(const network& net) : net_(&net) {}
  path_result query(int u, int v) override;

 private:
  const network* net_;
  std::map<int, sp_tree> cache_;
};

}  // namespace sof
