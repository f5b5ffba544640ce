#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sof/instance.hpp"
#include "sof/walk.hpp"

namespace sof {

// A service overlay forest: chain walks in clone space plus plain tree edges
// that carry fully processed data from the walks' terminals towards the
// destinations. Tree edges are a multiset; every entry is one traversal.
class service_forest {
 public:
  std::vector<service_walk> walks;
  std::vector<std::pair<int, int>> tree_edges;

  // Registers a walk, assigning fresh clone ids to visits that carry none.
  // Visits that already carry a clone id keep it (shared with prior walks).
  int add_walk(service_walk w);
  void add_tree_edge(int u, int v) { tree_edges.emplace_back(u, v); }
  int fresh_clone() { return next_clone_++; }

  bool empty() const { return walks.empty() && tree_edges.empty(); }

  // node -> enabled VNF index, from walk markers
  std::map<int, int> enabled_vms() const;

  // distinct clone-space edges across all walks (shared prefixes collapse)
  std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> clone_edges() const;

 private:
  int next_clone_ = 0;
};

struct forest_cost_breakdown {
  double setup = 0.0;
  double connection = 0.0;
  double total = 0.0;
};

struct validation_report {
  bool ok = true;
  std::vector<std::string> violations;
  std::map<int, int> destination_roots;  // served destination -> root source
};

validation_report validate_forest(const sof_instance& inst, const service_forest& forest);
forest_cost_breakdown forest_cost(const sof_instance& inst, const service_forest& forest);

// Setup + connection cost of one standalone walk (marked VMs, every edge
// traversal, plus the root's source cost under the source-cost variant).
double walk_cost(const sof_instance& inst, const service_walk& w);

}  // namespace sof
