#pragma once

#include <map>
#include <utility>
#include <vector>

#include "sof/instance.hpp"
#include "sof/shortest_path.hpp"

namespace sof {

enum class metric_variant { plain, source_cost };

// Complete graph over {source} ∪ VMs whose edge costs fold shortest paths
// and shared setup costs of a designated last VM. Provenance keeps the
// underlying path of every metric edge for lifting walks back into G.
struct metric_instance {
  int source = -1;
  int last_vm = -1;
  metric_variant variant = metric_variant::plain;
  std::vector<int> nodes;  // sorted, source included
  std::map<std::pair<int, int>, double> costs;            // normalized (min,max)
  std::map<std::pair<int, int>, std::vector<int>> paths;  // stored min -> max

  double cost(int a, int b) const;
  std::vector<int> path(int a, int b) const;  // oriented a -> b
};

metric_instance build_metric_instance(const sof_instance& inst, int source, int last_vm,
                                      metric_variant variant = metric_variant::plain,
                                      path_provider* paths = nullptr);

// Restricted form used by the dynamic handlers: explicit VM pool and an
// anchor node standing in for the source.
metric_instance build_metric_instance_over(const network& net, const std::vector<int>& vms,
                                           int anchor, int last_vm, double anchor_setup,
                                           metric_variant variant, path_provider& paths);

// max over all triples of cost(a,c) - cost(a,b) - cost(b,c); <= tol means the
// triangle inequality holds
double triangle_violation(const metric_instance& mi);

}  // namespace sof
