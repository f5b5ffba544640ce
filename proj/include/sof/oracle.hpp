#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sof/forest.hpp"
#include "sof/instance.hpp"

namespace sof {

// Enumeration guards; the oracle refuses anything larger.
struct oracle_limits {
  int max_vms = 8;
  int max_chain = 3;
  int max_dests = 4;
  long max_assignments = 300000;
};

struct oracle_result {
  service_forest forest;
  forest_cost_breakdown cost;
  std::map<int, int> enablement;  // vm -> vnf index actually used
  bool relaxation_was_exact = false;
  long assignments_tried = 0;
};

// Ground truth by exhaustive search over VNF enablements on a layered copy
// of the network: layer i carries data already processed by f_1..f_i, and a
// VM enabled for f_{i+1} owns the only arcs from layer i to i+1. A first
// pass leaves every enablement open; if the resulting arborescence uses at
// most one VNF per VM it is already optimal, otherwise all enablement maps
// are enumerated.
oracle_result oracle_optimal(const sof_instance& inst, const oracle_limits& limits = {});

}  // namespace sof
