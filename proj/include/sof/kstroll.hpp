#pragma once

#include <string>
#include <vector>

#include "sof/metric_instance.hpp"
#include "sof/walk.hpp"

namespace sof {

struct stroll_walk {
  std::vector<int> nodes;  // distinct, from source to last VM
  double cost = 0.0;
  std::string mode;  // "exact" or "heuristic"
};

enum class kstroll_mode { exact, heuristic, auto_select };

// Minimum-cost simple path from the instance source to its last VM visiting
// exactly k distinct nodes. Exact mode is a subset DP; the heuristic is
// cheapest insertion polished with 2-opt and node swaps. auto_select uses
// the DP up to 20 metric nodes (within a work budget), else the heuristic.
stroll_walk solve_kstroll(const metric_instance& mi, int k,
                          kstroll_mode mode = kstroll_mode::auto_select);

// Lift a metric walk back into G by concatenating the provenance paths;
// VNFs first_vnf.. are placed on the intermediate metric nodes in order.
service_walk lift_walk(const metric_instance& mi, const stroll_walk& sw,
                       const sof_instance& inst, int first_vnf = 1);

}  // namespace sof
