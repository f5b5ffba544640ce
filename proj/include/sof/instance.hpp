#pragma once

#include <map>
#include <set>
#include <vector>

#include "sof/network.hpp"

namespace sof {

// A service overlay forest problem: network, sources S, destinations D and
// the length of the VNF chain (labels f_1..f_k are implicit by index).
// source_setup_costs activates the source-cost variant; absent by default.
struct sof_instance {
  network net;
  std::set<int> sources;
  std::set<int> dests;
  int chain_len = 1;
  std::map<int, double> source_setup_costs;

  double source_cost(int s) const {
    auto it = source_setup_costs.find(s);
    return it == source_setup_costs.end() ? 0.0 : it->second;
  }
  bool has_source_costs() const { return !source_setup_costs.empty(); }
};

sof_instance make_instance(network net, std::vector<int> sources,
                           std::vector<int> dests, int chain_len);

// Cheap feasibility screen: at least one source, >= chain_len VMs reachable
// from some source, every destination reachable. Throws infeasible_error.
void check_feasible(const sof_instance& inst);

}  // namespace sof
