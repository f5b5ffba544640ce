#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sof/forest.hpp"
#include "sof/instance.hpp"
#include "sof/kstroll.hpp"
#include "sof/shortest_path.hpp"

namespace sof {

// Candidate service chain between a source and a last VM, one per virtual
// edge of the auxiliary Steiner instance.
struct aux_edge {
  int source = -1;
  int last_vm = -1;
  double cost = 0.0;
  stroll_walk stroll;
  service_walk lifted;
};

// Auxiliary graph: the input network plus a virtual source, duplicates of
// sources and VMs, zero-cost hookup edges and one virtual edge per
// candidate chain. Duplicates live above the real id range.
struct aux_graph {
  int virtual_source = -1;
  std::map<int, int> source_dup;  // source id -> duplicate id
  std::map<int, int> vm_dup;      // vm id -> duplicate id
  std::map<std::pair<int, int>, aux_edge> virtual_edges;  // (source, vm)
  std::vector<std::string> warnings;  // omitted infeasible pairs
  std::size_t real_edge_count = 0;

  std::size_t edge_count() const {
    return real_edge_count + source_dup.size() + virtual_edges.size() + vm_dup.size();
  }
};

aux_graph build_aux_graph(const sof_instance& inst, path_provider* paths = nullptr,
                          kstroll_mode mode = kstroll_mode::auto_select);

struct conflict_event {
  int resident_walk = -1;
  int vm = -1;
  int resident_vnf = -1;  // f_i
  int incoming_vnf = -1;  // f_j
  std::string resolution;  // attach_incoming_via_u | attach_incoming_via_w | attach_resident_via_u
  std::optional<int> aux_vm;  // w, for the second case
};

struct conflict_report {
  std::vector<conflict_event> events;
};

// Adds a walk to the forest, eliminating VNF conflicts one by one while
// backtracking the incoming walk. Never increases forest cost and never
// enables a VM that was not enabled before.
conflict_report resolve_conflicts(service_forest& forest, service_walk incoming,
                                  const sof_instance& inst);
conflict_report resolve_conflicts(service_forest& forest, service_walk incoming,
                                  const sof_instance& inst, path_provider& paths);

struct sofda_result {
  service_forest forest;
  forest_cost_breakdown cost;
  conflict_report conflicts;
  std::map<std::string, std::string> metadata;
};

// Single-source two-phase algorithm: per candidate last VM, k-stroll chain
// plus a Steiner tree over the destinations; cheapest candidate wins.
sofda_result sofda_ss(const sof_instance& inst, int source,
                      kstroll_mode mode = kstroll_mode::auto_select,
                      path_provider* paths = nullptr);

// General multi-source algorithm over the auxiliary Steiner instance.
sofda_result sofda(const sof_instance& inst,
                   kstroll_mode mode = kstroll_mode::auto_select,
                   path_provider* paths = nullptr);

}  // namespace sof
