#pragma once

#include <map>
#include <string>
#include <vector>

#include "sof/forest.hpp"
#include "sof/instance.hpp"

namespace sof {

struct deployment_event {
  std::string kind;
  std::string detail;
};

// Deployed forest plus load ledger; events mutate the forest in place while
// keeping it valid. Loads are ambient network loads plus demand times usage.
class deployment_state {
 public:
  deployment_state(sof_instance inst, double demand_per_request);

  const sof_instance& instance() const { return inst_; }
  const service_forest& forest() const { return forest_; }
  service_forest& forest_mutable() { return forest_; }
  const std::vector<deployment_event>& log() const { return log_; }
  double demand() const { return demand_; }

  // demand-induced loads (ambient excluded)
  const std::map<std::pair<int, int>, double>& deployed_edge_loads() const {
    return edge_loads_;
  }
  const std::map<int, double>& deployed_vm_loads() const { return vm_loads_; }

  void deploy(service_forest f);

  // recompute every edge/VM cost from its current load and capacity
  network refreshed_costs() const;
  void apply_refresh();

  void handle_leave(int dest);
  void handle_join(int node);
  void handle_vnf_delete(int j);
  void handle_vnf_insert(int j);
  void handle_congest_edge(int u, int v, double new_load);
  void handle_congest_vm(int v, double new_load);

 private:
  void recompute_loads();
  void note(const std::string& kind, const std::string& detail);
  // chain edits can strand destinations downstream of the change; they are
  // re-attached through the join machinery (make-before-break)
  void rejoin_unserved();
  void vnf_insert_impl(int j);
  void congest_vm_impl(int v, double new_load);

  sof_instance inst_;
  service_forest forest_;
  double demand_;
  std::map<std::pair<int, int>, double> edge_loads_;
  std::map<int, double> vm_loads_;
  std::vector<deployment_event> log_;
};

}  // namespace sof
