#include "sof/instance.hpp"

#include <queue>

#include "sof/errors.hpp"

namespace sof {

sof_instance make_instance(network net, std::vector<int> sources,
                           std::vector<int> dests, int chain_len) {
  sof_instance inst;
  inst.net = std::move(net);
  for (int s : sources) {
    if (!inst.net.has_node(s)) throw input_error("unknown source " + std::to_string(s));
    inst.sources.insert(s);
  }
  for (int d : dests) {
    if (!inst.net.has_node(d)) throw input_error("unknown destination " + std::to_string(d));
    inst.dests.insert(d);
  }
  if (chain_len < 1) throw input_error("chain length must be >= 1");
  inst.chain_len = chain_len;
  return inst;
}

void check_feasible(const sof_instance& inst) {
  if (inst.sources.empty()) throw infeasible_error("no source");
  // BFS from all sources over the undirected graph
  std::set<int> seen(inst.sources.begin(), inst.sources.end());
  std::queue<int> q;
  for (int s : inst.sources) q.push(s);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const auto& e : inst.net.neighbors(u))
      if (seen.insert(e.to).second) q.push(e.to);
  }
  int reachable_vms = 0;
  for (int v : inst.net.vm_ids())
    if (seen.count(v)) ++reachable_vms;
  if (reachable_vms < inst.chain_len)
    throw infeasible_error("only " + std::to_string(reachable_vms) +
                           " VMs reachable, chain needs " + std::to_string(inst.chain_len));
  for (int d : inst.dests)
    if (!seen.count(d))
      throw infeasible_error("destination " + std::to_string(d) + " unreachable");
}

}  // namespace sof
