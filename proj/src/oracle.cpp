#include "sof/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "sof/errors.hpp"
#include "sof/steiner.hpp"

namespace sof {

namespace {

struct layered {
  // node (v, layer) -> dense index; virtual root is index 0
  std::vector<int> ids;          // real node ids, sorted
  std::map<int, int> pos;        // id -> index in ids
  int layers = 0;                // chain_len + 1
  int root = 0;

  int index(int node, int layer) const {
    return 1 + layer * static_cast<int>(ids.size()) + pos.at(node);
  }
  int node_of(int idx) const { return ids[(idx - 1) % ids.size()]; }
  int layer_of(int idx) const { return (idx - 1) / static_cast<int>(ids.size()); }
  int count() const { return 1 + layers * static_cast<int>(ids.size()); }
};

// enablement: vm id -> vnf index (1-based); vms absent run nothing.
// pass empty map with relax=true to open every transition arc.
digraph build_layered(const sof_instance& inst, const layered& lay,
                      const std::map<int, int>& enablement, bool relax) {
  digraph g;
  g.n = lay.count();
  g.out.resize(g.n);
  for (int s : inst.sources) g.add_arc(lay.root, lay.index(s, 0), 0.0);
  for (int layer = 0; layer < lay.layers; ++layer)
    for (const auto& e : inst.net.edges()) {
      g.add_arc(lay.index(e.u, layer), lay.index(e.v, layer), e.connection_cost);
      g.add_arc(lay.index(e.v, layer), lay.index(e.u, layer), e.connection_cost);
    }
  for (int vm : inst.net.vm_ids()) {
    double setup = inst.net.node_cost(vm);
    if (relax) {
      for (int layer = 0; layer + 1 < lay.layers; ++layer)
        g.add_arc(lay.index(vm, layer), lay.index(vm, layer + 1), setup);
    } else {
      auto it = enablement.find(vm);
      if (it == enablement.end()) continue;
      int f = it->second;  // owns the layer f-1 -> f transition
      g.add_arc(lay.index(vm, f - 1), lay.index(vm, f), setup);
    }
  }
  return g;
}

// arcs -> walks in clone space; the layered node index doubles as clone id
service_forest reconstruct(const sof_instance& inst, const layered& lay,
                           const arborescence& arb) {
  std::map<int, int> parent;
  for (const auto& [u, v] : arb.arcs) parent[v] = u;
  service_forest forest;
  for (int d : inst.dests) {
    int idx = lay.index(d, lay.layers - 1);
    std::vector<int> chain;  // dense indices from root to terminal
    int cur = idx;
    chain.push_back(cur);
    while (cur != lay.root) {
      auto it = parent.find(cur);
      if (it == parent.end()) throw input_error("oracle reconstruction broke");
      cur = it->second;
      chain.push_back(cur);
    }
    std::reverse(chain.begin(), chain.end());
    service_walk w;
    for (std::size_t i = 1; i < chain.size(); ++i) {  // skip virtual root
      int node = lay.node_of(chain[i]);
      if (!w.visits.empty() && w.visits.back().node == node) {
        // layer transition: the visit picks up the next VNF
        w.visits.back().vnf = lay.layer_of(chain[i]);
      } else {
        w.visits.push_back({node, chain[i], std::nullopt});
      }
    }
    forest.add_walk(std::move(w));
  }
  return forest;
}

bool assignment_clean(const arborescence& arb, const layered& lay,
                      std::map<int, int>& enablement_out) {
  std::map<int, std::set<int>> used;
  for (const auto& [u, v] : arb.arcs)
    if (lay.node_of(u) == lay.node_of(v)) used[lay.node_of(u)].insert(lay.layer_of(v));
  enablement_out.clear();
  for (const auto& [vm, layers] : used) {
    if (layers.size() > 1) return false;
    enablement_out[vm] = *layers.begin();
  }
  return true;
}

}  // namespace

oracle_result oracle_optimal(const sof_instance& inst, const oracle_limits& limits) {
  check_feasible(inst);
  std::vector<int> vms = inst.net.vm_ids();
  if (static_cast<int>(vms.size()) > limits.max_vms)
    throw input_error("oracle: VM count exceeds limit of " + std::to_string(limits.max_vms));
  if (inst.chain_len > limits.max_chain)
    throw input_error("oracle: chain length exceeds limit of " +
                      std::to_string(limits.max_chain));
  if (static_cast<int>(inst.dests.size()) > limits.max_dests)
    throw input_error("oracle: destination count exceeds limit of " +
                      std::to_string(limits.max_dests));
  if (inst.has_source_costs())
    throw input_error("oracle: source-cost variant not supported");

  layered lay;
  lay.ids = inst.net.node_ids();
  for (std::size_t i = 0; i < lay.ids.size(); ++i) lay.pos[lay.ids[i]] = static_cast<int>(i);
  lay.layers = inst.chain_len + 1;

  std::vector<int> terminals;
  for (int d : inst.dests) terminals.push_back(lay.index(d, lay.layers - 1));

  oracle_result result;
  if (inst.dests.empty()) {
    result.cost = forest_cost(inst, result.forest);
    result.relaxation_was_exact = true;
    return result;
  }

  // relaxation: every VM may own any single transition; if the optimum uses
  // at most one VNF per VM it is feasible, hence globally optimal
  digraph relaxed = build_layered(inst, lay, {}, true);
  arborescence best = steiner_arborescence(relaxed, lay.root, terminals);
  if (!best.feasible) throw infeasible_error("oracle: no layered route to all destinations");
  std::map<int, int> enablement;
  if (assignment_clean(best, lay, enablement)) {
    result.relaxation_was_exact = true;
    result.enablement = enablement;
    result.forest = reconstruct(inst, lay, best);
    result.cost = forest_cost(inst, result.forest);
    return result;
  }

  // enumerate enablement maps vm -> {none, f_1..f_C}
  long combos = 1;
  for (std::size_t i = 0; i < vms.size(); ++i) {
    combos *= (inst.chain_len + 1);
    if (combos > limits.max_assignments)
      throw input_error("oracle: enumeration would exceed " +
                        std::to_string(limits.max_assignments) + " assignments");
  }

  double best_cost = k_inf;
  arborescence best_arb;
  std::map<int, int> best_enablement;
  std::vector<int> assign(vms.size(), 0);  // 0 = none
  long tried = 0;
  while (true) {
    ++tried;
    std::vector<int> per_f(inst.chain_len + 1, 0);
    for (int a : assign) ++per_f[a];
    bool covers = true;
    for (int f = 1; f <= inst.chain_len; ++f)
      if (per_f[f] == 0) covers = false;
    if (covers) {
      std::map<int, int> en;
      for (std::size_t i = 0; i < vms.size(); ++i)
        if (assign[i]) en[vms[i]] = assign[i];
      digraph g = build_layered(inst, lay, en, false);
      arborescence arb = steiner_arborescence(g, lay.root, terminals);
      if (arb.feasible && arb.cost < best_cost) {
        best_cost = arb.cost;
        best_arb = arb;
        best_enablement = en;
      }
    }
    // next assignment
    std::size_t p = 0;
    while (p < assign.size()) {
      if (++assign[p] <= inst.chain_len) break;
      assign[p++] = 0;
    }
    if (p == assign.size()) break;
  }
  result.assignments_tried = tried;
  if (best_cost == k_inf) throw infeasible_error("oracle: no feasible enablement");
  result.enablement = best_enablement;
  result.forest = reconstruct(inst, lay, best_arb);
  result.cost = forest_cost(inst, result.forest);
  return result;
}

}  // namespace sof
