#include "sof/metric_instance.hpp"

#include <algorithm>
#include <cassert>

#include "sof/errors.hpp"

namespace sof {

double metric_instance::cost(int a, int b) const {
  auto it = costs.find({std::min(a, b), std::max(a, b)});
  if (it == costs.end()) throw input_error("metric edge missing");
  return it->second;
}

std::vector<int> metric_instance::path(int a, int b) const {
  auto it = paths.find({std::min(a, b), std::max(a, b)});
  if (it == paths.end()) throw input_error("metric edge missing");
  std::vector<int> p = it->second;
  if (a > b) std::reverse(p.begin(), p.end());
  return p;
}

metric_instance build_metric_instance_over(const network& net, const std::vector<int>& vms,
                                           int anchor, int last_vm, double anchor_setup,
                                           metric_variant variant, path_provider& paths) {
  metric_instance mi;
  mi.source = anchor;
  mi.last_vm = last_vm;
  mi.variant = variant;
  mi.nodes = vms;
  if (std::find(mi.nodes.begin(), mi.nodes.end(), anchor) == mi.nodes.end())
    mi.nodes.push_back(anchor);
  std::sort(mi.nodes.begin(), mi.nodes.end());
  mi.nodes.erase(std::unique(mi.nodes.begin(), mi.nodes.end()), mi.nodes.end());
  if (std::find(mi.nodes.begin(), mi.nodes.end(), last_vm) == mi.nodes.end())
    throw input_error("last VM " + std::to_string(last_vm) + " not in the VM set");

  double cu = net.node_cost(last_vm);
  double cs = anchor_setup;
  auto setup_share = [&](int v1, int v2) {
    const int s = anchor, u = last_vm;
    if (variant == metric_variant::plain) {
      if (v1 == s) return (cu + net.node_cost(v2)) / 2.0;
      if (v2 == s) return (net.node_cost(v1) + cu) / 2.0;
      return (net.node_cost(v1) + net.node_cost(v2)) / 2.0;
    }
    // source-cost table: both walk ends carry (c(s)+c(u))/2, the direct
    // s-u edge carries the full c(s)+c(u)
    if ((v1 == s && v2 == u) || (v1 == u && v2 == s)) return cs + cu;
    if ((v1 == s && v2 != u) || (v1 == u && v2 != s))
      return (cs + cu + net.node_cost(v2)) / 2.0;
    if ((v1 != s && v2 == u) || (v1 != u && v2 == s))
      return (net.node_cost(v1) + cs + cu) / 2.0;
    return (net.node_cost(v1) + net.node_cost(v2)) / 2.0;
  };

  for (std::size_t i = 0; i < mi.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < mi.nodes.size(); ++j) {
      int a = mi.nodes[i], b = mi.nodes[j];
      auto pr = paths.query(a, b);
      if (!pr.reachable())
        throw infeasible_error("VM " + std::to_string(b) + " unreachable from " +
                               std::to_string(a));
      mi.costs[{a, b}] = pr.cost + setup_share(a, b);
      mi.paths[{a, b}] = std::move(pr.nodes);
    }
  assert(triangle_violation(mi) <= 1e-9);
  return mi;
}

metric_instance build_metric_instance(const sof_instance& inst, int source, int last_vm,
                                      metric_variant variant, path_provider* paths) {
  if (!inst.net.has_node(source)) throw input_error("unknown source");
  if (inst.net.node(last_vm).role != node_role::vm)
    throw input_error("last VM " + std::to_string(last_vm) + " is not a VM");
  local_path_provider local(inst.net);
  path_provider& pp = paths ? *paths : static_cast<path_provider&>(local);
  return build_metric_instance_over(inst.net, inst.net.vm_ids(), source, last_vm,
                                    inst.source_cost(source), variant, pp);
}

double triangle_violation(const metric_instance& mi) {
  double worst = -k_inf;
  for (int a : mi.nodes)
    for (int b : mi.nodes) {
      if (b == a) continue;
      for (int c : mi.nodes) {
        if (c == a || c == b) continue;
        worst = std::max(worst, mi.cost(a, c) - mi.cost(a, b) - mi.cost(b, c));
      }
    }
  return worst == -k_inf ? 0.0 : worst;
}

}  // namespace sof
