#include "sof/forest.hpp"

#include <algorithm>
#include <queue>

#include "sof/errors.hpp"

namespace sof {

service_walk walk_from_nodes(const std::vector<int>& nodes) {
  service_walk w;
  w.visits.reserve(nodes.size());
  for (int n : nodes) w.visits.push_back({n, -1, std::nullopt});
  return w;
}

int service_forest::add_walk(service_walk w) {
  for (auto& v : w.visits)
    if (v.clone < 0) v.clone = fresh_clone();
  // keep the clone counter ahead of externally assigned ids
  for (const auto& v : w.visits)
    if (v.clone >= next_clone_) next_clone_ = v.clone + 1;
  walks.push_back(std::move(w));
  return static_cast<int>(walks.size()) - 1;
}

std::map<int, int> service_forest::enabled_vms() const {
  std::map<int, int> out;
  for (const auto& w : walks)
    for (const auto& v : w.visits)
      if (v.vnf) out[v.node] = *v.vnf;
  return out;
}

std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>>
service_forest::clone_edges() const {
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> seen;
  for (const auto& w : walks) {
    for (std::size_t i = 0; i + 1 < w.visits.size(); ++i) {
      std::pair<int, int> a{w.visits[i].node, w.visits[i].clone};
      std::pair<int, int> b{w.visits[i + 1].node, w.visits[i + 1].clone};
      if (b < a) std::swap(a, b);
      seen.insert({a, b});
    }
  }
  return {seen.begin(), seen.end()};
}

validation_report validate_forest(const sof_instance& inst, const service_forest& forest) {
  validation_report rep;
  auto violate = [&](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };

  const network& net = inst.net;
  for (std::size_t wi = 0; wi < forest.walks.size(); ++wi) {
    const auto& w = forest.walks[wi];
    if (w.empty()) {
      violate("walk " + std::to_string(wi) + " is empty");
      continue;
    }
    bool structural_ok = true;
    for (const auto& v : w.visits)
      if (!net.has_node(v.node)) {
        violate("walk " + std::to_string(wi) + " references unknown node " +
                std::to_string(v.node));
        structural_ok = false;
      }
    if (!structural_ok) continue;
    for (std::size_t i = 0; i + 1 < w.visits.size(); ++i)
      if (!net.has_edge(w.visits[i].node, w.visits[i + 1].node))
        violate("walk " + std::to_string(wi) + " uses missing edge " +
                std::to_string(w.visits[i].node) + "-" + std::to_string(w.visits[i + 1].node));
    if (!inst.sources.count(w.source()))
      violate("walk " + std::to_string(wi) + " roots at non-source " +
              std::to_string(w.source()));
    int last_vnf = 0;
    std::set<int> marked_nodes;
    for (const auto& v : w.visits) {
      if (!v.vnf) continue;
      if (*v.vnf < 1 || *v.vnf > inst.chain_len)
        violate("walk " + std::to_string(wi) + " marks out-of-range VNF " +
                std::to_string(*v.vnf));
      else if (*v.vnf <= last_vnf)
        violate("walk " + std::to_string(wi) + " VNF order broken at f_" +
                std::to_string(*v.vnf));
      last_vnf = std::max(last_vnf, v.vnf ? *v.vnf : 0);
      if (!marked_nodes.insert(v.node).second)
        violate("walk " + std::to_string(wi) + " marks node " + std::to_string(v.node) +
                " twice");
      if (net.node(v.node).role != node_role::vm)
        violate("VNF on non-VM node " + std::to_string(v.node));
    }
  }
  for (const auto& [u, v] : forest.tree_edges)
    if (!net.has_node(u) || !net.has_node(v) || !net.has_edge(u, v))
      violate("tree edge " + std::to_string(u) + "-" + std::to_string(v) + " not in network");

  // one VNF per physical VM across the whole forest
  std::map<int, std::set<int>> node_vnfs;
  for (const auto& w : forest.walks)
    for (const auto& v : w.visits)
      if (v.vnf) node_vnfs[v.node].insert(*v.vnf);
  for (const auto& [node, fs] : node_vnfs)
    if (fs.size() > 1) violate("VNF conflict at " + std::to_string(node));

  if (!rep.ok) return rep;

  // per-destination chain walk: a complete walk whose post-chain region
  // reaches the destination through the tree edges
  std::map<int, std::vector<int>> tree_adj;
  for (const auto& [u, v] : forest.tree_edges) {
    tree_adj[u].push_back(v);
    tree_adj[v].push_back(u);
  }
  for (auto& [_, lst] : tree_adj) std::sort(lst.begin(), lst.end());

  auto post_chain_nodes = [&](const service_walk& w) -> std::vector<int> {
    std::vector<int> out;
    if (inst.chain_len == 0) {
      for (const auto& v : w.visits) out.push_back(v.node);
      return out;
    }
    int pos = -1;
    for (std::size_t i = 0; i < w.visits.size(); ++i)
      if (w.visits[i].vnf && *w.visits[i].vnf == inst.chain_len) pos = static_cast<int>(i);
    if (pos < 0) return out;  // incomplete walk serves nobody
    for (std::size_t i = pos; i < w.visits.size(); ++i) out.push_back(w.visits[i].node);
    return out;
  };
  auto walk_complete = [&](const service_walk& w) {
    if (inst.chain_len == 0) return true;
    std::set<int> seen;
    for (const auto& v : w.visits)
      if (v.vnf) seen.insert(*v.vnf);
    for (int f = 1; f <= inst.chain_len; ++f)
      if (!seen.count(f)) return false;
    return true;
  };

  for (int d : inst.dests) {
    bool served = false;
    for (std::size_t wi = 0; wi < forest.walks.size() && !served; ++wi) {
      const auto& w = forest.walks[wi];
      if (!walk_complete(w)) continue;
      auto seeds = post_chain_nodes(w);
      std::set<int> reach(seeds.begin(), seeds.end());
      std::queue<int> q;
      for (int s : seeds) q.push(s);
      while (!q.empty() && !reach.count(d)) {
        int u = q.front();
        q.pop();
        auto it = tree_adj.find(u);
        if (it == tree_adj.end()) continue;
        for (int nb : it->second)
          if (reach.insert(nb).second) q.push(nb);
      }
      if (reach.count(d)) {
        served = true;
        rep.destination_roots[d] = w.source();
      }
    }
    if (!served) violate("destination " + std::to_string(d) + " has no chain walk");
  }
  return rep;
}

forest_cost_breakdown forest_cost(const sof_instance& inst, const service_forest& forest) {
  forest_cost_breakdown out;
  for (const auto& [node, _] : forest.enabled_vms())
    out.setup += inst.net.node_cost(node);
  if (inst.has_source_costs()) {
    std::set<int> roots;
    for (const auto& w : forest.walks)
      if (!w.empty()) roots.insert(w.source());
    for (int r : roots) out.setup += inst.source_cost(r);
  }
  for (const auto& [a, b] : forest.clone_edges())
    out.connection += inst.net.edge_cost(a.first, b.first);
  for (const auto& [u, v] : forest.tree_edges) out.connection += inst.net.edge_cost(u, v);
  out.total = out.setup + out.connection;
  return out;
}

double walk_cost(const sof_instance& inst, const service_walk& w) {
  double cost = 0.0;
  for (std::size_t i = 0; i + 1 < w.visits.size(); ++i)
    cost += inst.net.edge_cost(w.visits[i].node, w.visits[i + 1].node);
  for (const auto& v : w.visits)
    if (v.vnf) cost += inst.net.node_cost(v.node);
  if (inst.has_source_costs() && !w.empty()) cost += inst.source_cost(w.source());
  return cost;
}

}  // namespace sof
