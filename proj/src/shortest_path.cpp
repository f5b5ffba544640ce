#include "sof/shortest_path.hpp"

#include <algorithm>
#include <queue>

#include "sof/errors.hpp"

namespace sof {

namespace {

std::vector<int> build_path(const std::map<int, int>& parent, int source, int v) {
  std::vector<int> path;
  int cur = v;
  path.push_back(cur);
  while (cur != source) {
    auto it = parent.find(cur);
    if (it == parent.end()) return {};
    cur = it->second;
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<int> sp_tree::path_to(int v) const {
  if (v == source) return {source};
  if (!dist.count(v)) return {};
  return build_path(parent, source, v);
}

sp_tree dijkstra(const network& net, int source, path_metric metric) {
  if (!net.has_node(source)) throw input_error("dijkstra: unknown source " + std::to_string(source));
  sp_tree tree;
  tree.source = source;
  tree.dist[source] = 0.0;

  auto weight = [&](int u, int v, int edge_idx) {
    double w = net.edges()[edge_idx].connection_cost;
    if (metric == path_metric::connection_plus_half_setups)
      w += (net.node_cost(u) + net.node_cost(v)) / 2.0;
    return w;
  };

  using entry = std::pair<double, int>;
  std::priority_queue<entry, std::vector<entry>, std::greater<>> heap;
  heap.push({0.0, source});

  // On cost ties the lexicographically smaller node sequence wins, so a node
  // may be re-relaxed at equal distance when a smaller path is found.
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > tree.dist_to(u)) continue;
    for (const auto& e : net.neighbors(u)) {
      double nd = d + weight(u, e.to, e.edge);
      double old = tree.dist_to(e.to);
      bool improve = nd < old;
      bool tie_improve = false;
      if (!improve && nd == old) {
        auto cand = build_path(tree.parent, source, u);
        cand.push_back(e.to);
        auto cur = build_path(tree.parent, source, e.to);
        tie_improve = !cand.empty() && (cur.empty() || cand < cur);
      }
      if (improve || tie_improve) {
        tree.dist[e.to] = nd;
        tree.parent[e.to] = u;
        heap.push({nd, e.to});
      }
    }
  }
  return tree;
}

path_result shortest_path(const network& net, int u, int v, path_metric metric) {
  if (!net.has_node(u) || !net.has_node(v))
    throw input_error("shortest_path: unknown endpoint");
  if (u == v) return {0.0, {u}};
  sp_tree tree = dijkstra(net, u, metric);
  path_result r;
  r.cost = tree.dist_to(v);
  r.nodes = tree.path_to(v);
  if (r.nodes.empty()) r.cost = k_inf;
  return r;
}

path_result local_path_provider::query(int u, int v) {
  if (u == v) return {0.0, {u}};
  auto it = cache_.find(u);
  if (it == cache_.end()) it = cache_.emplace(u, dijkstra(*net_, u)).first;
  path_result r;
  r.nodes = it->second.path_to(v);
  if (r.nodes.empty()) {
    r.cost = k_inf;
    return r;
  }
  // cost re-summed along the path so every provider agrees bit for bit
  r.cost = 0.0;
  for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i)
    r.cost += net_->edge_cost(r.nodes[i], r.nodes[i + 1]);
  return r;
}

}  // namespace sof
