#include "sof/steiner.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "sof/errors.hpp"

namespace sof {

namespace {

// Kruskal over an explicit edge list, ties broken by (cost, u, v).
std::vector<std::pair<int, int>> mst_edges(const std::set<int>& nodes,
                                           std::map<std::pair<int, int>, double> weights) {
  std::vector<std::tuple<double, int, int>> sorted;
  for (const auto& [e, w] : weights) sorted.push_back({w, e.first, e.second});
  std::sort(sorted.begin(), sorted.end());
  std::map<int, int> parent;
  for (int n : nodes) parent[n] = n;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::pair<int, int>> out;
  for (const auto& [w, u, v] : sorted) {
    int ru = find(u), rv = find(v);
    if (ru == rv) continue;
    parent[ru] = rv;
    out.push_back({u, v});
  }
  return out;
}

void prune_leaves(std::vector<std::pair<int, int>>& edges, const std::set<int>& keep) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<int, int> degree;
    for (const auto& [u, v] : edges) {
      ++degree[u];
      ++degree[v];
    }
    std::vector<std::pair<int, int>> next;
    for (const auto& [u, v] : edges) {
      bool drop = (degree[u] == 1 && !keep.count(u)) || (degree[v] == 1 && !keep.count(v));
      if (drop)
        changed = true;
      else
        next.push_back({u, v});
    }
    edges.swap(next);
  }
}

steiner_result finish(const network& net, std::vector<std::pair<int, int>> edges,
                      const std::set<int>& keep, const std::string& solver) {
  prune_leaves(edges, keep);
  steiner_result r;
  r.solver = solver;
  for (auto& [u, v] : edges) {
    if (v < u) std::swap(u, v);
    r.cost += net.edge_cost(u, v);
    r.spanned.insert(u);
    r.spanned.insert(v);
  }
  std::sort(edges.begin(), edges.end());
  r.edges = std::move(edges);
  for (int k : keep) r.spanned.insert(k);
  return r;
}

}  // namespace

steiner_result steiner_approx(const network& net, int root, std::vector<int> terminals) {
  local_path_provider paths(net);
  return steiner_approx(net, root, std::move(terminals), paths);
}

steiner_result steiner_approx(const network& net, int root, std::vector<int> terminals,
                              path_provider& paths) {
  std::set<int> keep(terminals.begin(), terminals.end());
  keep.insert(root);
  if (keep.size() <= 1) return finish(net, {}, keep, "kmb");

  std::vector<int> nodes(keep.begin(), keep.end());
  std::map<std::pair<int, int>, path_result> closure;
  std::map<std::pair<int, int>, double> closure_cost;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      auto pr = paths.query(nodes[i], nodes[j]);
      if (!pr.reachable())
        throw infeasible_error("terminal " + std::to_string(nodes[j]) +
                               " unreachable from " + std::to_string(nodes[i]));
      closure_cost[{nodes[i], nodes[j]}] = pr.cost;
      closure[{nodes[i], nodes[j]}] = std::move(pr);
    }

  auto closure_mst = mst_edges(keep, closure_cost);

  // expand closure edges, then MST of the expansion to drop duplicates
  std::set<std::pair<int, int>> expanded;
  std::set<int> expanded_nodes;
  for (auto [u, v] : closure_mst) {
    if (v < u) std::swap(u, v);
    const auto& path = closure.at({u, v}).nodes;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      int a = path[i], b = path[i + 1];
      if (b < a) std::swap(a, b);
      expanded.insert({a, b});
      expanded_nodes.insert(a);
      expanded_nodes.insert(b);
    }
  }
  std::map<std::pair<int, int>, double> weights;
  for (const auto& e : expanded) weights[e] = net.edge_cost(e.first, e.second);
  auto tree = mst_edges(expanded_nodes, weights);
  return finish(net, tree, keep, "kmb");
}

arborescence steiner_arborescence(const digraph& g, int root,
                                  const std::vector<int>& terminals) {
  arborescence result;
  if (terminals.empty()) {
    result.feasible = true;
    return result;
  }
  int t = static_cast<int>(terminals.size());
  if (t > 12) throw input_error("steiner_arborescence: more than 12 terminals");

  // all-pairs distances plus parents for path reconstruction
  int n = g.n;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, k_inf));
  std::vector<std::vector<int>> par(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    auto& d = dist[s];
    auto& p = par[s];
    d[s] = 0.0;
    using entry = std::pair<double, int>;
    std::priority_queue<entry, std::vector<entry>, std::greater<>> heap;
    heap.push({0.0, s});
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (const auto& [v, w] : g.out[u]) {
        double nd = du + w;
        if (nd < d[v] || (nd == d[v] && p[v] > u)) {
          d[v] = nd;
          p[v] = u;
          heap.push({nd, v});
        }
      }
    }
  }

  int full = (1 << t) - 1;
  // dp[X][v]: best arborescence rooted at v spanning terminal set X
  std::vector<std::vector<double>> dp(full + 1, std::vector<double>(n, k_inf));
  std::vector<std::vector<int>> via(full + 1, std::vector<int>(n, -1));
  std::vector<std::vector<int>> split(full + 1, std::vector<int>(n, 0));

  for (int i = 0; i < t; ++i)
    for (int v = 0; v < n; ++v) {
      dp[1 << i][v] = dist[v][terminals[i]];
      via[1 << i][v] = terminals[i];
    }

  std::vector<double> merged(n);
  std::vector<int> merged_split(n);
  for (int X = 1; X <= full; ++X) {
    if ((X & (X - 1)) == 0) continue;  // singletons done
    int low = X & (-X);
    for (int v = 0; v < n; ++v) {
      merged[v] = k_inf;
      merged_split[v] = 0;
    }
    for (int Y = (X - 1) & X; Y; Y = (Y - 1) & X) {
      if (!(Y & low)) continue;  // enumerate each split once
      int Z = X ^ Y;
      for (int v = 0; v < n; ++v) {
        double c = dp[Y][v] + dp[Z][v];
        if (c < merged[v]) {
          merged[v] = c;
          merged_split[v] = Y;
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      for (int u = 0; u < n; ++u) {
        if (merged[u] == k_inf || dist[v][u] == k_inf) continue;
        double c = dist[v][u] + merged[u];
        if (c < dp[X][v]) {
          dp[X][v] = c;
          via[X][v] = u;
          split[X][v] = merged_split[u];
        }
      }
    }
  }

  if (dp[full][root] == k_inf) return result;  // infeasible

  std::set<std::pair<int, int>> arcs;
  auto add_path = [&](int from, int to) {
    while (to != from) {
      int p = par[from][to];
      arcs.insert({p, to});
      to = p;
    }
  };
  // expand the dp decisions; shared arcs collapse in the set
  std::vector<std::pair<int, int>> stack{{full, root}};
  while (!stack.empty()) {
    auto [X, v] = stack.back();
    stack.pop_back();
    if ((X & (X - 1)) == 0) {
      add_path(v, via[X][v]);
      continue;
    }
    int u = via[X][v];
    add_path(v, u);
    int Y = split[X][v];
    stack.push_back({Y, u});
    stack.push_back({X ^ Y, u});
  }

  result.feasible = true;
  result.arcs.assign(arcs.begin(), arcs.end());
  std::map<std::pair<int, int>, double> arc_cost;
  for (int u = 0; u < n; ++u)
    for (const auto& [v, w] : g.out[u]) {
      auto it = arc_cost.find({u, v});
      if (it == arc_cost.end() || w < it->second) arc_cost[{u, v}] = w;
    }
  for (const auto& a : result.arcs) result.cost += arc_cost.at(a);
  return result;
}

steiner_result steiner_exact(const network& net, int root, std::vector<int> terminals) {
  std::set<int> keep(terminals.begin(), terminals.end());
  keep.insert(root);
  if (keep.size() <= 1) {
    steiner_result r;
    r.solver = "exact";
    r.spanned = keep;
    return r;
  }
  if (keep.size() - 1 > 12)
    throw input_error("steiner_exact supports at most 12 terminals; use steiner_approx");

  // map node ids to dense indices, symmetric arcs
  std::vector<int> ids = net.node_ids();
  std::map<int, int> pos;
  for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = static_cast<int>(i);
  digraph g;
  g.n = static_cast<int>(ids.size());
  g.out.resize(g.n);
  for (const auto& e : net.edges()) {
    g.add_arc(pos[e.u], pos[e.v], e.connection_cost);
    g.add_arc(pos[e.v], pos[e.u], e.connection_cost);
  }
  std::vector<int> terms;
  for (int k : keep)
    if (k != root) terms.push_back(pos[k]);
  auto arb = steiner_arborescence(g, pos[root], terms);
  if (!arb.feasible) {
    for (int k : keep)
      if (k != root && !shortest_path(net, root, k).reachable())
        throw infeasible_error("terminal " + std::to_string(k) + " unreachable");
    throw infeasible_error("steiner_exact: no feasible tree");
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& [u, v] : arb.arcs) {
    int a = ids[u], b = ids[v];
    if (b < a) std::swap(a, b);
    edges.push_back({a, b});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return finish(net, std::move(edges), keep, "exact");
}

}  // namespace sof
