#include "sof/sofda.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "sof/errors.hpp"
#include "sof/steiner.hpp"
#include "sof/walk_edit.hpp"

namespace sof {

namespace {

// ---------------------------------------------------------------- skeleton
// Tiny explicit graph for shortest paths over the auxiliary structure.
// Real-to-real hops are collapsed provider distances, so a skeleton path is
// exact for the full auxiliary graph.
struct skeleton_graph {
  std::map<int, std::vector<std::pair<int, double>>> adj;

  void add(int a, int b, double w) {
    adj[a].push_back({b, w});
    adj[b].push_back({a, w});
  }
  void sort_adj() {
    for (auto& [_, lst] : adj) std::sort(lst.begin(), lst.end());
  }

  path_result shortest(int a, int b) const {
    if (a == b) return {0.0, {a}};
    std::map<int, double> dist;
    std::map<int, int> parent;
    dist[a] = 0.0;
    auto path_of = [&](int v) {
      std::vector<int> p{v};
      while (v != a) {
        auto it = parent.find(v);
        if (it == parent.end()) return std::vector<int>{};
        v = it->second;
        p.push_back(v);
      }
      std::reverse(p.begin(), p.end());
      return p;
    };
    using entry = std::pair<double, int>;
    std::priority_queue<entry, std::vector<entry>, std::greater<>> heap;
    heap.push({0.0, a});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      auto du = dist.find(u);
      if (du == dist.end() || d > du->second) continue;
      auto it = adj.find(u);
      if (it == adj.end()) continue;
      for (const auto& [v, w] : it->second) {
        double nd = d + w;
        auto dv = dist.find(v);
        bool improve = dv == dist.end() || nd < dv->second;
        bool tie = false;
        if (!improve && nd == dv->second) {
          auto cand = path_of(u);
          cand.push_back(v);
          auto cur = path_of(v);
          tie = !cand.empty() && (cur.empty() || cand < cur);
        }
        if (improve || tie) {
          dist[v] = nd;
          parent[v] = u;
          heap.push({nd, v});
        }
      }
    }
    path_result r;
    auto it = dist.find(b);
    if (it == dist.end()) return r;
    r.cost = it->second;
    r.nodes = path_of(b);
    return r;
  }
};

std::vector<std::pair<int, int>> kruskal(const std::set<int>& nodes,
                                         std::map<std::pair<int, int>, double> weights) {
  std::vector<std::tuple<double, int, int>> sorted;
  for (const auto& [e, w] : weights) sorted.push_back({w, e.first, e.second});
  std::sort(sorted.begin(), sorted.end());
  std::map<int, int> up;
  for (int n : nodes) up[n] = n;
  std::function<int(int)> find = [&](int x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  std::vector<std::pair<int, int>> out;
  for (const auto& [w, u, v] : sorted) {
    int ru = find(u), rv = find(v);
    if (ru == rv) continue;
    up[ru] = rv;
    out.push_back({u, v});
  }
  return out;
}

}  // namespace

// -------------------------------------------------------------- aux graph

aux_graph build_aux_graph(const sof_instance& inst, path_provider* paths, kstroll_mode mode) {
  check_feasible(inst);
  local_path_provider local(inst.net);
  path_provider& pp = paths ? *paths : static_cast<path_provider&>(local);

  aux_graph aux;
  aux.real_edge_count = inst.net.edge_count();
  int next_id = inst.net.node_ids().empty() ? 0 : inst.net.node_ids().back() + 1;
  aux.virtual_source = next_id++;
  for (int s : inst.sources) aux.source_dup[s] = next_id++;
  for (int m : inst.net.vm_ids()) aux.vm_dup[m] = next_id++;

  metric_variant variant =
      inst.has_source_costs() ? metric_variant::source_cost : metric_variant::plain;
  for (int s : inst.sources) {
    for (int u : inst.net.vm_ids()) {
      try {
        metric_instance mi = build_metric_instance(inst, s, u, variant, &pp);
        stroll_walk sw = solve_kstroll(mi, inst.chain_len + 1, mode);
        aux_edge e;
        e.source = s;
        e.last_vm = u;
        e.stroll = sw;
        e.lifted = lift_walk(mi, sw, inst);
        e.cost = walk_cost(inst, e.lifted);
        aux.virtual_edges[{s, u}] = std::move(e);
      } catch (const infeasible_error& err) {
        aux.warnings.push_back("pair (" + std::to_string(s) + "," + std::to_string(u) +
                               ") omitted: " + err.what());
      }
    }
  }
  return aux;
}

// ---------------------------------------------------- conflict resolution

namespace {

struct marked_visit {
  std::size_t walk;
  std::size_t pos;
  int node;
  int vnf;
};

std::vector<marked_visit> collect_marks(const service_forest& forest) {
  std::vector<marked_visit> out;
  for (std::size_t wi = 0; wi < forest.walks.size(); ++wi) {
    const auto& w = forest.walks[wi];
    for (std::size_t p = 0; p < w.visits.size(); ++p)
      if (w.visits[p].vnf) out.push_back({wi, p, w.visits[p].node, *w.visits[p].vnf});
  }
  return out;
}

}  // namespace

namespace {

void resolve_one(service_forest& forest, service_walk incoming, const sof_instance& inst,
                 path_provider& paths, conflict_report& report) {
  for (auto& v : incoming.visits)
    if (v.clone < 0) v.clone = forest.fresh_clone();

  std::size_t guard = 0;
  const std::size_t cap = 8 + (forest.walks.size() + 2) * (inst.chain_len + 2);
  while (true) {
    if (++guard > cap) throw input_error("conflict resolution did not converge");
    auto marks = collect_marks(forest);
    std::map<int, std::vector<marked_visit>> by_node;
    for (const auto& m : marks) by_node[m.node].push_back(m);

    // first conflict backtracking the incoming walk
    int pos_u = -1, j = -1;
    std::size_t resident = 0;
    std::size_t resident_pos = 0;
    int i = -1;
    for (int p = static_cast<int>(incoming.visits.size()) - 1; p >= 0 && pos_u < 0; --p) {
      const auto& vis = incoming.visits[p];
      if (!vis.vnf) continue;
      auto it = by_node.find(vis.node);
      if (it == by_node.end()) continue;
      for (const auto& m : it->second) {
        if (m.vnf == *vis.vnf) continue;
        // same physical clone cannot carry two different VNFs; different
        // clone with a different VNF is the conflict
        pos_u = p;
        j = *vis.vnf;
        resident = m.walk;
        resident_pos = m.pos;
        i = m.vnf;
        break;
      }
    }
    if (pos_u < 0) break;

    const service_walk& wk = forest.walks[resident];
    conflict_event ev;
    ev.resident_walk = static_cast<int>(resident);
    ev.vm = incoming.visits[pos_u].node;
    ev.resident_vnf = i;
    ev.incoming_vnf = j;

    if (j <= i) {
      service_walk merged = detail::splice_walks(wk, resident_pos, incoming, pos_u, i);
      auto shared = detail::clones_used_elsewhere(forest, nullptr, nullptr);
      detail::shorten_walk(merged, resident_pos, inst, paths, forest, shared);
      incoming = std::move(merged);
      ev.resolution = "attach_incoming_via_u";
    } else {
      // look for w on the incoming walk where the resident runs f_h, h >= j;
      // take the maximal h to minimize the duplicated suffix
      int best_h = -1;
      int pos_w = -1;
      std::size_t resident_w_pos = 0;
      for (int p = 0; p < static_cast<int>(incoming.visits.size()); ++p) {
        const auto& vis = incoming.visits[p];
        if (!vis.vnf || p == pos_u) continue;
        auto it = by_node.find(vis.node);
        if (it == by_node.end()) continue;
        for (const auto& m : it->second) {
          if (m.walk != resident || m.vnf == *vis.vnf) continue;
          if (m.vnf >= j && m.vnf > best_h) {
            best_h = m.vnf;
            pos_w = p;
            resident_w_pos = m.pos;
          }
        }
      }
      if (best_h >= 0) {
        service_walk merged = detail::splice_walks(wk, resident_w_pos, incoming,
                                           static_cast<std::size_t>(pos_w), best_h);
        auto shared = detail::clones_used_elsewhere(forest, nullptr, nullptr);
        detail::shorten_walk(merged, resident_w_pos, inst, paths, forest, shared);
        ev.aux_vm = incoming.visits[pos_w].node;
        incoming = std::move(merged);
        ev.resolution = "attach_incoming_via_w";
      } else {
        // attach the resident to the incoming walk through u
        service_walk rebuilt = detail::splice_walks(incoming, static_cast<std::size_t>(pos_u), wk,
                                            resident_pos, j);
        auto shared = detail::clones_used_elsewhere(forest, &forest.walks[resident], &incoming);
        detail::shorten_walk(rebuilt, static_cast<std::size_t>(pos_u), inst, paths, forest, shared);
        forest.walks[resident] = std::move(rebuilt);
        ev.resolution = "attach_resident_via_u";
      }
    }
    report.events.push_back(ev);
  }
  forest.add_walk(std::move(incoming));
}

}  // namespace

conflict_report resolve_conflicts(service_forest& forest, service_walk incoming,
                                  const sof_instance& inst, path_provider& paths) {
  conflict_report report;
  resolve_one(forest, std::move(incoming), inst, paths, report);

  // A resident rebuilt by the third case inherits the incoming prefix, which
  // can surface a conflict between two residents. Sweep until clean.
  std::size_t guard = 0;
  while (true) {
    if (++guard > 16 + forest.walks.size() * forest.walks.size() *
                           static_cast<std::size_t>(inst.chain_len + 1))
      throw input_error("conflict sweep did not converge");
    std::map<int, std::set<int>> node_vnfs;
    for (const auto& w : forest.walks)
      for (const auto& v : w.visits)
        if (v.vnf) node_vnfs[v.node].insert(*v.vnf);
    int bad_node = -1;
    for (const auto& [node, fs] : node_vnfs)
      if (fs.size() > 1) {
        bad_node = node;
        break;
      }
    if (bad_node < 0) break;
    std::size_t culprit = 0;
    for (std::size_t wi = 0; wi < forest.walks.size(); ++wi)
      for (const auto& v : forest.walks[wi].visits)
        if (v.vnf && v.node == bad_node) culprit = wi;
    service_walk extracted = std::move(forest.walks[culprit]);
    forest.walks.erase(forest.walks.begin() + static_cast<long>(culprit));
    resolve_one(forest, std::move(extracted), inst, paths, report);
  }
  return report;
}

conflict_report resolve_conflicts(service_forest& forest, service_walk incoming,
                                  const sof_instance& inst) {
  local_path_provider paths(inst.net);
  return resolve_conflicts(forest, std::move(incoming), inst, paths);
}

// ---------------------------------------------------------------- SOFDA-SS

sofda_result sofda_ss(const sof_instance& inst, int source, kstroll_mode mode,
                      path_provider* paths) {
  check_feasible(inst);
  if (!inst.net.has_node(source)) throw input_error("unknown source");
  std::vector<int> vms = inst.net.vm_ids();
  if (static_cast<int>(vms.size()) < inst.chain_len)
    throw infeasible_error("chain longer than VM count");

  local_path_provider local(inst.net);
  path_provider& pp = paths ? *paths : static_cast<path_provider&>(local);
  metric_variant variant =
      inst.has_source_costs() ? metric_variant::source_cost : metric_variant::plain;
  std::vector<int> dests(inst.dests.begin(), inst.dests.end());

  double best = k_inf;
  service_walk best_walk;
  steiner_result best_tree;
  int best_u = -1;
  std::string stroll_mode;
  for (int u : vms) {
    try {
      metric_instance mi = build_metric_instance(inst, source, u, variant, &pp);
      stroll_walk sw = solve_kstroll(mi, inst.chain_len + 1, mode);
      service_walk walk = lift_walk(mi, sw, inst);
      steiner_result tree = steiner_approx(inst.net, u, dests, pp);
      double total = walk_cost(inst, walk) + tree.cost;
      if (total < best) {
        best = total;
        best_walk = std::move(walk);
        best_tree = std::move(tree);
        best_u = u;
        stroll_mode = sw.mode;
      }
    } catch (const infeasible_error&) {
      continue;  // candidate last VM not usable
    }
  }
  if (best_u < 0) throw infeasible_error("no feasible last VM candidate");

  sofda_result result;
  result.forest.add_walk(std::move(best_walk));
  for (const auto& [u, v] : best_tree.edges) result.forest.add_tree_edge(u, v);
  result.cost = forest_cost(inst, result.forest);
  result.metadata["algorithm"] = "sofda-ss";
  result.metadata["last_vm"] = std::to_string(best_u);
  result.metadata["kstroll_mode"] = stroll_mode;
  return result;
}

// ------------------------------------------------------------------- SOFDA

namespace {

struct aux_steiner {
  std::vector<std::pair<int, int>> real_edges;      // G edges of the tree
  std::vector<std::pair<int, int>> spawned_chains;  // (source, vm), parent side at source dup
  double tree_cost = 0.0;
};

aux_steiner steiner_over_aux(const sof_instance& inst, const aux_graph& aux,
                             path_provider& paths) {
  // skeleton over the virtual structure plus collapsed distances between
  // VMs and destinations
  skeleton_graph sk;
  std::vector<int> reals = inst.net.vm_ids();
  for (int d : inst.dests)
    if (std::find(reals.begin(), reals.end(), d) == reals.end()) reals.push_back(d);
  std::sort(reals.begin(), reals.end());
  for (std::size_t a = 0; a < reals.size(); ++a)
    for (std::size_t b = a + 1; b < reals.size(); ++b) {
      auto pr = paths.query(reals[a], reals[b]);
      if (pr.reachable()) sk.add(reals[a], reals[b], pr.cost);
    }
  for (const auto& [s, dup] : aux.source_dup) sk.add(aux.virtual_source, dup, 0.0);
  for (const auto& [m, dup] : aux.vm_dup) sk.add(m, dup, 0.0);
  for (const auto& [key, e] : aux.virtual_edges)
    sk.add(aux.source_dup.at(key.first), aux.vm_dup.at(key.second), e.cost);
  sk.sort_adj();

  std::vector<int> terminals{aux.virtual_source};
  for (int d : inst.dests) terminals.push_back(d);

  std::map<std::pair<int, int>, path_result> closure;
  std::map<std::pair<int, int>, double> closure_cost;
  for (std::size_t a = 0; a < terminals.size(); ++a)
    for (std::size_t b = a + 1; b < terminals.size(); ++b) {
      int x = std::min(terminals[a], terminals[b]);
      int y = std::max(terminals[a], terminals[b]);
      auto pr = sk.shortest(x, y);
      if (!pr.reachable())
        throw infeasible_error("destination " + std::to_string(y) +
                               " cannot be served by any candidate chain");
      closure_cost[{x, y}] = pr.cost;
      closure[{x, y}] = std::move(pr);
    }

  std::set<int> tset(terminals.begin(), terminals.end());
  auto closure_mst = kruskal(tset, closure_cost);

  // expand skeleton paths into explicit auxiliary-graph edges
  std::set<int> nodes;
  std::map<std::pair<int, int>, double> weights;
  auto is_real = [&](int id) { return id < aux.virtual_source; };
  auto add_edge = [&](int a, int b, double w) {
    if (b < a) std::swap(a, b);
    weights.insert({{a, b}, w});
    nodes.insert(a);
    nodes.insert(b);
  };
  for (auto [u, v] : closure_mst) {
    if (v < u) std::swap(u, v);
    const auto& sk_path = closure.at({u, v}).nodes;
    for (std::size_t p = 0; p + 1 < sk_path.size(); ++p) {
      int a = sk_path[p], b = sk_path[p + 1];
      if (is_real(a) && is_real(b)) {
        auto pr = paths.query(a, b);
        for (std::size_t q = 0; q + 1 < pr.nodes.size(); ++q)
          add_edge(pr.nodes[q], pr.nodes[q + 1],
                   inst.net.edge_cost(pr.nodes[q], pr.nodes[q + 1]));
      } else {
        double w = 0.0;
        for (const auto& [to, wt] : sk.adj.at(a))
          if (to == b) {
            w = wt;
            break;
          }
        add_edge(a, b, w);
      }
    }
  }

  auto tree = kruskal(nodes, weights);

  // prune branches that serve no terminal
  std::set<int> keep(tset.begin(), tset.end());
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<int, int> degree;
    for (const auto& [u, v] : tree) {
      ++degree[u];
      ++degree[v];
    }
    std::vector<std::pair<int, int>> next;
    for (const auto& [u, v] : tree) {
      bool drop = (degree[u] == 1 && !keep.count(u)) || (degree[v] == 1 && !keep.count(v));
      if (drop)
        changed = true;
      else
        next.push_back({u, v});
    }
    tree.swap(next);
  }

  // orient at the virtual source to find which virtual edges spawn chains
  std::map<int, std::vector<int>> adj;
  for (const auto& [u, v] : tree) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& [_, lst] : adj) std::sort(lst.begin(), lst.end());
  std::map<int, int> parent;
  std::queue<int> q;
  q.push(aux.virtual_source);
  parent[aux.virtual_source] = aux.virtual_source;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    auto it = adj.find(u);
    if (it == adj.end()) continue;
    for (int v : it->second)
      if (!parent.count(v)) {
        parent[v] = u;
        q.push(v);
      }
  }

  std::map<int, int> dup_to_source, dup_to_vm;
  for (const auto& [s, dup] : aux.source_dup) dup_to_source[dup] = s;
  for (const auto& [m, dup] : aux.vm_dup) dup_to_vm[dup] = m;

  aux_steiner out;
  for (const auto& [u, v] : tree) {
    out.tree_cost += weights.at({u, v});
    if (is_real(u) && is_real(v)) {
      out.real_edges.push_back({u, v});
      continue;
    }
    bool u_is_sdup = dup_to_source.count(u), v_is_sdup = dup_to_source.count(v);
    bool u_is_mdup = dup_to_vm.count(u), v_is_mdup = dup_to_vm.count(v);
    if ((u_is_sdup && v_is_mdup) || (v_is_sdup && u_is_mdup)) {
      int sdup = u_is_sdup ? u : v;
      int mdup = u_is_sdup ? v : u;
      if (parent.count(mdup) && parent.at(mdup) == sdup)
        out.spawned_chains.push_back({dup_to_source.at(sdup), dup_to_vm.at(mdup)});
    }
  }
  std::sort(out.real_edges.begin(), out.real_edges.end());
  std::sort(out.spawned_chains.begin(), out.spawned_chains.end());
  return out;
}

}  // namespace

sofda_result sofda(const sof_instance& inst, kstroll_mode mode, path_provider* paths) {
  check_feasible(inst);
  local_path_provider local(inst.net);
  path_provider& pp = paths ? *paths : static_cast<path_provider&>(local);

  aux_graph aux = build_aux_graph(inst, &pp, mode);
  aux_steiner t = steiner_over_aux(inst, aux, pp);

  sofda_result result;
  for (const auto& [s, u] : t.spawned_chains) {
    const aux_edge& e = aux.virtual_edges.at({s, u});
    auto rep = resolve_conflicts(result.forest, e.lifted, inst, pp);
    for (auto& ev : rep.events) result.conflicts.events.push_back(ev);
  }
  for (const auto& [u, v] : t.real_edges) result.forest.add_tree_edge(u, v);

  auto report = validate_forest(inst, result.forest);
  if (!report.ok) {
    // safety net: attach any unserved destination, preferring an already
    // deployed chain over spawning a new one
    int repaired = 0;
    for (int d : inst.dests) {
      if (report.destination_roots.count(d)) continue;
      double best = k_inf;
      const aux_edge* best_edge = nullptr;  // null when reusing a deployed walk
      path_result best_path;
      for (const auto& w : result.forest.walks) {
        auto pr = pp.query(w.terminal(), d);
        if (pr.reachable() && pr.cost < best) {
          best = pr.cost;
          best_edge = nullptr;
          best_path = pr;
        }
      }
      bool have_reuse = best < k_inf;
      for (const auto& [key, e] : aux.virtual_edges) {
        auto pr = pp.query(e.last_vm, d);
        if (pr.reachable() && e.cost + pr.cost < best) {
          best = e.cost + pr.cost;
          best_edge = &e;
          best_path = pr;
        }
      }
      if (best == k_inf)
        throw infeasible_error("destination " + std::to_string(d) + " unservable");
      if (best_edge) {
        auto rep = resolve_conflicts(result.forest, best_edge->lifted, inst, pp);
        for (auto& ev : rep.events) result.conflicts.events.push_back(ev);
      } else if (!have_reuse) {
        throw infeasible_error("destination " + std::to_string(d) + " unservable");
      }
      for (std::size_t p = 0; p + 1 < best_path.nodes.size(); ++p)
        result.forest.add_tree_edge(best_path.nodes[p], best_path.nodes[p + 1]);
      ++repaired;
      report = validate_forest(inst, result.forest);
    }
    result.metadata["repaired_destinations"] = std::to_string(repaired);
  }

  result.cost = forest_cost(inst, result.forest);
  result.metadata["algorithm"] = "sofda";
  result.metadata["aux_tree_cost"] = std::to_string(t.tree_cost);
  for (const auto& w : aux.warnings) result.metadata["warning:" + w] = "1";
  return result;
}

}  // namespace sof
