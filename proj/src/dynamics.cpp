#include "sof/dynamics.hpp"

#include <algorithm>
#include <queue>

#include "sof/cost_model.hpp"
#include "sof/errors.hpp"
#include "sof/kstroll.hpp"
#include "sof/shortest_path.hpp"
#include "sof/walk_edit.hpp"

namespace sof {

namespace {

std::pair<int, int> norm(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// append w.visits[from..] to rebuilt, collapsing a duplicate junction visit
void append_tail(service_walk& rebuilt, const service_walk& w, std::size_t from) {
  std::size_t start = from;
  if (!rebuilt.visits.empty() && from < w.visits.size() &&
      rebuilt.visits.back().node == w.visits[from].node) {
    if (w.visits[from].vnf && !rebuilt.visits.back().vnf)
      rebuilt.visits.back().vnf = w.visits[from].vnf;
    start = from + 1;
  }
  for (std::size_t q = start; q < w.visits.size(); ++q) rebuilt.visits.push_back(w.visits[q]);
}

}  // namespace

deployment_state::deployment_state(sof_instance inst, double demand_per_request)
    : inst_(std::move(inst)), demand_(demand_per_request) {}

void deployment_state::note(const std::string& kind, const std::string& detail) {
  log_.push_back({kind, detail});
}

void deployment_state::deploy(service_forest f) {
  forest_ = std::move(f);
  recompute_loads();
  note("deploy", "forest deployed");
}

void deployment_state::recompute_loads() {
  edge_loads_.clear();
  vm_loads_.clear();
  for (const auto& [a, b] : forest_.clone_edges())
    edge_loads_[norm(a.first, b.first)] += demand_;
  for (const auto& [u, v] : forest_.tree_edges) edge_loads_[norm(u, v)] += demand_;
  for (const auto& [vm, _] : forest_.enabled_vms()) vm_loads_[vm] += demand_;
}

network deployment_state::refreshed_costs() const {
  network net = inst_.net;
  for (auto& e : net.edges_mutable()) {
    if (!e.capacity) throw input_error("edge without capacity cannot be refreshed");
    double ambient = e.load.value_or(0.0);
    auto it = edge_loads_.find(norm(e.u, e.v));
    double deployed = it == edge_loads_.end() ? 0.0 : it->second;
    e.connection_cost = element_cost(ambient + deployed, *e.capacity);
  }
  for (int id : net.node_ids()) {
    auto& n = net.node_mutable(id);
    if (n.role != node_role::vm) continue;
    if (!n.capacity) throw input_error("VM without capacity cannot be refreshed");
    double ambient = n.load.value_or(0.0);
    auto it = vm_loads_.find(id);
    double deployed = it == vm_loads_.end() ? 0.0 : it->second;
    n.setup_cost = element_cost(ambient + deployed, *n.capacity);
  }
  return net;
}

void deployment_state::apply_refresh() {
  inst_.net = refreshed_costs();
  note("refresh", "costs recomputed from loads");
}

// ----------------------------------------------------------------- leave

void deployment_state::handle_leave(int dest) {
  if (!inst_.dests.count(dest)) {
    note("leave", "node " + std::to_string(dest) + " is not a served destination; no-op");
    return;
  }
  inst_.dests.erase(dest);

  std::set<int> protected_nodes;
  for (const auto& w : forest_.walks)
    for (const auto& v : w.visits) protected_nodes.insert(v.node);
  for (int s : inst_.sources) protected_nodes.insert(s);
  for (int d : inst_.dests) protected_nodes.insert(d);

  // peel the pendant tree path up to the closest branch or protected node
  int cur = dest;
  int removed = 0;
  while (true) {
    if (cur != dest && protected_nodes.count(cur)) break;
    std::vector<std::size_t> incident;
    for (std::size_t i = 0; i < forest_.tree_edges.size(); ++i)
      if (forest_.tree_edges[i].first == cur || forest_.tree_edges[i].second == cur)
        incident.push_back(i);
    if (incident.size() != 1) break;  // branch node or already detached
    auto [a, b] = forest_.tree_edges[incident[0]];
    forest_.tree_edges.erase(forest_.tree_edges.begin() + static_cast<long>(incident[0]));
    ++removed;
    cur = (a == cur) ? b : a;
  }
  recompute_loads();
  if (removed == 0)
    note("leave", std::to_string(dest) + " left; non-leaf, structure retained");
  else
    note("leave", std::to_string(dest) + " left; pruned " + std::to_string(removed) +
                      " pendant edges");
}

// ------------------------------------------------------------------ join

namespace {

// last installed VNF index between a source and each forest node
std::map<int, int> last_vnf_index(const service_forest& forest, int chain_len) {
  std::map<int, int> f;
  for (const auto& w : forest.walks) {
    int m = 0;
    for (const auto& v : w.visits) {
      if (v.vnf) m = *v.vnf;
      auto it = f.find(v.node);
      if (it == f.end() || it->second < m) f[v.node] = m;
    }
  }
  // tree nodes sit downstream of complete chains
  std::map<int, std::vector<int>> adj;
  for (const auto& [u, v] : forest.tree_edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::queue<int> q;
  std::set<int> seen;
  for (const auto& w : forest.walks) {
    int m = 0;
    for (const auto& v : w.visits) {
      if (v.vnf) m = *v.vnf;
      if (m == chain_len && seen.insert(v.node).second) q.push(v.node);
    }
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    auto it = f.find(u);
    if (it == f.end() || it->second < chain_len) f[u] = chain_len;
    auto a = adj.find(u);
    if (a == adj.end()) continue;
    for (int v : a->second)
      if (seen.insert(v).second) q.push(v);
  }
  return f;
}

std::vector<int> available_vms(const sof_instance& inst, const service_forest& forest) {
  auto enabled = forest.enabled_vms();
  std::vector<int> out;
  for (int vm : inst.net.vm_ids())
    if (!enabled.count(vm)) out.push_back(vm);
  return out;
}

}  // namespace

void deployment_state::handle_join(int node) {
  if (!inst_.net.has_node(node)) throw input_error("join: unknown node");
  if (inst_.dests.count(node)) {
    note("join", std::to_string(node) + " already served; no-op");
    return;
  }
  local_path_provider paths(inst_.net);
  auto f_of = last_vnf_index(forest_, inst_.chain_len);
  if (f_of.empty()) throw infeasible_error("join: forest is empty");
  auto avail = available_vms(inst_, forest_);

  struct plan {
    double cost = k_inf;
    int attach = -1;
    int attach_f = 0;
    service_walk extension;      // empty for pure-path attachments
    bool mark_attach = false;    // enable the attachment VM itself
    std::vector<int> tail_path;  // last VM (or attach) -> new destination
  };
  plan best;

  for (const auto& [u, fu] : f_of) {
    int needed = inst_.chain_len - fu;
    if (needed == 0) {
      auto sp = paths.query(u, node);
      if (sp.reachable() && sp.cost < best.cost) {
        best = plan{};
        best.cost = sp.cost;
        best.attach = u;
        best.attach_f = fu;
        best.tail_path = sp.nodes;
      }
      continue;
    }
    for (int w : avail) {
      if (w == u) {
        // the pass-through VM at the attachment can host the one missing VNF
        if (needed != 1) continue;
        auto sp = paths.query(u, node);
        if (!sp.reachable()) continue;
        double cost = inst_.net.node_cost(u) + sp.cost;
        if (cost < best.cost) {
          best = plan{};
          best.cost = cost;
          best.attach = u;
          best.attach_f = fu;
          best.mark_attach = true;
          best.tail_path = sp.nodes;
        }
        continue;
      }
      try {
        metric_instance mi = build_metric_instance_over(inst_.net, avail, u, w, 0.0,
                                                        metric_variant::plain, paths);
        stroll_walk sw = solve_kstroll(mi, needed + 1);
        service_walk ext = lift_walk(mi, sw, inst_, fu + 1);
        auto sp = paths.query(w, node);
        if (!sp.reachable()) continue;
        double cost = walk_cost(inst_, ext) + sp.cost;
        if (cost < best.cost) {
          best = plan{};
          best.cost = cost;
          best.attach = u;
          best.attach_f = fu;
          best.extension = std::move(ext);
          best.tail_path = sp.nodes;
        }
      } catch (const infeasible_error&) {
      }
    }
  }
  if (best.attach < 0) throw infeasible_error("join: no feasible attachment for " +
                                              std::to_string(node));

  if (best.extension.empty() && !best.mark_attach) {
    for (std::size_t i = 0; i + 1 < best.tail_path.size(); ++i)
      forest_.add_tree_edge(best.tail_path[i], best.tail_path[i + 1]);
  } else {
    // grow a walk that shares the serving prefix up to the attachment
    const service_walk* host = nullptr;
    std::size_t host_pos = 0;
    for (const auto& w : forest_.walks) {
      int m = 0;
      for (std::size_t p = 0; p < w.visits.size(); ++p) {
        if (w.visits[p].vnf) m = *w.visits[p].vnf;
        if (w.visits[p].node == best.attach && m == best.attach_f) {
          host = &w;
          host_pos = p;
          break;
        }
      }
      if (host) break;
    }
    if (!host) throw input_error("join: attachment walk vanished");
    service_walk grown;
    grown.visits.assign(host->visits.begin(),
                        host->visits.begin() + static_cast<long>(host_pos) + 1);
    if (best.mark_attach)
      grown.visits.back().vnf = best.attach_f + 1;
    for (std::size_t p = 1; p < best.extension.visits.size(); ++p)
      grown.visits.push_back(best.extension.visits[p]);
    forest_.add_walk(std::move(grown));
    for (std::size_t i = 0; i + 1 < best.tail_path.size(); ++i)
      forest_.add_tree_edge(best.tail_path[i], best.tail_path[i + 1]);
  }
  inst_.dests.insert(node);
  recompute_loads();
  note("join", std::to_string(node) + " joined at " + std::to_string(best.attach) +
                   ", added cost " + std::to_string(best.cost));
}

// ------------------------------------------------------- VNF delete/insert

void deployment_state::handle_vnf_delete(int j) {
  if (j < 1 || j > inst_.chain_len) throw input_error("vnf delete: index out of range");
  local_path_provider paths(inst_.net);
  for (std::size_t wi = 0; wi < forest_.walks.size(); ++wi) {
    auto& w = forest_.walks[wi];
    for (auto& v : w.visits) {
      if (!v.vnf) continue;
      if (*v.vnf == j)
        v.vnf = std::nullopt;
      else if (*v.vnf > j)
        v.vnf = *v.vnf - 1;
    }
  }
  inst_.chain_len -= 1;
  for (std::size_t wi = 0; wi < forest_.walks.size(); ++wi) {
    auto shared = detail::clones_used_elsewhere(forest_, &forest_.walks[wi], nullptr);
    detail::shorten_walk(forest_.walks[wi], 0, inst_, paths, forest_, shared);
  }
  recompute_loads();
  note("vnf_delete", "f_" + std::to_string(j) + " removed, chain now " +
                         std::to_string(inst_.chain_len));
}

void deployment_state::rejoin_unserved() {
  std::size_t guard = 0;
  while (true) {
    if (++guard > inst_.dests.size() + 8) break;
    auto rep = validate_forest(inst_, forest_);
    int victim = -1;
    for (int d : inst_.dests)
      if (!rep.destination_roots.count(d)) {
        victim = d;
        break;
      }
    if (victim < 0) break;
    inst_.dests.erase(victim);
    handle_join(victim);
    note("rejoin", std::to_string(victim) + " re-attached after chain change");
  }
}

void deployment_state::handle_vnf_insert(int j) {
  if (j < 1 || j > inst_.chain_len + 1) throw input_error("vnf insert: index out of range");
  service_forest forest_snapshot = forest_;
  sof_instance inst_snapshot = inst_;
  try {
    vnf_insert_impl(j);
    rejoin_unserved();
    recompute_loads();
  } catch (...) {
    forest_ = std::move(forest_snapshot);
    inst_ = std::move(inst_snapshot);
    recompute_loads();
    throw;
  }
}

void deployment_state::vnf_insert_impl(int j) {
  local_path_provider paths(inst_.net);
  auto avail = available_vms(inst_, forest_);
  if (avail.empty()) throw infeasible_error("vnf insert: no available VM");

  // anchors under the old numbering, then renumber
  struct anchors {
    std::size_t up, down;
    bool at_end;
  };
  std::vector<anchors> spots(forest_.walks.size());
  for (std::size_t wi = 0; wi < forest_.walks.size(); ++wi) {
    const auto& w = forest_.walks[wi];
    anchors a{0, w.visits.size() - 1, j == inst_.chain_len + 1};
    for (std::size_t p = 0; p < w.visits.size(); ++p) {
      if (!w.visits[p].vnf) continue;
      if (*w.visits[p].vnf == j - 1) a.up = p;
      if (*w.visits[p].vnf == j && !a.at_end) a.down = p;
    }
    spots[wi] = a;
  }
  for (auto& w : forest_.walks)
    for (auto& v : w.visits)
      if (v.vnf && *v.vnf >= j) v.vnf = *v.vnf + 1;
  inst_.chain_len += 1;

  std::map<int, std::pair<std::size_t, std::size_t>> chosen;  // v -> (walk, pos of v)
  for (std::size_t wi = 0; wi < forest_.walks.size(); ++wi) {
    auto& w = forest_.walks[wi];
    const auto a = spots[wi];
    int up_node = w.visits[a.up].node;
    int down_node = w.visits[a.down].node;

    double best = k_inf;
    int best_vm = -1;
    for (int v : avail) {
      auto s1 = paths.query(up_node, v);
      auto s2 = paths.query(v, down_node);
      if (!s1.reachable() || !s2.reachable()) continue;
      double c = s1.cost + inst_.net.node_cost(v) + s2.cost;
      if (c < best) {
        best = c;
        best_vm = v;
      }
    }
    if (best_vm < 0) throw infeasible_error("vnf insert: no VM reachable for walk");

    auto already = chosen.find(best_vm);
    if (already != chosen.end() && already->second.first != wi) {
      // second pair picked the same VM: feed this walk from the first one
      const auto& [owner_wi, owner_pos] = already->second;
      const service_walk& owner = forest_.walks[owner_wi];
      service_walk rebuilt;
      rebuilt.visits.assign(owner.visits.begin(),
                            owner.visits.begin() + static_cast<long>(owner_pos) + 1);
      auto back = paths.query(best_vm, down_node);
      for (std::size_t q = 1; q + 1 < back.nodes.size(); ++q)
        rebuilt.visits.push_back({back.nodes[q], forest_.fresh_clone(), std::nullopt});
      append_tail(rebuilt, w, a.down);
      w = std::move(rebuilt);
      note("vnf_insert", "walk " + std::to_string(wi) + " shares f_" + std::to_string(j) +
                             " at " + std::to_string(best_vm) +
                             "; redundant feed path dropped");
      continue;
    }

    service_walk rebuilt;
    rebuilt.visits.assign(w.visits.begin(), w.visits.begin() + static_cast<long>(a.up) + 1);
    auto s1 = paths.query(up_node, best_vm);
    for (std::size_t q = 1; q < s1.nodes.size(); ++q)
      rebuilt.visits.push_back({s1.nodes[q], forest_.fresh_clone(), std::nullopt});
    if (rebuilt.visits.back().node != best_vm)
      rebuilt.visits.push_back({best_vm, forest_.fresh_clone(), std::nullopt});
    rebuilt.visits.back().vnf = j;
    std::size_t pos_v = rebuilt.visits.size() - 1;
    if (a.at_end) {
      // the new VNF becomes the last one; re-feed the old terminal region
      int old_terminal = w.visits.back().node;
      auto back = paths.query(best_vm, old_terminal);
      for (std::size_t q = 0; q + 1 < back.nodes.size(); ++q)
        forest_.add_tree_edge(back.nodes[q], back.nodes[q + 1]);
    } else {
      auto s2 = paths.query(best_vm, down_node);
      for (std::size_t q = 1; q + 1 < s2.nodes.size(); ++q)
        rebuilt.visits.push_back({s2.nodes[q], forest_.fresh_clone(), std::nullopt});
      append_tail(rebuilt, w, a.down);
    }
    w = std::move(rebuilt);
    chosen[best_vm] = {wi, pos_v};
  }
  recompute_loads();
  note("vnf_insert", "f_" + std::to_string(j) + " inserted, chain now " +
                         std::to_string(inst_.chain_len));
}

// ------------------------------------------------------------- congestion

void deployment_state::handle_congest_edge(int u, int v, double new_load) {
  int idx = inst_.net.edge_index(u, v);
  if (idx < 0) throw input_error("congest: unknown edge");
  inst_.net.edges_mutable()[static_cast<std::size_t>(idx)].load = new_load;
  apply_refresh();
  local_path_provider paths(inst_.net);

  bool touched = false;
  auto on_edge = [&](int a, int b) { return norm(a, b) == norm(u, v); };

  for (std::size_t wi = 0; wi < forest_.walks.size(); ++wi) {
    auto& w = forest_.walks[wi];
    bool uses = false;
    for (std::size_t p = 0; p + 1 < w.visits.size(); ++p)
      if (on_edge(w.visits[p].node, w.visits[p + 1].node)) uses = true;
    if (!uses) continue;
    touched = true;
    auto shared = detail::clones_used_elsewhere(forest_, &w, nullptr);
    detail::shorten_walk(w, 0, inst_, paths, forest_, shared);
  }
  std::vector<std::pair<int, int>> new_tree;
  for (const auto& e : forest_.tree_edges) {
    if (!on_edge(e.first, e.second)) {
      new_tree.push_back(e);
      continue;
    }
    touched = true;
    auto sp = paths.query(e.first, e.second);
    for (std::size_t p = 0; p + 1 < sp.nodes.size(); ++p)
      new_tree.push_back({sp.nodes[p], sp.nodes[p + 1]});
  }
  forest_.tree_edges = std::move(new_tree);
  recompute_loads();
  note("congest_edge", std::to_string(u) + "-" + std::to_string(v) +
                           (touched ? "; forest rerouted make-before-break"
                                    : "; not on forest, costs refreshed only"));
}

void deployment_state::handle_congest_vm(int v, double new_load) {
  if (!inst_.net.has_node(v)) throw input_error("congest: unknown node");
  service_forest forest_snapshot = forest_;
  sof_instance inst_snapshot = inst_;
  try {
    congest_vm_impl(v, new_load);
    rejoin_unserved();
    recompute_loads();
  } catch (...) {
    forest_ = std::move(forest_snapshot);
    inst_ = std::move(inst_snapshot);
    recompute_loads();
    throw;
  }
}

void deployment_state::congest_vm_impl(int v, double new_load) {
  inst_.net.node_mutable(v).load = new_load;
  apply_refresh();
  local_path_provider paths(inst_.net);

  auto enabled = forest_.enabled_vms();
  auto it = enabled.find(v);
  if (it == enabled.end()) {
    recompute_loads();
    note("congest_vm", std::to_string(v) + " not enabled on forest, costs refreshed only");
    return;
  }
  int fj = it->second;

  auto avail = available_vms(inst_, forest_);
  avail.push_back(v);  // staying put is allowed when still cheapest
  std::sort(avail.begin(), avail.end());

  for (std::size_t wi = 0; wi < forest_.walks.size(); ++wi) {
    auto& w = forest_.walks[wi];
    std::size_t pos_v = w.visits.size();
    for (std::size_t p = 0; p < w.visits.size(); ++p)
      if (w.visits[p].vnf && *w.visits[p].vnf == fj && w.visits[p].node == v) pos_v = p;
    if (pos_v == w.visits.size()) continue;

    std::size_t up = 0, down = w.visits.size() - 1;
    for (std::size_t p = 0; p < pos_v; ++p)
      if (w.visits[p].vnf) up = p;
    bool at_end = pos_v == w.visits.size() - 1;
    if (!at_end) {
      down = pos_v + 1;
      while (down < w.visits.size() - 1 && !w.visits[down].vnf) ++down;
    }

    int up_node = w.visits[up].node;
    int down_node = w.visits[down].node;
    double best = k_inf;
    int best_vm = v;
    for (int cand : avail) {
      auto s1 = paths.query(up_node, cand);
      if (!s1.reachable()) continue;
      double c = s1.cost + inst_.net.node_cost(cand);
      if (!at_end) {
        auto s2 = paths.query(cand, down_node);
        if (!s2.reachable()) continue;
        c += s2.cost;
      }
      if (c < best) {
        best = c;
        best_vm = cand;
      }
    }
    if (best_vm == v) {
      note("congest_vm", std::to_string(v) + " stays cheapest for walk " + std::to_string(wi));
      continue;
    }

    service_walk rebuilt;
    rebuilt.visits.assign(w.visits.begin(), w.visits.begin() + static_cast<long>(up) + 1);
    auto s1 = paths.query(up_node, best_vm);
    for (std::size_t q = 1; q < s1.nodes.size(); ++q)
      rebuilt.visits.push_back({s1.nodes[q], forest_.fresh_clone(), std::nullopt});
    if (rebuilt.visits.back().node != best_vm)
      rebuilt.visits.push_back({best_vm, forest_.fresh_clone(), std::nullopt});
    rebuilt.visits.back().vnf = fj;
    if (at_end) {
      auto back = paths.query(best_vm, v);
      for (std::size_t q = 0; q + 1 < back.nodes.size(); ++q)
        forest_.add_tree_edge(back.nodes[q], back.nodes[q + 1]);
    } else {
      auto s2 = paths.query(best_vm, down_node);
      for (std::size_t q = 1; q + 1 < s2.nodes.size(); ++q)
        rebuilt.visits.push_back({s2.nodes[q], forest_.fresh_clone(), std::nullopt});
      append_tail(rebuilt, w, down);
    }
    w = std::move(rebuilt);
    note("congest_vm", "f_" + std::to_string(fj) + " migrated " + std::to_string(v) + " -> " +
                           std::to_string(best_vm) + " make-before-break");
  }
  recompute_loads();
}

}  // namespace sof
