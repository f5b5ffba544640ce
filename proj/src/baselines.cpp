#include "sof/baselines.hpp"

#include <algorithm>
#include <queue>

#include "sof/errors.hpp"
#include "sof/steiner.hpp"

namespace sof {

namespace {

struct chain_cand {
  int last_vm = -1;
  double cost = 0.0;
  service_walk walk;
};

std::vector<chain_cand> chain_candidates(const sof_instance& inst, int source,
                                         path_provider& paths) {
  std::vector<chain_cand> out;
  metric_variant variant =
      inst.has_source_costs() ? metric_variant::source_cost : metric_variant::plain;
  for (int u : inst.net.vm_ids()) {
    try {
      metric_instance mi = build_metric_instance(inst, source, u, variant, &paths);
      stroll_walk sw = solve_kstroll(mi, inst.chain_len + 1);
      chain_cand c;
      c.last_vm = u;
      c.walk = lift_walk(mi, sw, inst);
      c.cost = walk_cost(inst, c.walk);
      out.push_back(std::move(c));
    } catch (const infeasible_error&) {
    }
  }
  return out;
}

struct tree_index {
  std::map<int, std::vector<int>> adj;
  std::map<std::pair<int, int>, double> weight;

  explicit tree_index(const network& net, const std::vector<std::pair<int, int>>& edges) {
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
      if (v < u) std::swap(u, v);
      weight[{u, v}] = net.edge_cost(u, v);
    }
    for (auto& [_, lst] : adj) std::sort(lst.begin(), lst.end());
  }

  std::vector<int> nodes() const {
    std::vector<int> out;
    for (const auto& [n, _] : adj) out.push_back(n);
    return out;
  }

  std::map<int, int> parents_from(int root) const {
    std::map<int, int> parent;
    parent[root] = root;
    std::queue<int> q;
    q.push(root);
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
    return parent;
  }

  double path_cost(int root, int d) const {
    auto parent = parents_from(root);
    if (!parent.count(d)) return k_inf;
    double c = 0.0;
    int cur = d;
    while (cur != root) {
      int p = parent.at(cur);
      c += weight.at({std::min(cur, p), std::max(cur, p)});
      cur = p;
    }
    return c;
  }
};

double edges_cost(const network& net, const std::vector<std::pair<int, int>>& edges) {
  double c = 0.0;
  for (const auto& [u, v] : edges) c += net.edge_cost(u, v);
  return c;
}

// a per-source service tree candidate: chain walk, attachment path, tree
struct candidate {
  int source = -1;
  service_walk walk;
  std::vector<int> attach_path;  // last VM ... anchor, may be single node
  std::vector<std::pair<int, int>> tree_edges;
  int anchor = -1;
  double fixed_cost = 0.0;  // chain + attachment, setups included
  bool est_fallback = false;
};

candidate make_candidate(const sof_instance& inst, int source, bool require_tree_vm,
                         path_provider& paths) {
  std::vector<int> dests(inst.dests.begin(), inst.dests.end());
  steiner_result tree = steiner_approx(inst.net, source, dests, paths);
  tree_index ti(inst.net, tree.edges);

  std::vector<int> tnodes = ti.nodes();
  if (tnodes.empty()) tnodes.push_back(source);  // degenerate: all dests == source

  auto chains = chain_candidates(inst, source, paths);
  if (chains.empty()) throw infeasible_error("no chain candidate from source");

  // the tree is deployed as computed; only the chain and its attachment
  // path are optimized
  candidate best;
  double best_fixed = k_inf;
  bool fallback = false;
  std::set<int> tree_vms;
  for (int t : tnodes)
    if (inst.net.node(t).role == node_role::vm) tree_vms.insert(t);
  bool constrained = require_tree_vm && !tree_vms.empty();
  if (require_tree_vm && tree_vms.empty()) fallback = true;

  for (const auto& ch : chains) {
    if (constrained) {
      if (!tree_vms.count(ch.last_vm)) continue;
      if (ch.cost < best_fixed) {
        best_fixed = ch.cost;
        best = candidate{};
        best.source = source;
        best.walk = ch.walk;
        best.anchor = ch.last_vm;
        best.attach_path = {ch.last_vm};
        best.tree_edges = tree.edges;
        best.fixed_cost = ch.cost;
      }
    } else {
      for (int t : tnodes) {
        auto sp = paths.query(ch.last_vm, t);
        if (!sp.reachable()) continue;
        if (ch.cost + sp.cost < best_fixed) {
          best_fixed = ch.cost + sp.cost;
          best = candidate{};
          best.source = source;
          best.walk = ch.walk;
          best.anchor = t;
          best.attach_path = sp.nodes;
          best.tree_edges = tree.edges;
          best.fixed_cost = ch.cost + sp.cost;
        }
      }
    }
  }
  if (best.source < 0) throw infeasible_error("no feasible chain-tree combination");
  best.est_fallback = fallback;
  return best;
}

// total cost of a set of candidates with each destination assigned to the
// tree whose in-tree path from the anchor is cheapest; trees serving at
// least one destination are deployed whole
double evaluate(const sof_instance& inst, const std::vector<candidate>& chosen,
                std::map<int, std::size_t>* assignment_out) {
  std::map<int, std::size_t> assignment;
  for (int d : inst.dests) {
    double best = k_inf;
    std::size_t who = 0;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      tree_index ti(inst.net, chosen[i].tree_edges);
      double c = (d == chosen[i].anchor) ? 0.0 : ti.path_cost(chosen[i].anchor, d);
      if (c < best) {
        best = c;
        who = i;
      }
    }
    if (best == k_inf) return k_inf;
    assignment[d] = who;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    bool used = false;
    for (const auto& [d, who] : assignment)
      if (who == i) used = true;
    if (!used) continue;  // tree dropped entirely
    total += chosen[i].fixed_cost + edges_cost(inst.net, chosen[i].tree_edges);
  }
  if (assignment_out) *assignment_out = std::move(assignment);
  return total;
}

sofda_result assemble(const sof_instance& inst, const std::vector<candidate>& chosen,
                      const std::map<int, std::size_t>& assignment) {
  sofda_result result;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    bool used = false;
    for (const auto& [d, who] : assignment)
      if (who == i) used = true;
    if (!used) continue;
    const candidate& c = chosen[i];
    result.forest.add_walk(c.walk);
    for (std::size_t p = 0; p + 1 < c.attach_path.size(); ++p)
      result.forest.add_tree_edge(c.attach_path[p], c.attach_path[p + 1]);
    for (const auto& [u, v] : c.tree_edges) result.forest.add_tree_edge(u, v);
  }
  result.cost = forest_cost(inst, result.forest);
  return result;
}

sofda_result run_tree_baseline(const sof_instance& inst, bool require_tree_vm,
                               bool multi_source, path_provider* paths) {
  check_feasible(inst);
  local_path_provider local(inst.net);
  path_provider& pp = paths ? *paths : static_cast<path_provider&>(local);

  if (inst.dests.empty()) {
    sofda_result empty;
    empty.cost = forest_cost(inst, empty.forest);
    empty.metadata["algorithm"] = require_tree_vm ? "enemp" : "est";
    return empty;
  }

  std::vector<int> sources(inst.sources.begin(), inst.sources.end());
  std::map<int, candidate> cands;
  for (int s : sources) {
    try {
      cands.emplace(s, make_candidate(inst, s, require_tree_vm, pp));
    } catch (const infeasible_error&) {
    }
  }
  if (cands.empty()) throw infeasible_error("no source yields a feasible service tree");

  // start from the best single tree
  std::vector<candidate> chosen;
  double cur_total = k_inf;
  int first_source = -1;
  for (const auto& [s, c] : cands) {
    double t = evaluate(inst, {c}, nullptr);
    if (t < cur_total) {
      cur_total = t;
      first_source = s;
    }
  }
  if (first_source < 0) throw infeasible_error("no single service tree serves all destinations");
  chosen.push_back(cands.at(first_source));
  std::set<int> used{first_source};
  std::vector<double> iteration_costs{cur_total};

  while (multi_source) {
    double best_total = cur_total;
    int best_source = -1;
    for (const auto& [s, c] : cands) {
      if (used.count(s)) continue;
      std::vector<candidate> trial = chosen;
      trial.push_back(c);
      double t = evaluate(inst, trial, nullptr);
      if (t < best_total - 1e-12) {
        best_total = t;
        best_source = s;
      }
    }
    if (best_source < 0) break;
    chosen.push_back(cands.at(best_source));
    used.insert(best_source);
    cur_total = best_total;
    iteration_costs.push_back(cur_total);
  }

  std::map<int, std::size_t> assignment;
  evaluate(inst, chosen, &assignment);
  sofda_result result = assemble(inst, chosen, assignment);
  result.metadata["algorithm"] = require_tree_vm ? "enemp" : "est";
  result.metadata["trees"] = std::to_string(chosen.size());
  std::string iters;
  for (double c : iteration_costs) iters += (iters.empty() ? "" : ";") + std::to_string(c);
  result.metadata["iteration_costs"] = iters;
  bool fell_back = false;
  for (const auto& c : chosen)
    if (c.est_fallback) fell_back = true;
  if (fell_back) result.metadata["enemp_fallback"] = "est";
  return result;
}

}  // namespace

sofda_result run_st(const sof_instance& inst, path_provider* paths) {
  check_feasible(inst);
  local_path_provider local(inst.net);
  path_provider& pp = paths ? *paths : static_cast<path_provider&>(local);

  std::vector<int> dests(inst.dests.begin(), inst.dests.end());
  if (dests.empty()) {
    sofda_result empty;
    empty.cost = forest_cost(inst, empty.forest);
    empty.metadata["algorithm"] = "st";
    return empty;
  }

  double best = k_inf;
  service_walk best_walk;
  steiner_result best_tree;
  for (int s : inst.sources) {
    for (const auto& ch : chain_candidates(inst, s, pp)) {
      try {
        steiner_result tree = steiner_approx(inst.net, ch.last_vm, dests, pp);
        double total = ch.cost + tree.cost;
        if (total < best) {
          best = total;
          best_walk = ch.walk;
          best_tree = std::move(tree);
        }
      } catch (const infeasible_error&) {
      }
    }
  }
  if (best == k_inf) throw infeasible_error("st: no feasible chain-tree combination");
  sofda_result result;
  result.forest.add_walk(std::move(best_walk));
  for (const auto& [u, v] : best_tree.edges) result.forest.add_tree_edge(u, v);
  result.cost = forest_cost(inst, result.forest);
  result.metadata["algorithm"] = "st";
  return result;
}

sofda_result run_est(const sof_instance& inst, bool multi_source, path_provider* paths) {
  return run_tree_baseline(inst, false, multi_source, paths);
}

sofda_result run_enemp(const sof_instance& inst, bool multi_source, path_provider* paths) {
  return run_tree_baseline(inst, true, multi_source, paths);
}

sofda_result run_baseline(const sof_instance& inst, const baseline_config& cfg,
                          path_provider* paths) {
  switch (cfg.algo) {
    case baseline_algo::st:
      return run_st(inst, paths);
    case baseline_algo::est:
      return run_est(inst, cfg.multi_source, paths);
    case baseline_algo::enemp:
      return run_enemp(inst, cfg.multi_source, paths);
  }
  throw input_error("unknown baseline");
}

}  // namespace sof
