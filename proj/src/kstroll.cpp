#include "sof/kstroll.hpp"

#include <algorithm>

#include "sof/errors.hpp"

namespace sof {

namespace {

// exact subset DP over intermediate nodes; lexicographic tie-break
stroll_walk solve_exact(const metric_instance& mi, int k) {
  int s = mi.source, u = mi.last_vm;
  stroll_walk out;
  out.mode = "exact";
  if (k == 2) {
    out.nodes = {s, u};
    out.cost = mi.cost(s, u);
    return out;
  }

  std::vector<int> mids;
  for (int n : mi.nodes)
    if (n != s && n != u) mids.push_back(n);
  int t = static_cast<int>(mids.size());
  int need = k - 2;

  // dp over (subset of intermediates, last intermediate)
  int masks = 1 << t;
  std::vector<std::vector<double>> dp(masks, std::vector<double>(t, k_inf));
  std::vector<std::vector<int>> par(masks, std::vector<int>(t, -1));

  std::function<std::vector<int>(int, int)> seq_of = [&](int mask, int j) {
    std::vector<int> seq;
    while (j >= 0) {
      seq.push_back(mids[j]);
      int pj = par[mask][j];
      mask ^= (1 << j);
      j = pj;
    }
    seq.push_back(s);
    std::reverse(seq.begin(), seq.end());
    return seq;
  };

  for (int j = 0; j < t; ++j) {
    dp[1 << j][j] = mi.cost(s, mids[j]);
    par[1 << j][j] = -1;
  }
  for (int mask = 1; mask < masks; ++mask) {
    int pc = __builtin_popcount(static_cast<unsigned>(mask));
    if (pc >= need || pc == 0) continue;
    for (int j = 0; j < t; ++j) {
      if (!(mask & (1 << j)) || dp[mask][j] == k_inf) continue;
      for (int x = 0; x < t; ++x) {
        if (mask & (1 << x)) continue;
        int nmask = mask | (1 << x);
        double nc = dp[mask][j] + mi.cost(mids[j], mids[x]);
        if (nc < dp[nmask][x]) {
          dp[nmask][x] = nc;
          par[nmask][x] = j;
        } else if (nc == dp[nmask][x]) {
          auto cand = seq_of(mask, j);
          int oj = par[nmask][x];
          auto cur = seq_of(oj >= 0 ? (nmask ^ (1 << x)) : 0, oj);
          if (cand < cur) par[nmask][x] = j;
        }
      }
    }
  }

  double best = k_inf;
  int best_mask = 0, best_j = -1;
  std::vector<int> best_seq;
  for (int mask = 1; mask < masks; ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != need) continue;
    for (int j = 0; j < t; ++j) {
      if (dp[mask][j] == k_inf) continue;
      double c = dp[mask][j] + mi.cost(mids[j], u);
      if (c < best || (c == best && best_j >= 0)) {
        if (c == best) {
          auto cand = seq_of(mask, j);
          if (!(cand < best_seq)) continue;
        }
        best = c;
        best_mask = mask;
        best_j = j;
        best_seq = seq_of(mask, j);
      }
    }
  }
  if (best_j < 0) throw infeasible_error("k-stroll: no feasible walk");
  out.nodes = seq_of(best_mask, best_j);
  out.nodes.push_back(u);
  out.cost = best;
  return out;
}

double path_cost(const metric_instance& mi, const std::vector<int>& nodes) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) c += mi.cost(nodes[i], nodes[i + 1]);
  return c;
}

stroll_walk solve_heuristic(const metric_instance& mi, int k) {
  int s = mi.source, u = mi.last_vm;
  std::vector<int> path{s, u};
  std::vector<int> rest;
  for (int n : mi.nodes)
    if (n != s && n != u) rest.push_back(n);

  // cheapest insertion until k nodes on the path
  while (static_cast<int>(path.size()) < k) {
    double best = k_inf;
    int best_node = -1;
    std::size_t best_pos = 0;
    for (int cand : rest) {
      if (std::find(path.begin(), path.end(), cand) != path.end()) continue;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        double delta = mi.cost(path[i], cand) + mi.cost(cand, path[i + 1]) -
                       mi.cost(path[i], path[i + 1]);
        if (delta < best) {
          best = delta;
          best_node = cand;
          best_pos = i + 1;
        }
      }
    }
    path.insert(path.begin() + static_cast<long>(best_pos), best_node);
  }

  // 2-opt with fixed endpoints, then try swapping in excluded nodes
  bool improved = true;
  int rounds = 0;
  while (improved && ++rounds < 64) {
    improved = false;
    for (std::size_t i = 1; i + 1 < path.size(); ++i)
      for (std::size_t j = i + 1; j + 1 < path.size(); ++j) {
        double before = mi.cost(path[i - 1], path[i]) + mi.cost(path[j], path[j + 1]);
        double after = mi.cost(path[i - 1], path[j]) + mi.cost(path[i], path[j + 1]);
        if (after < before - 1e-12) {
          std::reverse(path.begin() + static_cast<long>(i),
                       path.begin() + static_cast<long>(j) + 1);
          improved = true;
        }
      }
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      for (int cand : rest) {
        if (std::find(path.begin(), path.end(), cand) != path.end()) continue;
        double before = mi.cost(path[i - 1], path[i]) + mi.cost(path[i], path[i + 1]);
        double after = mi.cost(path[i - 1], cand) + mi.cost(cand, path[i + 1]);
        if (after < before - 1e-12) {
          path[i] = cand;
          improved = true;
        }
      }
    }
  }

  stroll_walk out;
  out.mode = "heuristic";
  out.nodes = path;
  out.cost = path_cost(mi, path);
  return out;
}

}  // namespace

stroll_walk solve_kstroll(const metric_instance& mi, int k, kstroll_mode mode) {
  int total = static_cast<int>(mi.nodes.size());
  if (k > total)
    throw infeasible_error("k-stroll: k=" + std::to_string(k) + " exceeds " +
                           std::to_string(total) + " metric nodes");
  if (k < 2) throw input_error("k-stroll: k must be >= 2");

  if (mode == kstroll_mode::exact) return solve_exact(mi, k);
  if (mode == kstroll_mode::heuristic) return solve_heuristic(mi, k);

  if (total <= 20) {
    // subset count guard for deep chains on wide instances
    double est = 1.0;
    int t = total - 2, need = k - 2;
    for (int i = 0; i < need; ++i) est *= t;
    if (est <= 5e7) return solve_exact(mi, k);
  }
  return solve_heuristic(mi, k);
}

service_walk lift_walk(const metric_instance& mi, const stroll_walk& sw,
                       const sof_instance& inst, int first_vnf) {
  (void)inst;
  if (sw.nodes.size() < 2) throw input_error("lift_walk: degenerate stroll");
  service_walk w;
  w.visits.push_back({sw.nodes.front(), -1, std::nullopt});
  int vnf = first_vnf;
  for (std::size_t i = 0; i + 1 < sw.nodes.size(); ++i) {
    auto seg = mi.path(sw.nodes[i], sw.nodes[i + 1]);
    for (std::size_t j = 1; j < seg.size(); ++j) w.visits.push_back({seg[j], -1, std::nullopt});
    w.visits.back().vnf = vnf++;
  }
  return w;
}

}  // namespace sof
