#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sof/network.hpp"
#include "sof/shortest_path.hpp"

namespace sof {

struct steiner_result {
  std::vector<std::pair<int, int>> edges;
  double cost = 0.0;
  std::set<int> spanned;
  std::string solver;  // "kmb" or "exact"
};

// Kou–Markowsky–Berman metric-closure 2-approximation: closure over the
// terminals, MST, expansion to real paths, MST of the expansion, prune.
steiner_result steiner_approx(const network& net, int root, std::vector<int> terminals);
steiner_result steiner_approx(const network& net, int root, std::vector<int> terminals,
                              path_provider& paths);

// Dreyfus–Wagner subset dynamic programming, exact. Terminal budget 12.
steiner_result steiner_exact(const network& net, int root, std::vector<int> terminals);

// Directed variant on an explicit digraph; returns a minimum arborescence
// rooted at root spanning the terminals. Used on the layered oracle graph.
struct digraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> out;  // (to, cost)
  void add_arc(int u, int v, double cost) { out[u].push_back({v, cost}); }
};

struct arborescence {
  std::vector<std::pair<int, int>> arcs;
  double cost = 0.0;
  bool feasible = false;
};

arborescence steiner_arborescence(const digraph& g, int root,
                                  const std::vector<int>& terminals);

}  // namespace sof
