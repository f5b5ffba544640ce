#pragma once

#include "sof/sofda.hpp"

namespace sof {

enum class baseline_algo { st, est, enemp };

struct baseline_config {
  baseline_algo algo = baseline_algo::est;
  bool multi_source = true;  // iterative tree addition
};

// Comparison heuristics: a Steiner tree joined with a service chain.
//   st    - best single chain-plus-tree over all sources, no iteration
//   est   - per-source Steiner tree over the destinations, then the cheapest
//           chain anchored to the tree; trees added while the total drops
//   enemp - as est, but the chain must end on a VM already in the tree
sofda_result run_baseline(const sof_instance& inst, const baseline_config& cfg,
                          path_provider* paths = nullptr);

sofda_result run_st(const sof_instance& inst, path_provider* paths = nullptr);
sofda_result run_est(const sof_instance& inst, bool multi_source = true,
                     path_provider* paths = nullptr);
sofda_result run_enemp(const sof_instance& inst, bool multi_source = true,
                       path_provider* paths = nullptr);

}  // namespace sof
