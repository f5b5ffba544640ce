#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sof/sofda.hpp"

namespace sof {

struct domain {
  int controller = -1;
  std::vector<int> nodes;    // sorted
  std::vector<int> borders;  // nodes with edges crossing domains, sorted
};

// Connected, balanced partition grown breadth-first from seeded picks.
std::vector<domain> partition(const network& net, int k_domains, std::uint64_t seed);

struct message_stats {
  std::map<std::string, long> per_kind;  // BorderMatrix, ReachabilityInfo, PathQuery,
                                         // PathReply, ChainAdvert, ConflictNotify,
                                         // ConflictResolve, Deploy
  int rounds = 0;

  long total() const {
    long n = 0;
    for (const auto& [_, v] : per_kind) n += v;
    return n;
  }
  long inter_controller() const { return total(); }
};

struct distsim_result {
  sofda_result result;
  message_stats stats;
  int leader = -1;
};

// Runs SOFDA on top of a synchronous multi-controller exchange: controllers
// swap border-router distance matrices, the leader resolves shortest paths
// through per-domain queries, candidate chains are advertised to the leader
// and conflicts are settled pairwise. The produced forest matches the
// centralized run; only the message accounting differs.
distsim_result run_distributed_sofda(const sof_instance& inst,
                                     const std::vector<domain>& domains,
                                     kstroll_mode mode = kstroll_mode::auto_select);

}  // namespace sof
