#pragma once

#include <optional>
#include <vector>

namespace sof {

// One traversal step of a walk. clone distinguishes repeated passes through
// the same physical node; visits sharing (node, clone) across walks are the
// same physical flow and are charged once.
struct visit {
  int node = -1;
  int clone = -1;  // -1 = not yet registered with a forest
  std::optional<int> vnf;  // 1-based index into the chain
};

struct service_walk {
  std::vector<visit> visits;

  int source() const { return visits.empty() ? -1 : visits.front().node; }
  int terminal() const { return visits.empty() ? -1 : visits.back().node; }
  bool empty() const { return visits.empty(); }

  // positions of VNF-marked visits, in walk order
  std::vector<int> marked_positions() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(visits.size()); ++i)
      if (visits[i].vnf) out.push_back(i);
    return out;
  }
};

// Walk over plain node ids, markers placed later.
service_walk walk_from_nodes(const std::vector<int>& nodes);

}  // namespace sof
