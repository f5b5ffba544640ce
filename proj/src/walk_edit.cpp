#include "sof/walk_edit.hpp"

#include <vector>

namespace sof::detail {

std::set<std::pair<int, int>> clones_used_elsewhere(const service_forest& forest,
                                                    const service_walk* self,
                                                    const service_walk* pending) {
  std::set<std::pair<int, int>> used;
  for (const auto& w : forest.walks) {
    if (&w == self) continue;
    for (const auto& v : w.visits) used.insert({v.node, v.clone});
  }
  if (pending && pending != self)
    for (const auto& v : pending->visits) used.insert({v.node, v.clone});
  return used;
}

void shorten_walk(service_walk& w, std::size_t from_pos, const sof_instance& inst,
                  path_provider& paths, service_forest& forest,
                  const std::set<std::pair<int, int>>& shared) {
  auto compute_anchors = [&]() {
    std::vector<std::size_t> anchors{from_pos};
    for (std::size_t p = from_pos + 1; p < w.visits.size(); ++p)
      if (w.visits[p].vnf) anchors.push_back(p);
    if (anchors.back() != w.visits.size() - 1) anchors.push_back(w.visits.size() - 1);
    return anchors;
  };
  if (w.visits.empty() || from_pos >= w.visits.size()) return;

  auto anchors = compute_anchors();
  for (std::size_t idx = 0; idx + 1 < anchors.size(); ++idx) {
    std::size_t a = anchors[idx], b = anchors[idx + 1];
    if (b <= a + 1) continue;
    bool touchable = true;
    double seg_cost = 0.0;
    for (std::size_t p = a; p < b; ++p) {
      seg_cost += inst.net.edge_cost(w.visits[p].node, w.visits[p + 1].node);
      if (p > a && shared.count({w.visits[p].node, w.visits[p].clone})) touchable = false;
    }
    if (!touchable) continue;
    auto sp = paths.query(w.visits[a].node, w.visits[b].node);
    if (!sp.reachable() || sp.cost >= seg_cost - 1e-12) continue;
    std::vector<visit> rebuilt(w.visits.begin(), w.visits.begin() + static_cast<long>(a) + 1);
    if (w.visits[a].node == w.visits[b].node) {
      // the detour returned to its start; keep one visit, keep the marker
      if (w.visits[b].vnf && !rebuilt.back().vnf) rebuilt.back().vnf = w.visits[b].vnf;
      rebuilt.insert(rebuilt.end(), w.visits.begin() + static_cast<long>(b) + 1,
                     w.visits.end());
    } else {
      for (std::size_t j = 1; j + 1 < sp.nodes.size(); ++j)
        rebuilt.push_back({sp.nodes[j], forest.fresh_clone(), std::nullopt});
      rebuilt.insert(rebuilt.end(), w.visits.begin() + static_cast<long>(b), w.visits.end());
    }
    w.visits = std::move(rebuilt);
    anchors = compute_anchors();
    idx = static_cast<std::size_t>(-1);  // rescan from the junction
  }
}

service_walk splice_walks(const service_walk& donor, std::size_t donor_pos,
                          const service_walk& taker, std::size_t taker_pos, int threshold) {
  service_walk out;
  out.visits.assign(donor.visits.begin(),
                    donor.visits.begin() + static_cast<long>(donor_pos) + 1);
  for (std::size_t p = taker_pos + 1; p < taker.visits.size(); ++p) {
    visit v = taker.visits[p];
    if (v.vnf && *v.vnf <= threshold) v.vnf = std::nullopt;
    out.visits.push_back(v);
  }
  return out;
}

}  // namespace sof::detail
