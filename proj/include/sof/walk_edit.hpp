#pragma once

#include <set>
#include <utility>

#include "sof/forest.hpp"
#include "sof/shortest_path.hpp"

namespace sof::detail {

// (node, clone) pairs appearing in walks other than self / pending
std::set<std::pair<int, int>> clones_used_elsewhere(const service_forest& forest,
                                                    const service_walk* self,
                                                    const service_walk* pending);

// Replace sub-walks between consecutive anchor visits (from_pos, the marked
// visits after it, and the final visit) by shortest paths when strictly
// cheaper. Segments whose interior clones appear in `shared` are left alone.
void shorten_walk(service_walk& w, std::size_t from_pos, const sof_instance& inst,
                  path_provider& paths, service_forest& forest,
                  const std::set<std::pair<int, int>>& shared);

// prefix of donor up to donor_pos (inclusive) + tail of taker after
// taker_pos, dropping tail markers <= threshold
service_walk splice_walks(const service_walk& donor, std::size_t donor_pos,
                          const service_walk& taker, std::size_t taker_pos, int threshold);

}  // namespace sof::detail
