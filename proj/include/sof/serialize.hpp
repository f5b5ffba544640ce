#pragma once

#include <string>

#include "sof/forest.hpp"

namespace sof {

// Forest dump format shared by the CLI and the python module: walks as
// visit lists with clone ids and VNF marks, tree edges as pairs, plus the
// cost breakdown of the instance it was produced for.
std::string forest_to_json(const sof_instance& inst, const service_forest& forest);
service_forest forest_from_json(const std::string& text);

}  // namespace sof
