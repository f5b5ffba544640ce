#pragma once

#include <string>
#include <vector>

#include "sof/instance.hpp"

namespace sof {

// Bundled example instances used across the test suite and the CLI:
//   fig1 - two clusters split by one expensive link; a forest of two small
//          trees beats any single chain-plus-tree by roughly 60%
//   fig2 - six-VM network where the optimal tree runs both VNFs on the two
//          cheap VMs
//   fig3 - single-source chain-of-five instance with two far destinations
sof_instance load_fixture(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace sof
