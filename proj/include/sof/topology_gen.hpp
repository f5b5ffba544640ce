#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sof/instance.hpp"

namespace sof {

enum class topo_style {
  carrier,   // ring plus random chords, high diameter like backbone maps
  powerlaw,  // preferential attachment plus extra links
};

struct gen_params {
  int nodes = 0;
  int edges = 0;
  int data_centers = 0;
  topo_style style = topo_style::powerlaw;
};

// inter-data-center presets by size class, plus the large synthetic net
gen_params preset_params(const std::string& name);  // softlayer | cogent | inet

struct generated_topology {
  network net;                // all switches; link capacity/load populated
  std::vector<int> dc_nodes;  // data-center attachment points
};

// Preferential-attachment tree plus random extra links up to the edge
// budget. Link loads are uniform in (0,1) on unit capacity and connection
// costs come from the convex load cost.
generated_topology generate_topology(const gen_params& params, std::uint64_t seed);

struct scenario_shape {
  int sources = 14;
  int dests = 6;
  int vms = 25;
  int chain_len = 3;
  double setup_multiplier = 1.0;
};

// Places VMs next to data centers, prices them from a random host
// utilization and samples disjoint source/destination sets.
sof_instance instantiate(const generated_topology& topo, const scenario_shape& shape,
                         std::uint64_t seed);

}  // namespace sof
