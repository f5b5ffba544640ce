#include "sof/topology_gen.hpp"

#include <algorithm>

#include "sof/cost_model.hpp"
#include "sof/errors.hpp"
#include "sof/rng.hpp"

namespace sof {

gen_params preset_params(const std::string& name) {
  if (name == "softlayer") return {27, 49, 17, topo_style::carrier};
  if (name == "cogent") return {190, 260, 40, topo_style::carrier};
  if (name == "inet") return {5000, 10000, 2000, topo_style::powerlaw};
  throw input_error("unknown preset '" + name + "' (softlayer|cogent|inet)");
}

generated_topology generate_topology(const gen_params& params, std::uint64_t seed) {
  if (params.nodes < 2) throw input_error("generator needs at least 2 nodes");
  if (params.edges < params.nodes - 1) throw input_error("edge budget below a spanning tree");
  rng r(seed);
  generated_topology out;

  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> seen;
  std::vector<int> endpoint_bag;  // preferential attachment by degree
  auto push_edge = [&](int u, int v) {
    if (u == v) return false;
    auto key = std::minmax(u, v);
    if (!seen.insert({key.first, key.second}).second) return false;
    edges.push_back({key.first, key.second});
    endpoint_bag.push_back(u);
    endpoint_bag.push_back(v);
    return true;
  };

  if (params.style == topo_style::carrier) {
    // backbone ring plus short local chords, geographic-mesh flavored
    std::vector<int> order(static_cast<std::size_t>(params.nodes));
    for (int i = 0; i < params.nodes; ++i) order[static_cast<std::size_t>(i)] = i;
    r.shuffle(order);
    auto at = [&](int i) {
      return order[static_cast<std::size_t>(((i % params.nodes) + params.nodes) % params.nodes)];
    };
    for (int i = 0; i < params.nodes; ++i) push_edge(at(i), at(i + 1));
    int tries = 0;
    while (static_cast<int>(edges.size()) < params.edges && tries < params.edges * 50) {
      int i = static_cast<int>(r.next_below(static_cast<std::uint64_t>(params.nodes)));
      int skip = 2 + static_cast<int>(r.next_below(7));
      push_edge(at(i), at(i + skip));
      ++tries;
    }
  } else {
    push_edge(0, 1);
    for (int v = 2; v < params.nodes; ++v) {
      int target = endpoint_bag[r.next_below(endpoint_bag.size())];
      push_edge(v, target);
    }
    int tries = 0;
    while (static_cast<int>(edges.size()) < params.edges && tries < params.edges * 50) {
      int u = static_cast<int>(r.next_below(static_cast<std::uint64_t>(params.nodes)));
      int v = endpoint_bag[r.next_below(endpoint_bag.size())];
      push_edge(u, v);
      ++tries;
    }
  }

  for (int id = 0; id < params.nodes; ++id) out.net.add_node(id, node_role::sw, 0.0);
  for (const auto& [u, v] : edges) {
    double load = r.next_double();
    out.net.add_edge(u, v, element_cost(load, 1.0), 1.0, load);
  }

  // data centers scattered across the topology
  std::vector<int> ids = out.net.node_ids();
  out.dc_nodes = r.sample(ids, static_cast<std::size_t>(params.data_centers));
  std::sort(out.dc_nodes.begin(), out.dc_nodes.end());
  return out;
}

sof_instance instantiate(const generated_topology& topo, const scenario_shape& shape,
                         std::uint64_t seed) {
  rng r(seed);
  sof_instance inst;
  inst.net = topo.net;
  inst.chain_len = shape.chain_len;

  // VMs live in small clusters at data-center sites: replica nodes hang off
  // the site by zero-cost links, so one site can host a whole chain
  const int per_site = 5;
  int sites_needed = (shape.vms + per_site - 1) / per_site;
  std::vector<int> sites = r.sample(topo.dc_nodes, static_cast<std::size_t>(sites_needed));
  if (static_cast<int>(sites.size()) < sites_needed)
    throw input_error("not enough data centers for the requested VM count");
  int next_id = inst.net.node_ids().back() + 1;
  for (int i = 0; i < shape.vms; ++i) {
    int site = sites[static_cast<std::size_t>(i % sites_needed)];
    double load = r.next_double();
    int vm = next_id++;
    inst.net.add_node(vm, node_role::vm, element_cost(load, 1.0) * shape.setup_multiplier,
                      1.0, load);
    inst.net.add_edge(site, vm, 0.0, 1.0, 0.0);
  }

  std::vector<int> rest;
  for (int id : topo.net.node_ids()) rest.push_back(id);
  if (static_cast<int>(rest.size()) < shape.sources + shape.dests)
    throw input_error("topology too small for the requested sources and destinations");
  r.shuffle(rest);
  for (int i = 0; i < shape.sources; ++i) inst.sources.insert(rest[static_cast<std::size_t>(i)]);
  for (int i = 0; i < shape.dests; ++i)
    inst.dests.insert(rest[static_cast<std::size_t>(shape.sources + i)]);
  return inst;
}

}  // namespace sof
