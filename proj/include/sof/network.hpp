#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sof {

enum class node_role { vm, sw };

struct node_info {
  int id = -1;
  node_role role = node_role::sw;
  double setup_cost = 0.0;  // 0 for switches
  std::optional<double> capacity;
  std::optional<double> load;
};

struct edge_info {
  int u = -1;
  int v = -1;
  double connection_cost = 0.0;
  std::optional<double> capacity;
  std::optional<double> load;
};

// Weighted undirected graph with node roles. Node ids are arbitrary ints;
// adjacency is kept sorted by neighbor id so traversals are deterministic.
class network {
 public:
  struct adj_entry {
    int to;
    int edge;  // index into edges()
  };

  int add_node(int id, node_role role, double setup_cost,
               std::optional<double> capacity = std::nullopt,
               std::optional<double> load = std::nullopt);
  int add_edge(int u, int v, double connection_cost,
               std::optional<double> capacity = std::nullopt,
               std::optional<double> load = std::nullopt);

  bool has_node(int id) const { return index_.count(id) > 0; }
  bool has_edge(int u, int v) const;
  int edge_index(int u, int v) const;  // -1 if absent

  const node_info& node(int id) const;
  node_info& node_mutable(int id);
  const std::vector<node_info>& nodes() const { return nodes_; }
  const std::vector<edge_info>& edges() const { return edges_; }
  std::vector<edge_info>& edges_mutable() { return edges_; }
  const std::vector<adj_entry>& neighbors(int id) const;

  std::vector<int> node_ids() const;  // sorted
  std::vector<int> vm_ids() const;    // sorted

  double node_cost(int id) const { return node(id).setup_cost; }
  double edge_cost(int u, int v) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  void validate() const;  // invariant check, throws input_error

 private:
  std::vector<node_info> nodes_;
  std::vector<edge_info> edges_;
  std::map<int, int> index_;                    // id -> position in nodes_
  std::map<int, std::vector<adj_entry>> adj_;   // id -> sorted neighbors
};

// Topology file format, line oriented:
//   node <id> <vm|switch> <setup_cost> [capacity load]
//   edge <u> <v> <connection_cost> [capacity load]
//   source <id>
//   dest <id>
//   chain <len>
// '#' starts a comment. Unknown directives are rejected. A JSON document
// with the same fields (nodes/edges/sources/dests/chain) is also accepted.
struct topology_file {
  network net;
  std::vector<int> sources;
  std::vector<int> dests;
  int chain_len = 0;
};

topology_file parse_topology(std::istream& in);
topology_file load_topology(const std::string& path);
void write_topology(const topology_file& t, std::ostream& out);

}  // namespace sof
