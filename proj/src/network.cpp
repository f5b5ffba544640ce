#include "sof/network.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sof/errors.hpp"

namespace sof {

int network::add_node(int id, node_role role, double setup_cost,
                      std::optional<double> capacity, std::optional<double> load) {
  if (index_.count(id)) throw input_error("duplicate node id " + std::to_string(id));
  if (setup_cost < 0) throw input_error("negative setup cost at node " + std::to_string(id));
  if (role == node_role::sw && setup_cost != 0)
    throw input_error("switch " + std::to_string(id) + " must have setup cost 0");
  if (capacity && *capacity <= 0)
    throw input_error("capacity must be positive at node " + std::to_string(id));
  if (load && *load < 0) throw input_error("negative load at node " + std::to_string(id));
  index_[id] = static_cast<int>(nodes_.size());
  nodes_.push_back({id, role, setup_cost, capacity, load});
  adj_[id];
  return index_[id];
}

int network::add_edge(int u, int v, double connection_cost,
                      std::optional<double> capacity, std::optional<double> load) {
  if (!has_node(u) || !has_node(v))
    throw input_error("edge references unknown node " + std::to_string(has_node(u) ? v : u));
  if (u == v) throw input_error("self loop at node " + std::to_string(u));
  if (connection_cost < 0) throw input_error("negative connection cost");
  if (has_edge(u, v)) throw input_error("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
  if (capacity && *capacity <= 0) throw input_error("edge capacity must be positive");
  if (load && *load < 0) throw input_error("negative edge load");
  int idx = static_cast<int>(edges_.size());
  edges_.push_back({std::min(u, v), std::max(u, v), connection_cost, capacity, load});
  auto insert_sorted = [&](int from, int to) {
    auto& lst = adj_[from];
    adj_entry e{to, idx};
    lst.insert(std::lower_bound(lst.begin(), lst.end(), e,
                                [](const adj_entry& a, const adj_entry& b) { return a.to < b.to; }),
               e);
  };
  insert_sorted(u, v);
  insert_sorted(v, u);
  return idx;
}

bool network::has_edge(int u, int v) const { return edge_index(u, v) >= 0; }

int network::edge_index(int u, int v) const {
  auto it = adj_.find(u);
  if (it == adj_.end()) return -1;
  for (const auto& e : it->second)
    if (e.to == v) return e.edge;
  return -1;
}

const node_info& network::node(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw input_error("unknown node " + std::to_string(id));
  return nodes_[it->second];
}

node_info& network::node_mutable(int id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw input_error("unknown node " + std::to_string(id));
  return nodes_[it->second];
}

const std::vector<network::adj_entry>& network::neighbors(int id) const {
  auto it = adj_.find(id);
  if (it == adj_.end()) throw input_error("unknown node " + std::to_string(id));
  return it->second;
}

std::vector<int> network::node_ids() const {
  std::vector<int> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, _] : index_) ids.push_back(id);
  return ids;
}

std::vector<int> network::vm_ids() const {
  std::vector<int> ids;
  for (const auto& [id, pos] : index_)
    if (nodes_[pos].role == node_role::vm) ids.push_back(id);
  return ids;
}

double network::edge_cost(int u, int v) const {
  int idx = edge_index(u, v);
  if (idx < 0)
    throw input_error("no edge " + std::to_string(u) + "-" + std::to_string(v));
  return edges_[idx].connection_cost;
}

void network::validate() const {
  for (const auto& n : nodes_) {
    if (n.setup_cost < 0) throw input_error("negative setup cost");
    if (n.role == node_role::sw && n.setup_cost != 0)
      throw input_error("switch with nonzero setup cost: " + std::to_string(n.id));
    if (n.capacity && *n.capacity <= 0) throw input_error("nonpositive capacity");
    if (n.load && *n.load < 0) throw input_error("negative load");
  }
  for (const auto& e : edges_) {
    if (e.connection_cost < 0) throw input_error("negative connection cost");
  }
}

namespace {

topology_file parse_topology_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  topology_file t;
  for (const auto& n : j.at("nodes")) {
    std::string role = n.value("role", "switch");
    if (role != "vm" && role != "switch") throw input_error("bad node role: " + role);
    std::optional<double> cap, load;
    if (n.contains("capacity")) cap = n["capacity"].get<double>();
    if (n.contains("load")) load = n["load"].get<double>();
    t.net.add_node(n.at("id").get<int>(), role == "vm" ? node_role::vm : node_role::sw,
                   n.value("setup_cost", 0.0), cap, load);
  }
  for (const auto& e : j.at("edges")) {
    std::optional<double> cap, load;
    if (e.contains("capacity")) cap = e["capacity"].get<double>();
    if (e.contains("load")) load = e["load"].get<double>();
    t.net.add_edge(e.at("u").get<int>(), e.at("v").get<int>(),
                   e.at("connection_cost").get<double>(), cap, load);
  }
  t.sources = j.value("sources", std::vector<int>{});
  t.dests = j.value("dests", std::vector<int>{});
  t.chain_len = j.value("chain", 0);
  return t;
}

}  // namespace

topology_file parse_topology(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_topology_json(text);

  topology_file t;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string directive;
    if (!(ls >> directive)) continue;
    auto fail = [&](const std::string& msg) {
      throw input_error("topology line " + std::to_string(lineno) + ": " + msg);
    };
    if (directive == "node") {
      int id;
      std::string role;
      double setup;
      if (!(ls >> id >> role >> setup)) fail("expected: node <id> <vm|switch> <setup_cost>");
      if (role != "vm" && role != "switch") fail("bad role '" + role + "'");
      std::optional<double> cap, load;
      double c, l;
      if (ls >> c >> l) {
        cap = c;
        load = l;
      }
      t.net.add_node(id, role == "vm" ? node_role::vm : node_role::sw, setup, cap, load);
    } else if (directive == "edge") {
      int u, v;
      double cost;
      if (!(ls >> u >> v >> cost)) fail("expected: edge <u> <v> <connection_cost>");
      std::optional<double> cap, load;
      double c, l;
      if (ls >> c >> l) {
        cap = c;
        load = l;
      }
      t.net.add_edge(u, v, cost, cap, load);
    } else if (directive == "source") {
      int id;
      if (!(ls >> id)) fail("expected: source <id>");
      t.sources.push_back(id);
    } else if (directive == "dest") {
      int id;
      if (!(ls >> id)) fail("expected: dest <id>");
      t.dests.push_back(id);
    } else if (directive == "chain") {
      if (!(ls >> t.chain_len) || t.chain_len < 1) fail("expected: chain <positive len>");
    } else {
      fail("unknown directive '" + directive + "'");
    }
  }
  return t;
}

topology_file load_topology(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw input_error("cannot open topology file: " + path);
  return parse_topology(f);
}

void write_topology(const topology_file& t, std::ostream& out) {
  for (int id : t.net.node_ids()) {
    const auto& n = t.net.node(id);
    out << "node " << id << ' ' << (n.role == node_role::vm ? "vm" : "switch") << ' '
        << n.setup_cost;
    if (n.capacity && n.load) out << ' ' << *n.capacity << ' ' << *n.load;
    out << '\n';
  }
  for (const auto& e : t.net.edges()) {
    out << "edge " << e.u << ' ' << e.v << ' ' << e.connection_cost;
    if (e.capacity && e.load) out << ' ' << *e.capacity << ' ' << *e.load;
    out << '\n';
  }
  for (int s : t.sources) out << "source " << s << '\n';
  for (int d : t.dests) out << "dest " << d << '\n';
  if (t.chain_len > 0) out << "chain " << t.chain_len << '\n';
}

}  // namespace sof
