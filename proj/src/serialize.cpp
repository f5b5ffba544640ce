#include "sof/serialize.hpp"

#include "json.hpp"
#include "sof/errors.hpp"

namespace sof {

std::string forest_to_json(const sof_instance& inst, const service_forest& forest) {
  nlohmann::json j;
  j["walks"] = nlohmann::json::array();
  for (const auto& w : forest.walks) {
    nlohmann::json wj = nlohmann::json::array();
    for (const auto& v : w.visits) {
      nlohmann::json vj;
      vj["node"] = v.node;
      vj["clone"] = v.clone;
      if (v.vnf) vj["vnf"] = *v.vnf;
      wj.push_back(vj);
    }
    j["walks"].push_back(wj);
  }
  j["tree_edges"] = nlohmann::json::array();
  for (const auto& [u, v] : forest.tree_edges) j["tree_edges"].push_back({u, v});
  auto cost = forest_cost(inst, forest);
  j["setup_cost"] = cost.setup;
  j["connection_cost"] = cost.connection;
  j["total_cost"] = cost.total;
  nlohmann::json vm = nlohmann::json::object();
  for (const auto& [node, fidx] : forest.enabled_vms()) vm[std::to_string(node)] = fidx;
  j["enabled_vms"] = vm;
  return j.dump(1);
}

service_forest forest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("forest JSON: ") + e.what());
  }
  service_forest forest;
  for (const auto& wj : j.at("walks")) {
    service_walk w;
    for (const auto& vj : wj) {
      visit v;
      v.node = vj.at("node").get<int>();
      v.clone = vj.value("clone", -1);
      if (vj.contains("vnf")) v.vnf = vj["vnf"].get<int>();
      w.visits.push_back(v);
    }
    forest.add_walk(std::move(w));
  }
  for (const auto& ej : j.at("tree_edges"))
    forest.add_tree_edge(ej.at(0).get<int>(), ej.at(1).get<int>());
  return forest;
}

}  // namespace sof
