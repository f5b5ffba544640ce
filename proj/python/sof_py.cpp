#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sof/baselines.hpp"
#include "sof/cost_model.hpp"
#include "sof/distsim.hpp"
#include "sof/errors.hpp"
#include "sof/fixtures.hpp"
#include "sof/ip_export.hpp"
#include "sof/oracle.hpp"
#include "sof/scenario.hpp"
#include "sof/sofda.hpp"
#include "sof/topology_gen.hpp"

namespace py = pybind11;
using namespace sof;

namespace {

py::dict forest_dict(const sof_instance& inst, const service_forest& forest) {
  py::dict out;
  py::list walks;
  for (const auto& w : forest.walks) {
    py::list visits;
    for (const auto& v : w.visits) {
      py::dict vd;
      vd["node"] = v.node;
      vd["clone"] = v.clone;
      if (v.vnf) vd["vnf"] = *v.vnf;
      visits.append(vd);
    }
    walks.append(visits);
  }
  out["walks"] = walks;
  py::list tree;
  for (const auto& [u, v] : forest.tree_edges) tree.append(py::make_tuple(u, v));
  out["tree_edges"] = tree;
  py::dict vms;
  for (const auto& [node, f] : forest.enabled_vms()) vms[py::int_(node)] = f;
  out["enabled_vms"] = vms;
  auto cost = forest_cost(inst, forest);
  out["setup"] = cost.setup;
  out["connection"] = cost.connection;
  out["total"] = cost.total;
  out["valid"] = validate_forest(inst, forest).ok;
  return out;
}

py::dict run_result(const sof_instance& inst, const sofda_result& res) {
  py::dict out = forest_dict(inst, res.forest);
  py::dict meta;
  for (const auto& [k, v] : res.metadata) meta[py::str(k)] = v;
  out["metadata"] = meta;
  return out;
}

}  // namespace

PYBIND11_MODULE(_sof, m) {
  m.doc() = "service overlay forest embedding for software-defined cloud networks";

  py::register_exception<infeasible_error>(m, "InfeasibleError");
  py::register_exception<input_error>(m, "InputError");

  py::class_<sof_instance>(m, "Instance")
      .def_property_readonly("sources",
                             [](const sof_instance& i) {
                               return std::vector<int>(i.sources.begin(), i.sources.end());
                             })
      .def_property_readonly("dests",
                             [](const sof_instance& i) {
                               return std::vector<int>(i.dests.begin(), i.dests.end());
                             })
      .def_readonly("chain_len", &sof_instance::chain_len)
      .def_property_readonly("node_count",
                             [](const sof_instance& i) { return i.net.node_count(); })
      .def_property_readonly("edge_count",
                             [](const sof_instance& i) { return i.net.edge_count(); })
      .def_property_readonly("vms", [](const sof_instance& i) { return i.net.vm_ids(); });

  m.def("load_fixture", &load_fixture, py::arg("name"),
        "bundled example instance: fig1, fig2 or fig3");
  m.def("fixture_names", &fixture_names);

  m.def(
      "parse_topology",
      [](const std::string& text) {
        std::istringstream in(text);
        topology_file tf = parse_topology(in);
        return make_instance(std::move(tf.net), tf.sources, tf.dests, tf.chain_len);
      },
      py::arg("text"), "parse the line-oriented or JSON topology format");
  m.def(
      "load_topology",
      [](const std::string& path) {
        topology_file tf = load_topology(path);
        return make_instance(std::move(tf.net), tf.sources, tf.dests, tf.chain_len);
      },
      py::arg("path"));

  m.def(
      "generate_instance",
      [](const std::string& preset, int sources, int dests, int vms, int chain,
         std::uint64_t seed) {
        generated_topology topo = generate_topology(preset_params(preset), seed);
        scenario_shape shape;
        shape.sources = sources;
        shape.dests = dests;
        shape.vms = vms;
        shape.chain_len = chain;
        return instantiate(topo, shape, seed);
      },
      py::arg("preset"), py::arg("sources") = 14, py::arg("dests") = 6, py::arg("vms") = 25,
      py::arg("chain") = 3, py::arg("seed") = 1);

  m.def(
      "element_cost",
      [](double load, double capacity) { return element_cost(load, capacity); },
      py::arg("load"), py::arg("capacity") = 1.0, "convex piecewise-linear load cost");

  m.def(
      "solve",
      [](const sof_instance& inst, const std::string& algorithm) {
        if (algorithm == "sofda") return run_result(inst, sofda(inst));
        if (algorithm == "sofda-ss")
          return run_result(inst, sofda_ss(inst, *inst.sources.begin()));
        if (algorithm == "st") return run_result(inst, run_st(inst));
        if (algorithm == "est") return run_result(inst, run_est(inst));
        if (algorithm == "enemp") return run_result(inst, run_enemp(inst));
        throw input_error("unknown algorithm '" + algorithm + "'");
      },
      py::arg("instance"), py::arg("algorithm") = "sofda");

  m.def(
      "oracle",
      [](const sof_instance& inst) {
        auto o = oracle_optimal(inst);
        py::dict out = forest_dict(inst, o.forest);
        out["relaxation_was_exact"] = o.relaxation_was_exact;
        return out;
      },
      py::arg("instance"), "exact optimum on guarded small instances");

  m.def(
      "export_ip",
      [](const sof_instance& inst, const std::string& path) {
        auto stats = export_ip(inst, path);
        py::dict out;
        for (const auto& [family, rows] : stats.constraint_rows) out[py::str(family)] = rows;
        out["variables"] = stats.variables;
        return out;
      },
      py::arg("instance"), py::arg("path"));

  m.def(
      "run_distributed",
      [](const sof_instance& inst, int domains, std::uint64_t seed) {
        auto parts = partition(inst.net, domains, seed);
        auto res = run_distributed_sofda(inst, parts);
        py::dict out = forest_dict(inst, res.result.forest);
        py::dict msgs;
        for (const auto& [kind, count] : res.stats.per_kind) msgs[py::str(kind)] = count;
        out["messages"] = msgs;
        out["messages_total"] = res.stats.total();
        out["leader"] = res.leader;
        return out;
      },
      py::arg("instance"), py::arg("domains") = 2, py::arg("seed") = 1);
}
