// sofc: service overlay forest experiment harness
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sof/baselines.hpp"
#include "sof/distsim.hpp"
#include "sof/errors.hpp"
#include "sof/dynamics.hpp"
#include "sof/fixtures.hpp"
#include "sof/ip_export.hpp"
#include "sof/kstroll.hpp"
#include "sof/rng.hpp"
#include "sof/oracle.hpp"
#include "sof/scenario.hpp"
#include "sof/serialize.hpp"
#include "sof/sofda.hpp"
#include "sof/topology_gen.hpp"

namespace {

struct instance_opts {
  std::string topology_file;
  std::string fixture;
  std::string generate;  // "n,e,dc" or preset name
  int sources = 14;
  int dests = 6;
  int vms = 25;
  int chain = 3;
  std::uint64_t seed = 1;
};

void add_instance_flags(CLI::App* cmd, instance_opts& io) {
  cmd->add_option("--topology", io.topology_file, "topology file (text or JSON)");
  cmd->add_option("--fixture", io.fixture, "bundled fixture name (fig1|fig2|fig3)");
  cmd->add_option("--generate", io.generate,
                  "generator preset (softlayer|cogent|inet) or n,e,dc counts");
  cmd->add_option("--sources", io.sources, "number of sources (generated topologies)");
  cmd->add_option("--dests", io.dests, "number of destinations");
  cmd->add_option("--vms", io.vms, "number of VMs");
  cmd->add_option("--chain", io.chain, "service chain length");
  cmd->add_option("--seed", io.seed, "random seed");
}

sof::gen_params parse_generate(const std::string& text) {
  if (text.find(',') == std::string::npos) return sof::preset_params(text);
  sof::gen_params p;
  if (std::sscanf(text.c_str(), "%d,%d,%d", &p.nodes, &p.edges, &p.data_centers) != 3)
    throw sof::input_error("--generate expects a preset name or n,e,dc");
  return p;
}

sof::sof_instance build_instance(const instance_opts& io) {
  if (!io.fixture.empty()) return sof::load_fixture(io.fixture);
  if (!io.topology_file.empty()) {
    sof::topology_file tf = sof::load_topology(io.topology_file);
    if (tf.sources.empty() || tf.dests.empty() || tf.chain_len < 1)
      throw sof::input_error("topology file must declare source, dest and chain lines");
    return sof::make_instance(std::move(tf.net), tf.sources, tf.dests, tf.chain_len);
  }
  std::string gen = io.generate.empty() ? "softlayer" : io.generate;
  sof::generated_topology topo = sof::generate_topology(parse_generate(gen), io.seed);
  sof::scenario_shape shape;
  shape.sources = io.sources;
  shape.dests = io.dests;
  shape.vms = io.vms;
  shape.chain_len = io.chain;
  return sof::instantiate(topo, shape, io.seed);
}

void emit_rows(const std::vector<sof::result_row>& rows, const std::string& out_path,
               bool json) {
  if (out_path.empty()) {
    if (json)
      sof::write_json(rows, std::cout);
    else
      sof::write_csv(rows, std::cout);
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw sof::input_error("cannot write " + out_path);
  if (json)
    sof::write_json(rows, f);
  else
    sof::write_csv(rows, f);
}

nlohmann::json forest_json(const sof::sof_instance& inst, const sof::service_forest& f) {
  return nlohmann::json::parse(sof::forest_to_json(inst, f));
}

int run(int argc, char** argv) {
  CLI::App app{"service overlay forest embedding toolkit"};
  app.require_subcommand(1);

  instance_opts io;
  std::string algorithm = "sofda";
  std::string out_path;
  bool dump_forest = false;

  auto* solve = app.add_subcommand("solve", "solve one instance");
  add_instance_flags(solve, io);
  solve->add_option("--algorithm", algorithm,
                    "sofda|sofda-ss|st|est|est-single|enemp|enemp-single|oracle");
  solve->add_option("--out", out_path, "write JSON result here (stdout otherwise)");
  solve->add_flag("--dump-forest", dump_forest, "include the forest structure");

  instance_opts sweep_io;
  std::string sweep_axis = "sources";
  std::string sweep_values = "2,8,14,20,26";
  std::string sweep_algorithms = "sofda,est,enemp,st";
  std::string sweep_preset = "softlayer";
  std::string sweep_out;
  int sweep_seeds = 5;
  int sweep_workers = 1;
  auto* sweep = app.add_subcommand("sweep", "one-time deployment sweep");
  sweep->add_option("--axis", sweep_axis, "sources|dests|vms|chain|setup_mult");
  sweep->add_option("--values", sweep_values, "comma separated axis values");
  sweep->add_option("--algorithms", sweep_algorithms, "comma separated list");
  sweep->add_option("--generate", sweep_preset, "preset or n,e,dc");
  sweep->add_option("--seeds", sweep_seeds, "number of seeds");
  sweep->add_option("--workers", sweep_workers, "worker threads");
  sweep->add_option("--sources", sweep_io.sources, "default sources");
  sweep->add_option("--dests", sweep_io.dests, "default destinations");
  sweep->add_option("--vms", sweep_io.vms, "default VMs");
  sweep->add_option("--chain", sweep_io.chain, "default chain length");
  sweep->add_option("--out", sweep_out, "CSV output path (stdout otherwise)");

  std::string online_algorithms = "sofda,est,enemp";
  std::string online_preset = "softlayer";
  std::string online_out;
  int online_requests = 10;
  int online_seeds = 3;
  auto* online = app.add_subcommand("online", "sequential request stream");
  online->add_option("--algorithms", online_algorithms, "comma separated list");
  online->add_option("--generate", online_preset, "preset or n,e,dc");
  online->add_option("--requests", online_requests, "number of requests");
  online->add_option("--seeds", online_seeds, "number of seeds");
  online->add_option("--sources", sweep_io.sources, "mean sources per request");
  online->add_option("--dests", sweep_io.dests, "mean destinations per request");
  online->add_option("--vms", sweep_io.vms, "VM count");
  online->add_option("--chain", sweep_io.chain, "chain length");
  online->add_option("--out", online_out, "CSV output path");

  instance_opts dist_io;
  int domains_k = 2;
  std::uint64_t dist_seed = 1;
  std::string dist_out;
  auto* dist = app.add_subcommand("distsim", "multi-controller simulation");
  add_instance_flags(dist, dist_io);
  dist->add_option("--domains", domains_k, "number of controller domains");
  dist->add_option("--partition-seed", dist_seed, "partition seed");
  dist->add_option("--out", dist_out, "JSON output path");

  instance_opts ip_io;
  std::string ip_out = "model.lp";
  auto* exip = app.add_subcommand("export-ip", "write the integer program as an LP file");
  add_instance_flags(exip, ip_io);
  exip->add_option("--out", ip_out, "LP file path");

  instance_opts oracle_io;
  std::string oracle_out;
  auto* orc = app.add_subcommand("oracle", "exact optimum on a small instance");
  add_instance_flags(orc, oracle_io);
  orc->add_option("--out", oracle_out, "JSON output path");

  std::string fixture_name = "fig1";
  std::string fixture_out;
  auto* fix = app.add_subcommand("fixture", "write a bundled fixture as a topology file");
  fix->add_option("name", fixture_name, "fig1|fig2|fig3");
  fix->add_option("--out", fixture_out, "output path (stdout otherwise)");

  instance_opts ks_io;
  int ks_last_vm = -1;
  bool ks_source_cost = false;
  auto* ks = app.add_subcommand("kstroll", "dump a metric instance as JSON");
  add_instance_flags(ks, ks_io);
  ks->add_option("--last-vm", ks_last_vm, "designated last VM")->required();
  ks->add_flag("--source-cost", ks_source_cost, "use the source-cost edge table");

  instance_opts ev_io;
  std::string ev_script;
  std::string ev_algorithm = "sofda";
  double ev_demand = 0.05;
  std::uint64_t ev_seed = 1;
  auto* ev = app.add_subcommand("events", "replay a dynamic event script on a deployment");
  add_instance_flags(ev, ev_io);
  ev->add_option("--script", ev_script, "event script file")->required();
  ev->add_option("--algorithm", ev_algorithm, "algorithm for (re)deployments");
  ev->add_option("--demand", ev_demand, "bandwidth demand per request");
  ev->add_option("--event-seed", ev_seed, "seed for request sampling");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    sof::sof_instance inst = build_instance(io);
    sof::result_row row = sof::solve_one(inst, algorithm);
    if (row.status != "ok") {
      std::cerr << row.status << "\n";
      return row.status.rfind("infeasible", 0) == 0 ? 2 : 3;
    }
    nlohmann::json j;
    j["algorithm"] = algorithm;
    j["setup"] = row.setup_cost;
    j["connection"] = row.connection_cost;
    j["total"] = row.total_cost;
    j["runtime_ms"] = row.runtime_ms;
    j["used_vms"] = row.used_vms;
    if (dump_forest) {
      sof::sofda_result full;
      if (algorithm == "oracle") {
        auto o = sof::oracle_optimal(inst);
        full.forest = std::move(o.forest);
      } else if (algorithm == "sofda-ss") {
        full = sof::sofda_ss(inst, *inst.sources.begin());
      } else if (algorithm == "sofda") {
        full = sof::sofda(inst);
      } else if (algorithm == "st") {
        full = sof::run_st(inst);
      } else if (algorithm == "est" || algorithm == "est-single") {
        full = sof::run_est(inst, algorithm == "est");
      } else {
        full = sof::run_enemp(inst, algorithm == "enemp");
      }
      j["forest"] = forest_json(inst, full.forest);
    }
    if (out_path.empty())
      std::cout << j.dump(1) << "\n";
    else {
      std::ofstream f(out_path);
      f << j.dump(1) << "\n";
    }
    return 0;
  }

  auto split_list = [](const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else
        cur.push_back(c);
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };

  if (sweep->parsed()) {
    sof::scenario sc;
    sc.preset = sweep_preset;
    if (sweep_preset.find(',') != std::string::npos) {
      sc.custom_topology = parse_generate(sweep_preset);
    }
    sc.sweep_axis = sweep_axis;
    for (const auto& v : split_list(sweep_values)) sc.axis_values.push_back(std::stod(v));
    sc.algorithms = split_list(sweep_algorithms);
    sc.defaults.sources = sweep_io.sources;
    sc.defaults.dests = sweep_io.dests;
    sc.defaults.vms = sweep_io.vms;
    sc.defaults.chain_len = sweep_io.chain;
    sc.workers = sweep_workers;
    sc.seeds.clear();
    for (int s = 1; s <= sweep_seeds; ++s) sc.seeds.push_back(static_cast<std::uint64_t>(s));
    auto rows = sof::run_scenario(sc);
    emit_rows(rows, sweep_out, false);
    return 0;
  }

  if (online->parsed()) {
    sof::scenario sc;
    sc.online = true;
    sc.preset = online_preset;
    if (online_preset.find(',') != std::string::npos)
      sc.custom_topology = parse_generate(online_preset);
    sc.online_requests = online_requests;
    sc.algorithms = split_list(online_algorithms);
    sc.defaults.sources = sweep_io.sources;
    sc.defaults.dests = sweep_io.dests;
    sc.defaults.vms = sweep_io.vms;
    sc.defaults.chain_len = sweep_io.chain;
    sc.seeds.clear();
    for (int s = 1; s <= online_seeds; ++s) sc.seeds.push_back(static_cast<std::uint64_t>(s));
    auto rows = sof::run_scenario(sc);
    emit_rows(rows, online_out, false);
    return 0;
  }

  if (dist->parsed()) {
    sof::sof_instance inst = build_instance(dist_io);
    auto domains = sof::partition(inst.net, domains_k, dist_seed);
    auto res = sof::run_distributed_sofda(inst, domains);
    nlohmann::json j;
    j["domains"] = domains_k;
    j["leader"] = res.leader;
    j["total"] = res.result.cost.total;
    j["rounds"] = res.stats.rounds;
    nlohmann::json msgs = nlohmann::json::object();
    for (const auto& [kind, count] : res.stats.per_kind) msgs[kind] = count;
    j["messages"] = msgs;
    j["messages_total"] = res.stats.total();
    if (dist_out.empty())
      std::cout << j.dump(1) << "\n";
    else {
      std::ofstream f(dist_out);
      f << j.dump(1) << "\n";
    }
    return 0;
  }

  if (exip->parsed()) {
    sof::sof_instance inst = build_instance(ip_io);
    auto stats = sof::export_ip(inst, ip_out);
    std::cout << "wrote " << ip_out << " (" << stats.rows() << " rows, " << stats.variables
              << " binaries) and " << ip_out << ".manifest.json\n";
    return 0;
  }

  if (orc->parsed()) {
    sof::sof_instance inst = build_instance(oracle_io);
    auto o = sof::oracle_optimal(inst);
    nlohmann::json j;
    j["total"] = o.cost.total;
    j["setup"] = o.cost.setup;
    j["connection"] = o.cost.connection;
    j["relaxation_was_exact"] = o.relaxation_was_exact;
    j["forest"] = forest_json(inst, o.forest);
    if (oracle_out.empty())
      std::cout << j.dump(1) << "\n";
    else {
      std::ofstream f(oracle_out);
      f << j.dump(1) << "\n";
    }
    return 0;
  }

  if (fix->parsed()) {
    sof::sof_instance inst = sof::load_fixture(fixture_name);
    sof::topology_file tf;
    tf.net = inst.net;
    tf.sources.assign(inst.sources.begin(), inst.sources.end());
    tf.dests.assign(inst.dests.begin(), inst.dests.end());
    tf.chain_len = inst.chain_len;
    if (fixture_out.empty())
      sof::write_topology(tf, std::cout);
    else {
      std::ofstream f(fixture_out);
      sof::write_topology(tf, f);
    }
    return 0;
  }

  if (ev->parsed()) {
    sof::sof_instance inst = build_instance(ev_io);
    // topologies without capacities cannot refresh costs; give them unit
    // capacity and treat the current cost as the ambient load level
    for (auto& e : inst.net.edges_mutable())
      if (!e.capacity) {
        e.capacity = 1.0;
        if (!e.load) e.load = 0.0;
      }
    for (int id : inst.net.node_ids()) {
      auto& n = inst.net.node_mutable(id);
      if (n.role == sof::node_role::vm && !n.capacity) {
        n.capacity = 1.0;
        if (!n.load) n.load = 0.0;
      }
    }
    sof::rng request_rng(ev_seed);
    auto solve_forest = [&](const sof::sof_instance& in) {
      if (ev_algorithm == "sofda") return sof::sofda(in).forest;
      if (ev_algorithm == "est") return sof::run_est(in).forest;
      if (ev_algorithm == "enemp") return sof::run_enemp(in).forest;
      if (ev_algorithm == "st") return sof::run_st(in).forest;
      throw sof::input_error("events: unsupported algorithm '" + ev_algorithm + "'");
    };
    sof::deployment_state state(inst, ev_demand);
    state.deploy(solve_forest(inst));

    std::ifstream script(ev_script);
    if (!script) throw sof::input_error("cannot open script " + ev_script);
    std::string line;
    int lineno = 0;
    double accumulated = sof::forest_cost(state.instance(), state.forest()).total;
    while (std::getline(script, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string op;
      if (!(ls >> op)) continue;
      auto fail = [&](const std::string& msg) {
        throw sof::input_error("script line " + std::to_string(lineno) + ": " + msg);
      };
      try {
        if (op == "join") {
          int v;
          if (!(ls >> v)) fail("join <node>");
          state.handle_join(v);
        } else if (op == "leave") {
          int v;
          if (!(ls >> v)) fail("leave <node>");
          state.handle_leave(v);
        } else if (op == "insert") {
          int j;
          if (!(ls >> j)) fail("insert <j>");
          state.handle_vnf_insert(j);
        } else if (op == "delete") {
          int j;
          if (!(ls >> j)) fail("delete <j>");
          state.handle_vnf_delete(j);
        } else if (op == "congest") {
          std::string what;
          if (!(ls >> what)) fail("congest edge|vm ...");
          if (what == "edge") {
            int u, v;
            double load;
            if (!(ls >> u >> v >> load)) fail("congest edge <u> <v> <load>");
            state.handle_congest_edge(u, v, load);
          } else if (what == "vm") {
            int v;
            double load;
            if (!(ls >> v >> load)) fail("congest vm <v> <load>");
            state.handle_congest_vm(v, load);
          } else {
            fail("congest edge|vm ...");
          }
        } else if (op == "request") {
          double demand;
          int k_dests, k_sources;
          if (!(ls >> demand >> k_dests >> k_sources))
            fail("request <demand> <k-dests> <k-sources>");
          // fold the session loads into the network and start a new
          // deployment against the refreshed costs
          sof::sof_instance next;
          next.net = state.refreshed_costs();
          for (auto& e : next.net.edges_mutable()) {
            auto it = state.deployed_edge_loads().find(
                {std::min(e.u, e.v), std::max(e.u, e.v)});
            double extra = it == state.deployed_edge_loads().end() ? 0.0 : it->second;
            e.load = e.load.value_or(0.0) + extra;
          }
          next.chain_len = state.instance().chain_len > 0 ? state.instance().chain_len : 1;
          std::vector<int> pool;
          for (int id : next.net.node_ids())
            if (next.net.node(id).role == sof::node_role::sw) pool.push_back(id);
          request_rng.shuffle(pool);
          if (static_cast<int>(pool.size()) < k_dests + k_sources)
            fail("not enough nodes for the request");
          for (int i = 0; i < k_sources; ++i)
            next.sources.insert(pool[static_cast<std::size_t>(i)]);
          for (int i = 0; i < k_dests; ++i)
            next.dests.insert(pool[static_cast<std::size_t>(k_sources + i)]);
          state = sof::deployment_state(next, demand);
          state.deploy(solve_forest(next));
        } else {
          fail("unknown event '" + op + "'");
        }
      } catch (const sof::infeasible_error& e) {
        std::cout << "line " << lineno << " (" << op << "): refused, " << e.what() << "\n";
        continue;
      }
      auto cost = sof::forest_cost(state.instance(), state.forest());
      bool ok = sof::validate_forest(state.instance(), state.forest()).ok;
      if (op == "request") accumulated += cost.total;
      std::cout << "line " << lineno << " (" << op << "): total " << cost.total
                << (ok ? "" : " INVALID") << "\n";
      if (!ok) return 3;
    }
    auto final_cost = sof::forest_cost(state.instance(), state.forest());
    nlohmann::json j;
    j["final_total"] = final_cost.total;
    j["accumulated_request_cost"] = accumulated;
    j["events"] = nlohmann::json::array();
    for (const auto& evlog : state.log()) {
      nlohmann::json je;
      je["kind"] = evlog.kind;
      je["detail"] = evlog.detail;
      j["events"].push_back(je);
    }
    std::cout << j.dump(1) << "\n";
    return 0;
  }

  if (ks->parsed()) {
    sof::sof_instance inst = build_instance(ks_io);
    int source = *inst.sources.begin();
    auto mi = sof::build_metric_instance(inst, source, ks_last_vm,
                                         ks_source_cost ? sof::metric_variant::source_cost
                                                        : sof::metric_variant::plain);
    nlohmann::json j;
    j["source"] = mi.source;
    j["last_vm"] = mi.last_vm;
    j["nodes"] = mi.nodes;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [key, cost] : mi.costs) {
      nlohmann::json e;
      e["u"] = key.first;
      e["v"] = key.second;
      e["cost"] = cost;
      e["path"] = mi.paths.at(key);
      edges.push_back(e);
    }
    j["edges"] = edges;
    std::cout << j.dump(1) << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sof::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const sof::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
