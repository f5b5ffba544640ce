#include "sof/scenario.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "sof/baselines.hpp"
#include "sof/cost_model.hpp"
#include "sof/errors.hpp"
#include "sof/oracle.hpp"
#include "sof/rng.hpp"
#include "sof/sofda.hpp"

namespace sof {

namespace {

std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  (void)ec;
  return std::string(buf, p);
}

sofda_result dispatch(const sof_instance& inst, const std::string& algorithm) {
  if (algorithm == "sofda") {
    // single-source requests take the two-phase algorithm directly
    if (inst.sources.size() == 1) return sofda_ss(inst, *inst.sources.begin());
    return sofda(inst);
  }
  if (algorithm == "sofda-ss") {
    if (inst.sources.size() != 1)
      throw input_error("sofda-ss needs exactly one source; use sofda");
    return sofda_ss(inst, *inst.sources.begin());
  }
  if (algorithm == "st") return run_st(inst);
  if (algorithm == "est") return run_est(inst);
  if (algorithm == "est-single") return run_est(inst, false);
  if (algorithm == "enemp") return run_enemp(inst);
  if (algorithm == "enemp-single") return run_enemp(inst, false);
  if (algorithm == "oracle") {
    auto o = oracle_optimal(inst);
    sofda_result r;
    r.forest = std::move(o.forest);
    r.cost = o.cost;
    r.metadata["algorithm"] = "oracle";
    return r;
  }
  throw input_error("unknown algorithm '" + algorithm + "'");
}

scenario_shape shape_at(const scenario& sc, double value) {
  scenario_shape s = sc.defaults;
  if (sc.sweep_axis == "sources") s.sources = static_cast<int>(value);
  else if (sc.sweep_axis == "dests") s.dests = static_cast<int>(value);
  else if (sc.sweep_axis == "vms") s.vms = static_cast<int>(value);
  else if (sc.sweep_axis == "chain") s.chain_len = static_cast<int>(value);
  else if (sc.sweep_axis == "setup_mult") s.setup_multiplier = value;
  else if (!sc.sweep_axis.empty()) throw input_error("unknown sweep axis " + sc.sweep_axis);
  return s;
}

result_row run_point(const sof_instance& inst, const std::string& algorithm) {
  result_row row;
  row.algorithm = algorithm;
  auto t0 = std::chrono::steady_clock::now();
  try {
    sofda_result r = dispatch(inst, algorithm);
    row.setup_cost = r.cost.setup;
    row.connection_cost = r.cost.connection;
    row.total_cost = r.cost.total;
    row.used_vms = static_cast<int>(r.forest.enabled_vms().size());
    row.status = "ok";
  } catch (const infeasible_error& e) {
    row.status = std::string("infeasible: ") + e.what();
  } catch (const input_error& e) {
    row.status = std::string("error: ") + e.what();
  }
  auto t1 = std::chrono::steady_clock::now();
  row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return row;
}

generated_topology topology_for(const scenario& sc, std::uint64_t seed) {
  if (!sc.topology_file.empty()) {
    topology_file tf = load_topology(sc.topology_file);
    generated_topology g;
    g.net = std::move(tf.net);
    for (int id : g.net.node_ids())
      if (g.net.node(id).role == node_role::vm) g.dc_nodes.push_back(id);
    if (g.dc_nodes.empty()) g.dc_nodes = g.net.node_ids();
    return g;
  }
  gen_params params = sc.custom_topology ? *sc.custom_topology : preset_params(sc.preset);
  return generate_topology(params, seed);
}

std::vector<result_row> run_online(const scenario& sc) {
  std::vector<result_row> rows;
  for (std::uint64_t seed : sc.seeds) {
    for (const auto& algorithm : sc.algorithms) {
      generated_topology topo = topology_for(sc, seed);
      rng r(seed ^ 0x5bd1e995ULL);
      double accumulated = 0.0;
      std::map<std::pair<int, int>, double> loads;  // usage is initially zero

      for (int req = 0; req < sc.online_requests; ++req) {
        scenario_shape shape = sc.defaults;
        shape.sources = std::max(1, sc.defaults.sources + r.next_int(-2, 2));
        shape.dests = std::max(1, sc.defaults.dests + r.next_int(-2, 2));
        sof_instance inst = instantiate(topo, shape, r.next_u64());
        for (auto& e : inst.net.edges_mutable()) {
          auto it = loads.find({e.u, e.v});
          e.load = it == loads.end() ? 0.0 : it->second;
          if (!e.capacity) e.capacity = 1.0;
          e.connection_cost = element_cost(*e.load, *e.capacity);
        }

        result_row row;
        row.axis = "request";
        row.axis_value = req;
        row.request_index = req;
        row.seed = seed;
        row.algorithm = algorithm;
        auto t0 = std::chrono::steady_clock::now();
        try {
          sofda_result solved = dispatch(inst, algorithm);
          row.setup_cost = solved.cost.setup;
          row.connection_cost = solved.cost.connection;
          row.total_cost = solved.cost.total;
          row.used_vms = static_cast<int>(solved.forest.enabled_vms().size());
          row.status = "ok";
          accumulated += row.total_cost;
          for (const auto& [a, b] : solved.forest.clone_edges()) {
            auto key = std::minmax(a.first, b.first);
            loads[{key.first, key.second}] += sc.demand;
          }
          for (auto [u, v] : solved.forest.tree_edges) {
            if (v < u) std::swap(u, v);
            loads[{u, v}] += sc.demand;
          }
        } catch (const std::exception& e) {
          row.status = std::string("error: ") + e.what();
        }
        auto t1 = std::chrono::steady_clock::now();
        row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.accumulative_cost = accumulated;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace

result_row solve_one(const sof_instance& inst, const std::string& algorithm) {
  result_row row = run_point(inst, algorithm);
  row.axis = "single";
  return row;
}

std::vector<result_row> run_scenario(const scenario& sc) {
  if (sc.online) return run_online(sc);

  std::vector<double> values = sc.axis_values;
  if (values.empty()) values.push_back(0.0);

  struct job {
    double value;
    std::uint64_t seed;
    std::string algorithm;
  };
  std::vector<job> jobs;
  for (double v : values)
    for (std::uint64_t seed : sc.seeds)
      for (const auto& a : sc.algorithms) jobs.push_back({v, seed, a});

  std::vector<result_row> rows(jobs.size());
  auto work = [&](std::size_t idx) {
    const job& j = jobs[idx];
    scenario_shape shape = shape_at(sc, j.value);
    result_row row;
    try {
      generated_topology topo = topology_for(sc, j.seed);
      sof_instance inst = instantiate(topo, shape, j.seed * 1000003ULL + 17);
      row = run_point(inst, j.algorithm);
    } catch (const std::exception& e) {
      row.algorithm = j.algorithm;
      row.status = std::string("error: ") + e.what();
    }
    row.axis = sc.sweep_axis.empty() ? "none" : sc.sweep_axis;
    row.axis_value = j.value;
    row.seed = j.seed;
    rows[idx] = std::move(row);
  };

  int workers = std::max(1, sc.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&]() {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) break;
          work(i);
        }
      });
    for (auto& t : pool) t.join();
  }
  return rows;
}

void write_csv(const std::vector<result_row>& rows, std::ostream& out) {
  // wall-clock timings live in the JSON output; the CSV stays reproducible
  out << "axis,axis_value,algorithm,seed,request,setup,connection,total,accumulative,"
         "messages,used_vms,status\n";
  for (const auto& r : rows) {
    out << r.axis << ',' << num(r.axis_value) << ',' << r.algorithm << ',' << r.seed << ','
        << r.request_index << ',' << num(r.setup_cost) << ',' << num(r.connection_cost) << ','
        << num(r.total_cost) << ',' << num(r.accumulative_cost) << ',' << r.messages << ','
        << r.used_vms << ',' << r.status << '\n';
  }
}

void write_json(const std::vector<result_row>& rows, std::ostream& out) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o;
    o["axis"] = r.axis;
    o["axis_value"] = r.axis_value;
    o["algorithm"] = r.algorithm;
    o["seed"] = r.seed;
    if (r.request_index >= 0) o["request"] = r.request_index;
    o["setup"] = r.setup_cost;
    o["connection"] = r.connection_cost;
    o["total"] = r.total_cost;
    if (r.request_index >= 0) o["accumulative"] = r.accumulative_cost;
    o["runtime_ms"] = r.runtime_ms;
    o["messages"] = r.messages;
    o["used_vms"] = r.used_vms;
    o["status"] = r.status;
    j.push_back(o);
  }
  out << j.dump(1) << "\n";
}

}  // namespace sof
