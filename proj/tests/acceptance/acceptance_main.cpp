// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sof/baselines.hpp"
#include "sof/cost_model.hpp"
#include "sof/distsim.hpp"
#include "sof/dynamics.hpp"
#include "sof/errors.hpp"
#include "sof/fixtures.hpp"
#include "sof/ip_export.hpp"
#include "sof/kstroll.hpp"
#include "sof/oracle.hpp"
#include "sof/rng.hpp"
#include "sof/sofda.hpp"
#include "sof/topology_gen.hpp"

using namespace sof;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

sof_instance random_instance(rng& r, int n, int vms, int dests, int chain, int sources,
                             bool integer_costs = false) {
  network net;
  for (int i = 0; i < n; ++i) net.add_node(i, node_role::sw, 0.0);
  auto cost = [&]() {
    return integer_costs ? static_cast<double>(r.next_int(1, 9)) : 0.5 + r.next_double() * 9;
  };
  for (int i = 1; i < n; ++i)
    net.add_edge(i, static_cast<int>(r.next_below(static_cast<std::uint64_t>(i))), cost());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!net.has_edge(i, j) && r.next_double() < 0.25) net.add_edge(i, j, cost());
  std::vector<int> ids = net.node_ids();
  r.shuffle(ids);
  std::size_t at = 0;
  for (int i = 0; i < vms; ++i) {
    auto& node = net.node_mutable(ids[at++]);
    node.role = node_role::vm;
    node.setup_cost = r.next_double() * 4;
  }
  std::vector<int> src, dst;
  for (int i = 0; i < sources; ++i) src.push_back(ids[at++]);
  for (int i = 0; i < dests; ++i) dst.push_back(ids[at++]);
  return make_instance(std::move(net), src, dst, chain);
}

// ---------------------------------------------------------------- 1
void criterion_fixtures() {
  auto t0 = std::chrono::steady_clock::now();
  double fig1 = oracle_optimal(load_fixture("fig1")).cost.total;
  double t1 = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  double fig2 = oracle_optimal(load_fixture("fig2")).cost.total;
  double t2 = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  double fig3 = sofda_ss(load_fixture("fig3"), 1).cost.total;
  double t3 = seconds_since(t0);
  bool ok = fig1 == 14.0 && fig2 == 47.0 && fig3 == 45.0 && t1 < 1.0 && t2 < 1.0 && t3 < 1.0;
  std::ostringstream d;
  d << "fig1 oracle=" << fig1 << " fig2 oracle=" << fig2 << " fig3 sofda-ss=" << fig3
    << ", slowest " << std::max({t1, t2, t3}) << "s";
  report(1, ok, "fixture exactness 14 / 47 / 45", d.str());
}

// ---------------------------------------------------------------- 2
void criterion_bounds() {
  auto t0 = std::chrono::steady_clock::now();
  rng r(20240601);
  int solved = 0;
  int violations = 0;
  double max_ss = 0.0, max_general = 0.0;
  while (solved < 200) {
    int n = 7 + static_cast<int>(r.next_below(4));  // |V| <= 10
    int vms = 3 + static_cast<int>(r.next_below(4));  // |M| <= 6
    int dests = 1 + static_cast<int>(r.next_below(3));
    int chain = 1 + static_cast<int>(r.next_below(2));
    if (n < vms + dests + 1) continue;
    sof_instance inst = random_instance(r, n, vms, dests, chain, 1);
    try {
      double opt = oracle_optimal(inst).cost.total;
      if (opt <= 1e-9) continue;
      double ss = sofda_ss(inst, *inst.sources.begin()).cost.total;
      double general = sofda(inst).cost.total;
      max_ss = std::max(max_ss, ss / opt);
      max_general = std::max(max_general, general / opt);
      if (ss > 4.0 * opt + 1e-9 || general > 6.0 * opt + 1e-9) ++violations;
      ++solved;
    } catch (const infeasible_error&) {
    } catch (const input_error&) {
    }
  }
  // the general bound also exercised on multi-source instances
  int multi = 0;
  while (multi < 50) {
    sof_instance inst = random_instance(r, 9, 4, 2, 2, 2);
    try {
      double opt = oracle_optimal(inst).cost.total;
      if (opt <= 1e-9) continue;
      double general = sofda(inst).cost.total;
      max_general = std::max(max_general, general / opt);
      if (general > 6.0 * opt + 1e-9) ++violations;
      ++multi;
    } catch (const infeasible_error&) {
    } catch (const input_error&) {
    }
  }
  double secs = seconds_since(t0);
  bool ok = violations == 0 && solved >= 200 && multi >= 50 && secs < 300.0;
  std::ostringstream d;
  d << solved << "+" << multi << " instances, max sofda-ss/opt=" << max_ss
    << ", max sofda/opt=" << max_general << ", " << secs << "s";
  report(2, ok, "sofda-ss <= 4x opt and sofda <= 6x opt on all instances", d.str());
}

// ---------------------------------------------------------------- 3
void criterion_triangle() {
  rng r(777);
  int built = 0;
  double worst = -1e18;
  while (built < 100) {
    sof_instance inst = random_instance(r, 9 + static_cast<int>(r.next_below(6)), 4, 2, 2, 1,
                                        built % 4 == 0);
    if (built % 3 == 0) inst.source_setup_costs[*inst.sources.begin()] = r.next_double() * 5;
    metric_variant variant =
        inst.has_source_costs() ? metric_variant::source_cost : metric_variant::plain;
    try {
      for (int u : inst.net.vm_ids()) {
        metric_instance mi = build_metric_instance(inst, *inst.sources.begin(), u, variant);
        worst = std::max(worst, triangle_violation(mi));
        ++built;
        if (built >= 100) break;
      }
    } catch (const infeasible_error&) {
    }
  }
  for (const auto& name : fixture_names()) {
    sof_instance inst = load_fixture(name);
    for (int u : inst.net.vm_ids()) {
      metric_instance mi = build_metric_instance(inst, *inst.sources.begin(), u);
      worst = std::max(worst, triangle_violation(mi));
    }
  }
  bool ok = worst <= 1e-9;
  std::ostringstream d;
  d << built << " random metric instances plus fixtures, max violation " << worst;
  report(3, ok, "triangle inequality on every metric instance", d.str());
}

// ---------------------------------------------------------------- 4
void criterion_conflicts() {
  rng r(4242);
  int merges = 0;
  int bad = 0;
  while (merges < 500) {
    sof_instance inst = random_instance(r, 10, 5, 2, 2, 2);
    std::vector<int> vms = inst.net.vm_ids();
    local_path_provider paths(inst.net);
    auto build = [&](int source, int a, int b) -> std::optional<service_walk> {
      auto p1 = paths.query(source, a);
      auto p2 = paths.query(a, b);
      if (!p1.reachable() || !p2.reachable()) return std::nullopt;
      std::vector<int> nodes = p1.nodes;
      for (std::size_t i = 1; i < p2.nodes.size(); ++i) nodes.push_back(p2.nodes[i]);
      service_walk w = walk_from_nodes(nodes);
      int need = 2;
      std::set<int> marked;
      for (std::size_t i = w.visits.size(); i-- > 0 && need > 0;) {
        int node = w.visits[i].node;
        if ((node == b && need == 2) || (node == a && need == 1)) {
          if (marked.insert(node).second) {
            w.visits[i].vnf = need;
            --need;
          }
        }
      }
      if (need > 0) return std::nullopt;
      int last = 0;
      for (const auto& v : w.visits)
        if (v.vnf) {
          if (*v.vnf <= last) return std::nullopt;
          last = *v.vnf;
        }
      return w;
    };
    auto sources = std::vector<int>(inst.sources.begin(), inst.sources.end());
    std::size_t ai = r.next_below(vms.size()), bi = r.next_below(vms.size());
    if (ai == bi) continue;
    auto w1 = build(sources[0], vms[ai], vms[bi]);
    auto w2 = build(sources[1], vms[bi], vms[ai]);
    if (!w1 || !w2) continue;

    service_forest forest;
    forest.add_walk(*w1);
    double before = forest_cost(inst, forest).total + walk_cost(inst, *w2);
    std::set<int> allowed;
    for (const auto& [vm, _] : forest.enabled_vms()) allowed.insert(vm);
    for (const auto& v : w2->visits)
      if (v.vnf) allowed.insert(v.node);

    resolve_conflicts(forest, *w2, inst);
    double after = forest_cost(inst, forest).total;
    bool fine = after <= before + 1e-9;
    for (const auto& [vm, _] : forest.enabled_vms())
      if (!allowed.count(vm)) fine = false;
    sof_instance structural = inst;
    structural.dests.clear();
    if (!validate_forest(structural, forest).ok) fine = false;
    if (!fine) ++bad;
    ++merges;
  }
  std::ostringstream d;
  d << merges << " merges, " << bad << " violations";
  report(4, bad == 0, "conflict resolution never raises cost or enables new VMs", d.str());
}

// ---------------------------------------------------------------- 5
void criterion_baseline_dominance() {
  auto t0 = std::chrono::steady_clock::now();
  const int seeds = 30;
  double sum_sofda = 0, sum_est = 0, sum_enemp = 0;
  int wins = 0, ran = 0;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    generated_topology topo = generate_topology(preset_params("cogent"), seed);
    scenario_shape shape;  // defaults: 14 sources, 6 dests, 25 VMs, chain 3
    sof_instance inst = instantiate(topo, shape, seed * 1000003ULL + 17);
    try {
      double a = sofda(inst).cost.total;
      double b = run_est(inst).cost.total;
      double c = run_enemp(inst).cost.total;
      sum_sofda += a;
      sum_est += b;
      sum_enemp += c;
      if (a <= b + 1e-9) ++wins;
      ++ran;
    } catch (const infeasible_error&) {
    }
  }
  double secs = seconds_since(t0);
  double reduction = 1.0 - sum_sofda / sum_est;
  bool ok = ran >= 30 && sum_sofda <= sum_est && sum_sofda <= sum_enemp &&
            reduction >= 0.15 && wins * 10 >= ran * 9 && secs < 600.0;
  std::ostringstream d;
  d << ran << " seeds, mean sofda=" << sum_sofda / ran << " est=" << sum_est / ran
    << " enemp=" << sum_enemp / ran << ", reduction vs est "
    << static_cast<int>(reduction * 100) << "%, wins " << wins << "/" << ran << ", " << secs
    << "s";
  report(5, ok, "sofda dominates est and enemp at cogent scale", d.str());
}

// ---------------------------------------------------------------- 6
void criterion_runtime() {
  generated_topology topo = generate_topology(preset_params("inet"), 7);
  scenario_shape shape;
  shape.sources = 26;
  shape.dests = 6;
  shape.vms = 25;
  shape.chain_len = 3;
  sof_instance inst = instantiate(topo, shape, 7);
  auto t0 = std::chrono::steady_clock::now();
  auto res = sofda(inst);
  double secs = seconds_since(t0);
  bool ok = secs < 60.0 && validate_forest(inst, res.forest).ok;
  std::ostringstream d;
  d << "5000 nodes, 10000 edges, |S|=26: " << secs << "s, total " << res.cost.total;
  report(6, ok, "large-instance runtime under 60s", d.str());
}

// ---------------------------------------------------------------- 7
void criterion_cost_model() {
  auto params = cost_model_params::standard();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < params.pieces.size(); ++i) {
    double bp = params.pieces[i].threshold;
    double left = params.pieces[i].slope * bp - params.pieces[i].intercept;
    double right = params.pieces[i + 1].slope * bp - params.pieces[i + 1].intercept;
    worst = std::max(worst, std::abs(left - right));
  }
  bool convex = true;
  rng r(99);
  for (int i = 0; i < 1000; ++i) {
    double p = 0.1 + r.next_double() * 10;
    double l1 = r.next_double() * 1.5 * p;
    double l2 = r.next_double() * 1.5 * p;
    double a = r.next_double();
    double mid = element_cost(a * l1 + (1 - a) * l2, p, params);
    if (mid > a * element_cost(l1, p, params) + (1 - a) * element_cost(l2, p, params) + 1e-9)
      convex = false;
  }
  double v13 = element_cost(1.0 / 3.0, 1.0, params);
  double v11 = element_cost(1.0, 1.0, params);
  bool exact = std::abs(v13 - 1.0 / 3.0) < 1e-12 && std::abs(v11 - 32.0 / 3.0) < 1e-12;
  bool ok = worst < 1e-9 && convex && exact;
  std::ostringstream d;
  d << "max breakpoint gap " << worst << ", c(1/3,1)=" << v13 << ", c(1,1)=" << v11;
  report(7, ok, "cost model continuity, convexity and exact values", d.str());
}

// ---------------------------------------------------------------- 8
void criterion_dynamics() {
  rng r(2026);
  bool all_valid = true;
  bool leave_monotone = true;
  int sequences = 0, events_applied = 0, leaves = 0;
  while (sequences < 4) {
    // capacitated instance for refreshes
    sof_instance inst = random_instance(r, 16, 6, 3, 2, 2);
    for (auto& e : inst.net.edges_mutable()) {
      e.capacity = 1.0;
      e.load = r.next_double() * 0.5;
    }
    for (int vm : inst.net.vm_ids()) {
      auto& n = inst.net.node_mutable(vm);
      n.capacity = 1.0;
      n.load = r.next_double() * 0.5;
    }
    try {
      auto solved = sofda(inst);
      deployment_state state(inst, 0.05);
      state.deploy(solved.forest);
      std::vector<int> switches;
      for (int id : state.instance().net.node_ids())
        if (state.instance().net.node(id).role == node_role::sw) switches.push_back(id);
      for (int step = 0; step < 50; ++step) {
        int kind = static_cast<int>(r.next_below(6));
        try {
          switch (kind) {
            case 0: {
              if (state.instance().dests.empty()) break;
              std::vector<int> ds(state.instance().dests.begin(),
                                  state.instance().dests.end());
              double before = forest_cost(state.instance(), state.forest()).total;
              int d = ds[r.next_below(ds.size())];
              state.handle_leave(d);
              double after = forest_cost(state.instance(), state.forest()).total;
              ++leaves;
              if (after > before + 1e-9) leave_monotone = false;
              break;
            }
            case 1:
              state.handle_join(switches[r.next_below(switches.size())]);
              break;
            case 2:
              if (state.instance().chain_len >= 1)
                state.handle_vnf_delete(
                    1 + static_cast<int>(r.next_below(
                            static_cast<std::uint64_t>(state.instance().chain_len))));
              break;
            case 3:
              state.handle_vnf_insert(
                  1 + static_cast<int>(r.next_below(
                          static_cast<std::uint64_t>(state.instance().chain_len + 1))));
              break;
            case 4: {
              const auto& e = state.instance().net.edges()[r.next_below(
                  state.instance().net.edge_count())];
              state.handle_congest_edge(e.u, e.v, r.next_double() * 1.4);
              break;
            }
            case 5: {
              auto vms = state.instance().net.vm_ids();
              state.handle_congest_vm(vms[r.next_below(vms.size())], r.next_double() * 1.4);
              break;
            }
          }
          ++events_applied;
        } catch (const infeasible_error&) {
        }
        if (!validate_forest(state.instance(), state.forest()).ok) all_valid = false;
      }
      ++sequences;
    } catch (const infeasible_error&) {
    }
  }
  bool ok = all_valid && leave_monotone && events_applied > 100;
  std::ostringstream d;
  d << sequences << " sequences, " << events_applied << " events, " << leaves << " leaves";
  report(8, ok, "forest stays valid through random event sequences", d.str());
}

// ---------------------------------------------------------------- 9
void criterion_distributed() {
  rng r(909);
  int paired = 0, mismatches = 0;
  while (paired < 50) {
    int n = 24 + static_cast<int>(r.next_below(16));
    sof_instance inst = random_instance(r, n, 5, 3, 2, 2);
    try {
      double central = sofda(inst).cost.total;
      for (int k : {2, 4}) {
        auto domains = partition(inst.net, k, 100 + paired);
        auto dist = run_distributed_sofda(inst, domains);
        if (dist.result.cost.total != central) ++mismatches;
      }
      ++paired;
    } catch (const infeasible_error&) {
    }
  }
  sof_instance single = random_instance(r, 20, 4, 2, 2, 1);
  auto lone = run_distributed_sofda(single, partition(single.net, 1, 5));
  bool ok = mismatches == 0 && lone.stats.total() == 0;
  std::ostringstream d;
  d << paired << " instances x {2,4} domains, " << mismatches
    << " mismatches; k=1 messages " << lone.stats.total();
  report(9, ok, "distributed run equals centralized bit for bit", d.str());
}

// ---------------------------------------------------------------- 10
void criterion_ip_export() {
  rng r(1010);
  int checked = 0, bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    sof_instance inst = random_instance(r, 8 + static_cast<int>(r.next_below(4)), 3,
                                        1 + (trial % 2), 1 + (trial % 2), 1 + (trial % 3 == 0));
    std::string path = "/tmp/sof_acceptance_" + std::to_string(trial) + ".lp";
    auto stats = export_ip(inst, path);
    auto expect = expected_ip_stats(inst);
    for (const auto& [family, rows] : expect.constraint_rows)
      if (stats.constraint_rows[family] != rows) ++bad;
    if (stats.variables != expect.variables) ++bad;
    std::remove(path.c_str());
    std::remove((path + ".manifest.json").c_str());
    ++checked;
  }
  // optional lane: only when a MILP solver is on PATH
  bool have_solver = std::system("command -v glpsol >/dev/null 2>&1") == 0;
  std::string solver_note = have_solver ? "solver lane ran" : "no MILP solver, lane skipped";
  int solver_bad = 0;
  if (have_solver) {
    rng r2(11);
    int compared = 0;
    while (compared < 20) {
      sof_instance inst = random_instance(r2, 7, 3, 2, 1, 1, true);
      try {
        double opt = oracle_optimal(inst).cost.total;
        std::string path = "/tmp/sof_glpk.lp";
        export_ip(inst, path);
        std::string cmd = "glpsol --lp " + path + " -o /tmp/sof_glpk.sol >/dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) break;
        std::ifstream sol("/tmp/sof_glpk.sol");
        std::string line;
        double objective = -1;
        while (std::getline(sol, line))
          if (line.find("Objective:") != std::string::npos) {
            auto eq = line.find('=');
            objective = std::stod(line.substr(eq + 1));
            break;
          }
        if (std::abs(objective - opt) > 1e-6) ++solver_bad;
        ++compared;
      } catch (const infeasible_error&) {
      } catch (const input_error&) {
      }
    }
    std::ostringstream note;
    note << "solver lane: " << compared << " compared, " << solver_bad << " off";
    solver_note = note.str();
  }
  bool ok = bad == 0 && solver_bad == 0;
  std::ostringstream d;
  d << checked << " exports checked, " << bad << " count mismatches; " << solver_note;
  report(10, ok, "IP export matches the closed-form census", d.str());
}

}  // namespace

int main() {
  criterion_fixtures();
  criterion_bounds();
  criterion_triangle();
  criterion_conflicts();
  criterion_baseline_dominance();
  criterion_runtime();
  criterion_cost_model();
  criterion_dynamics();
  criterion_distributed();
  criterion_ip_export();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
