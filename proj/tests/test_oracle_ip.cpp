#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sof/baselines.hpp"
#include "sof/errors.hpp"
#include "sof/fixtures.hpp"
#include "sof/ip_export.hpp"
#include "sof/oracle.hpp"
#include "sof/rng.hpp"
#include "sof/sofda.hpp"
#include "sof/steiner.hpp"

using namespace sof;

namespace {

sof_instance tiny_random(rng& r, int n = 8, int vms = 4, int dests = 2, int chain = 2,
                         int sources = 1) {
  network net;
  for (int i = 0; i < n; ++i) net.add_node(i, node_role::sw, 0.0);
  for (int i = 1; i < n; ++i)
    net.add_edge(i, static_cast<int>(r.next_below(static_cast<std::uint64_t>(i))),
                 static_cast<double>(r.next_int(1, 9)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!net.has_edge(i, j) && r.next_double() < 0.25)
        net.add_edge(i, j, static_cast<double>(r.next_int(1, 9)));
  std::vector<int> ids = net.node_ids();
  r.shuffle(ids);
  std::size_t at = 0;
  for (int i = 0; i < vms; ++i) {
    auto& node = net.node_mutable(ids[at++]);
    node.role = node_role::vm;
    node.setup_cost = static_cast<double>(r.next_int(0, 6));
  }
  std::vector<int> src, dst;
  for (int i = 0; i < sources; ++i) src.push_back(ids[at++]);
  for (int i = 0; i < dests; ++i) dst.push_back(ids[at++]);
  return make_instance(std::move(net), src, dst, chain);
}

}  // namespace

TEST_CASE("fixture optima") {
  auto fig1 = oracle_optimal(load_fixture("fig1"));
  CHECK(fig1.cost.total == doctest::Approx(14.0));
  CHECK(fig1.enablement.size() == 4);  // two trees, two VMs each

  auto fig2 = oracle_optimal(load_fixture("fig2"));
  CHECK(fig2.cost.total == doctest::Approx(47.0));
  CHECK(fig2.cost.setup == doctest::Approx(20.0));
  CHECK(fig2.cost.connection == doctest::Approx(27.0));
}

TEST_CASE("oracle forests validate and their cost matches the reported one") {
  rng r(8);
  for (int trial = 0; trial < 25; ++trial) {
    sof_instance inst = tiny_random(r, 8, 4, 2, 2, 2);
    try {
      auto o = oracle_optimal(inst);
      CHECK(validate_forest(inst, o.forest).ok);
      CHECK(forest_cost(inst, o.forest).total == doctest::Approx(o.cost.total));
    } catch (const infeasible_error&) {
    }
  }
}

TEST_CASE("oracle lower-bounds every algorithm") {
  rng r(12);
  int solved = 0;
  while (solved < 20) {
    sof_instance inst = tiny_random(r, 9, 4, 2, 2, 2);
    try {
      double opt = oracle_optimal(inst).cost.total;
      CHECK(sofda(inst).cost.total >= opt - 1e-9);
      CHECK(run_st(inst).cost.total >= opt - 1e-9);
      CHECK(run_est(inst).cost.total >= opt - 1e-9);
      CHECK(run_enemp(inst).cost.total >= opt - 1e-9);
      ++solved;
    } catch (const infeasible_error&) {
    }
  }
}

TEST_CASE("permuting VM identities does not change the optimum") {
  rng r(23);
  sof_instance inst = tiny_random(r, 7, 3, 2, 2, 1);
  double base = oracle_optimal(inst).cost.total;

  // rebuild with node ids relabeled by a fixed permutation
  std::map<int, int> rename;
  std::vector<int> ids = inst.net.node_ids();
  std::vector<int> shuffled = ids;
  r.shuffle(shuffled);
  for (std::size_t i = 0; i < ids.size(); ++i) rename[ids[i]] = shuffled[i];
  network net2;
  for (int id : ids) {
    const auto& n = inst.net.node(id);
    net2.add_node(rename[id], n.role, n.setup_cost, n.capacity, n.load);
  }
  for (const auto& e : inst.net.edges())
    net2.add_edge(rename[e.u], rename[e.v], e.connection_cost, e.capacity, e.load);
  std::vector<int> src, dst;
  for (int s : inst.sources) src.push_back(rename[s]);
  for (int d : inst.dests) dst.push_back(rename[d]);
  sof_instance inst2 = make_instance(std::move(net2), src, dst, inst.chain_len);
  CHECK(oracle_optimal(inst2).cost.total == doctest::Approx(base));
}

TEST_CASE("a layered walk for one destination prices like the plain walk") {
  // single destination: the oracle's layered route must cost exactly what
  // forest_cost assigns to the reconstructed clone walk
  rng r(29);
  for (int trial = 0; trial < 10; ++trial) {
    sof_instance inst = tiny_random(r, 7, 3, 1, 2, 1);
    try {
      auto o = oracle_optimal(inst);
      REQUIRE(o.forest.walks.size() >= 1);
      double rebuilt = forest_cost(inst, o.forest).total;
      CHECK(rebuilt == doctest::Approx(o.cost.total));
    } catch (const infeasible_error&) {
    }
  }
}

TEST_CASE("reduction-shaped instances price as tree plus bridge") {
  // the Steiner root doubles as the only (free) VM and a fresh source hangs
  // off it by one bridge edge; the optimum is then tree cost plus the bridge
  network net;
  net.add_node(0, node_role::vm, 0.0);
  for (int i = 1; i < 6; ++i) net.add_node(i, node_role::sw, 0.0);
  net.add_edge(0, 1, 2.0);
  net.add_edge(1, 2, 3.0);
  net.add_edge(0, 3, 4.0);
  net.add_edge(3, 4, 1.0);
  net.add_edge(1, 4, 2.0);
  net.add_edge(2, 5, 2.0);
  auto tree = steiner_exact(net, 0, {2, 4, 5});

  double w = 7.0;
  net.add_node(6, node_role::sw, 0.0);
  net.add_edge(6, 0, w);
  sof_instance inst = make_instance(std::move(net), {6}, {2, 4, 5}, 1);
  auto o = oracle_optimal(inst);
  CHECK(o.cost.total == doctest::Approx(tree.cost + w));
}

TEST_CASE("enumeration guards refuse oversized instances") {
  rng r(31);
  sof_instance inst = tiny_random(r, 12, 9, 2, 2, 1);
  CHECK_THROWS_AS(oracle_optimal(inst), input_error);
  sof_instance inst2 = tiny_random(r, 8, 4, 2, 2, 1);
  oracle_limits tight;
  tight.max_dests = 1;
  CHECK_THROWS_AS(oracle_optimal(inst2, tight), input_error);
}

TEST_CASE("LP export row counts match the closed forms") {
  rng r(37);
  for (int trial = 0; trial < 20; ++trial) {
    sof_instance inst = tiny_random(r, 8 + static_cast<int>(r.next_below(4)), 2, 1 + (trial % 2),
                                    1 + (trial % 2), (trial % 3 == 0) ? 2 : 1);
    std::string path = "/tmp/sof_test_model_" + std::to_string(trial) + ".lp";
    auto stats = export_ip(inst, path);
    auto expect = expected_ip_stats(inst);
    for (const auto& [family, rows] : expect.constraint_rows)
      CHECK(stats.constraint_rows[family] == rows);
    CHECK(stats.variables == expect.variables);
    std::remove(path.c_str());
    std::remove((path + ".manifest.json").c_str());
  }
}

TEST_CASE("the documented tiny census") {
  // |D|=1, |C|=1, |S|=1 on a 3-node line
  network net;
  net.add_node(0, node_role::sw, 0.0);
  net.add_node(1, node_role::vm, 1.0);
  net.add_node(2, node_role::sw, 0.0);
  net.add_edge(0, 1, 1.0);
  net.add_edge(1, 2, 1.0);
  sof_instance inst = make_instance(std::move(net), {0}, {2}, 1);
  auto stats = export_ip(inst, "/tmp/sof_tiny.lp");
  const long V = 3, E = 2;
  CHECK(stats.constraint_rows["c1"] == 1);
  CHECK(stats.constraint_rows["c2"] == 1);
  CHECK(stats.constraint_rows["c3"] == 1);
  CHECK(stats.constraint_rows["c4"] == V - 1);
  CHECK(stats.constraint_rows["c5"] == V);
  CHECK(stats.constraint_rows["c6"] == V);
  CHECK(stats.constraint_rows["c7"] == V * 2 * 1);
  CHECK(stats.constraint_rows["c8"] == 2 * 2 * E);  // per direction and segment
  std::remove("/tmp/sof_tiny.lp");
  std::remove("/tmp/sof_tiny.lp.manifest.json");
}

TEST_CASE("LP text carries the standard sections and a manifest") {
  sof_instance inst = load_fixture("fig2");
  auto stats = export_ip(inst, "/tmp/sof_fig2.lp");
  CHECK(stats.rows() > 0);
  std::ifstream f("/tmp/sof_fig2.lp");
  std::stringstream buf;
  buf << f.rdbuf();
  std::string text = buf.str();
  CHECK(text.find("Minimize") == 0);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Binary") != std::string::npos);
  CHECK(text.rfind("End\n") == text.size() - 4);
  std::ifstream mf("/tmp/sof_fig2.lp.manifest.json");
  CHECK(mf.good());
  std::remove("/tmp/sof_fig2.lp");
  std::remove("/tmp/sof_fig2.lp.manifest.json");
}

TEST_CASE("empty destination set exports an objective-only model") {
  network net;
  net.add_node(0, node_role::sw, 0.0);
  net.add_node(1, node_role::vm, 1.0);
  net.add_edge(0, 1, 1.0);
  sof_instance inst;
  inst.net = std::move(net);
  inst.sources = {0};
  inst.chain_len = 1;
  auto stats = export_ip(inst, "/tmp/sof_empty.lp");
  CHECK(stats.constraint_rows["c1"] == 0);
  CHECK(stats.constraint_rows["c6"] == 2);
  std::remove("/tmp/sof_empty.lp");
  std::remove("/tmp/sof_empty.lp.manifest.json");
}

TEST_CASE("oversize models are refused with counts") {
  sof_instance inst = load_fixture("fig2");
  ip_export_options opts;
  opts.max_rows = 10;
  CHECK_THROWS_AS(export_ip(inst, "/tmp/sof_refused.lp", opts), input_error);
}

namespace {

// minimal reader for the LP files this project writes: unit coefficients in
// constraint rows, explicit coefficients in the objective
struct parsed_lp {
  std::vector<std::pair<double, std::string>> objective;
  struct row {
    std::vector<std::pair<double, std::string>> terms;
    std::string op;
    double rhs;
  };
  std::vector<row> rows;
};

parsed_lp parse_lp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  parsed_lp out;
  std::string line;
  enum { in_none, in_obj, in_rows } mode = in_none;
  while (std::getline(f, line)) {
    if (line == "Minimize") {
      mode = in_obj;
      continue;
    }
    if (line == "Subject To") {
      mode = in_rows;
      continue;
    }
    if (line == "Binary" || line == "End") break;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    std::size_t at = 0;
    if (!toks[0].empty() && toks[0].back() == ':') at = 1;  // row label
    std::vector<std::pair<double, std::string>> terms;
    double sign = 1.0;
    double coeff = 1.0;
    std::string op;
    double rhs = 0.0;
    for (; at < toks.size(); ++at) {
      const std::string& t = toks[at];
      if (t == "+") {
        sign = 1.0;
        coeff = 1.0;
      } else if (t == "-") {
        sign = -1.0;
        coeff = 1.0;
      } else if (t == "=" || t == "<=" || t == ">=") {
        op = t;
      } else if (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '.') {
        if (op.empty())
          coeff = std::stod(t);
        else
          rhs = std::stod(t);
      } else {
        terms.push_back({sign * coeff, t});
        sign = 1.0;
        coeff = 1.0;
      }
    }
    if (mode == in_obj)
      out.objective.insert(out.objective.end(), terms.begin(), terms.end());
    else if (mode == in_rows && !op.empty())
      out.rows.push_back({terms, op, rhs});
  }
  return out;
}

std::string seg_label(int seg, int chain_len) {
  if (seg == 0) return "S";
  if (seg == chain_len + 1) return "D";
  return std::to_string(seg);
}

// variable assignment induced by an oracle forest (one walk per destination)
std::map<std::string, double> assignment_of(const sof_instance& inst,
                                            const service_forest& forest) {
  std::map<std::string, double> x;
  std::vector<int> dests(inst.dests.begin(), inst.dests.end());
  REQUIRE(forest.walks.size() == dests.size());
  REQUIRE(forest.tree_edges.empty());
  const int C = inst.chain_len;
  for (std::size_t i = 0; i < dests.size(); ++i) {
    int d = dests[i];
    const auto& w = forest.walks[i];
    REQUIRE(w.terminal() == d);
    x["g_" + std::to_string(d) + "_S_" + std::to_string(w.source())] = 1.0;
    x["g_" + std::to_string(d) + "_D_" + std::to_string(d)] = 1.0;
    int seg = 0;
    for (std::size_t p = 0; p < w.visits.size(); ++p) {
      if (p > 0) {
        x["p_" + std::to_string(d) + "_" + seg_label(seg, C) + "_" +
          std::to_string(w.visits[p - 1].node) + "_" + std::to_string(w.visits[p].node)] = 1.0;
      }
      if (w.visits[p].vnf) {
        seg = *w.visits[p].vnf;
        x["g_" + std::to_string(d) + "_" + std::to_string(seg) + "_" +
          std::to_string(w.visits[p].node)] = 1.0;
      }
    }
  }
  // forest-level variables follow from the per-destination ones
  for (const auto& [name, v] : std::map<std::string, double>(x)) {
    if (v != 1.0 || name[0] != 'p') continue;
    // p_d_f_u_v -> t_f_u_v
    auto first = name.find('_', 2);
    x["t" + name.substr(first)] = 1.0;
  }
  for (const auto& [vm, f] : forest.enabled_vms())
    x["s_" + std::to_string(f) + "_" + std::to_string(vm)] = 1.0;
  return x;
}

}  // namespace

TEST_CASE("oracle optima satisfy the exported formulation at equal objective") {
  rng r(64);
  int verified = 0;
  std::vector<sof_instance> cases{load_fixture("fig1"), load_fixture("fig2")};
  while (cases.size() < 8) cases.push_back(tiny_random(r, 8, 3, 2, 2, 2));
  for (auto& inst : cases) {
    try {
      auto o = oracle_optimal(inst);
      std::string path = "/tmp/sof_check.lp";
      export_ip(inst, path);
      parsed_lp lp = parse_lp(path);
      auto x = assignment_of(inst, o.forest);
      auto value = [&](const std::string& name) {
        auto it = x.find(name);
        return it == x.end() ? 0.0 : it->second;
      };
      for (const auto& row : lp.rows) {
        double lhs = 0.0;
        for (const auto& [c, name] : row.terms) lhs += c * value(name);
        if (row.op == "=") CHECK(lhs == doctest::Approx(row.rhs));
        if (row.op == "<=") CHECK(lhs <= row.rhs + 1e-9);
        if (row.op == ">=") CHECK(lhs >= row.rhs - 1e-9);
      }
      double objective = 0.0;
      for (const auto& [c, name] : lp.objective) objective += c * value(name);
      CHECK(objective == doctest::Approx(o.cost.total));
      std::remove(path.c_str());
      std::remove("/tmp/sof_check.lp.manifest.json");
      ++verified;
    } catch (const infeasible_error&) {
    }
  }
  CHECK(verified >= 6);
}
