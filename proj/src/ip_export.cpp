#include "sof/ip_export.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sof/errors.hpp"

namespace sof {

namespace {

// chain position labels: S, 1..|C|, D
std::string flabel(int f, int chain_len) {
  if (f == 0) return "S";
  if (f == chain_len + 1) return "D";
  return std::to_string(f);
}

// shortest representation that round-trips the coefficient
std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

ip_model_stats expected_ip_stats(const sof_instance& inst) {
  const long D = static_cast<long>(inst.dests.size());
  const long S = static_cast<long>(inst.sources.size());
  const long C = inst.chain_len;
  const long V = static_cast<long>(inst.net.node_count());
  const long M = static_cast<long>(inst.net.vm_ids().size());
  const long E = static_cast<long>(inst.net.edge_count());
  ip_model_stats st;
  st.constraint_rows["c1"] = D;
  st.constraint_rows["c2"] = D * C;
  st.constraint_rows["c3"] = D;
  st.constraint_rows["c4"] = D * (V - 1);
  st.constraint_rows["c5"] = D * C * V;
  st.constraint_rows["c6"] = V;
  st.constraint_rows["c7"] = D * (C + 1) * V;
  st.constraint_rows["c8"] = D * (C + 1) * 2 * E;
  // gamma over (S | C*M | V), pi and tau over directed arcs, sigma over V
  st.variables = D * (S + C * M + V) + D * (C + 1) * 2 * E + (C + 1) * 2 * E + C * V;
  st.binary_variables = st.variables;
  return st;
}

ip_model_stats export_ip(const sof_instance& inst, const std::string& path,
                         const ip_export_options& opts) {
  ip_model_stats expect = expected_ip_stats(inst);
  if (expect.rows() > opts.max_rows)
    throw input_error("IP model would have " + std::to_string(expect.rows()) +
                      " rows, over the limit of " + std::to_string(opts.max_rows) +
                      "; raise max_rows to force the export");

  const int C = inst.chain_len;
  std::vector<int> vnodes = inst.net.node_ids();
  std::vector<int> vms = inst.net.vm_ids();
  std::vector<int> dests(inst.dests.begin(), inst.dests.end());
  std::vector<int> sources(inst.sources.begin(), inst.sources.end());

  nlohmann::json manifest;
  manifest["variables"] = nlohmann::json::object();
  long var_count = 0;
  std::vector<std::string> binaries;
  auto declare = [&](const std::string& name, const char* kind, int d, int f, int u, int v) {
    nlohmann::json j;
    j["kind"] = kind;
    if (d >= 0) j["dest"] = d;
    j["f"] = flabel(f, C);
    if (u != -1) j["u"] = u;
    if (v != -1) j["v"] = v;
    manifest["variables"][name] = j;
    binaries.push_back(name);
    ++var_count;
    return name;
  };

  auto gname = [&](int d, int f, int u) {
    return "g_" + std::to_string(d) + "_" + flabel(f, C) + "_" + std::to_string(u);
  };
  auto pname = [&](int d, int f, int u, int v) {
    return "p_" + std::to_string(d) + "_" + flabel(f, C) + "_" + std::to_string(u) + "_" +
           std::to_string(v);
  };
  auto tname = [&](int f, int u, int v) {
    return "t_" + flabel(f, C) + "_" + std::to_string(u) + "_" + std::to_string(v);
  };
  auto sname = [&](int f, int u) {
    return "s_" + std::to_string(f) + "_" + std::to_string(u);
  };

  // variable domains: gamma_(d,S,*) over sources, gamma_(d,f,*) over VMs,
  // gamma_(d,D,*) over all nodes; pi/tau over directed arcs of E
  std::set<std::string> gamma_exists;
  for (int d : dests) {
    for (int s : sources) gamma_exists.insert(declare(gname(d, 0, s), "gamma", d, 0, s, -1));
    for (int f = 1; f <= C; ++f)
      for (int u : vms) gamma_exists.insert(declare(gname(d, f, u), "gamma", d, f, u, -1));
    for (int u : vnodes)
      gamma_exists.insert(declare(gname(d, C + 1, u), "gamma", d, C + 1, u, -1));
  }
  for (int d : dests)
    for (int f = 0; f <= C; ++f)
      for (const auto& e : inst.net.edges()) {
        declare(pname(d, f, e.u, e.v), "pi", d, f, e.u, e.v);
        declare(pname(d, f, e.v, e.u), "pi", d, f, e.v, e.u);
      }
  for (int f = 0; f <= C; ++f)
    for (const auto& e : inst.net.edges()) {
      declare(tname(f, e.u, e.v), "tau", -1, f, e.u, e.v);
      declare(tname(f, e.v, e.u), "tau", -1, f, e.v, e.u);
    }
  for (int f = 1; f <= C; ++f)
    for (int u : vnodes) declare(sname(f, u), "sigma", -1, f, u, -1);

  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path);

  // objective: setup costs on sigma, connection costs on every tau segment
  // including the source-to-f1 one (the walk is costed end to end)
  out << "Minimize\n obj:";
  bool first = true;
  for (int f = 1; f <= C; ++f)
    for (int u : vnodes) {
      double c = inst.net.node_cost(u);
      if (c == 0) continue;
      out << (first ? " " : " + ") << fmt(c) << " " << sname(f, u);
      first = false;
    }
  for (int f = 0; f <= C; ++f)
    for (const auto& e : inst.net.edges()) {
      if (e.connection_cost == 0) continue;
      out << (first ? " " : " + ") << fmt(e.connection_cost) << " " << tname(f, e.u, e.v);
      out << " + " << fmt(e.connection_cost) << " " << tname(f, e.v, e.u);
      first = false;
    }
  if (first) {
    if (!binaries.empty()) out << " 0 " << binaries.front();
    else out << " 0";
  }
  out << "\nSubject To\n";

  ip_model_stats st;
  long row_id = 0;
  auto row_name = [&](const char* family) {
    ++st.constraint_rows[family];
    return std::string(family) + "_" + std::to_string(++row_id);
  };

  for (int d : dests) {
    out << " " << row_name("c1") << ":";
    for (int s : sources) out << " + " << gname(d, 0, s);
    out << " = 1\n";
  }
  for (int d : dests)
    for (int f = 1; f <= C; ++f) {
      out << " " << row_name("c2") << ":";
      for (int u : vms) out << " + " << gname(d, f, u);
      out << " = 1\n";
    }
  for (int d : dests) out << " " << row_name("c3") << ": " << gname(d, C + 1, d) << " = 1\n";
  for (int d : dests)
    for (int u : vnodes) {
      if (u == d) continue;
      out << " " << row_name("c4") << ": " << gname(d, C + 1, u) << " = 0\n";
    }
  for (int d : dests)
    for (int f = 1; f <= C; ++f)
      for (int u : vnodes) {
        out << " " << row_name("c5") << ":";
        if (gamma_exists.count(gname(d, f, u))) out << " " << gname(d, f, u) << " - ";
        else out << " - ";
        out << sname(f, u) << " <= 0\n";
      }
  for (int u : vnodes) {
    out << " " << row_name("c6") << ":";
    for (int f = 1; f <= C; ++f) out << " + " << sname(f, u);
    out << " <= 1\n";
  }
  // flow rows: out-degree minus in-degree of the f-segment at u
  for (int d : dests)
    for (int f = 0; f <= C; ++f)
      for (int u : vnodes) {
        out << " " << row_name("c7") << ":";
        for (const auto& a : inst.net.neighbors(u))
          out << " + " << pname(d, f, u, a.to) << " - " << pname(d, f, a.to, u);
        bool have_cur = gamma_exists.count(gname(d, f, u)) > 0;
        bool have_next = gamma_exists.count(gname(d, f + 1, u)) > 0;
        if (have_cur) out << " - " << gname(d, f, u);
        if (have_next) out << " + " << gname(d, f + 1, u);
        out << " >= 0\n";
      }
  for (int d : dests)
    for (int f = 0; f <= C; ++f)
      for (const auto& e : inst.net.edges()) {
        out << " " << row_name("c8") << ": " << pname(d, f, e.u, e.v) << " - "
            << tname(f, e.u, e.v) << " <= 0\n";
        out << " " << row_name("c8") << ": " << pname(d, f, e.v, e.u) << " - "
            << tname(f, e.v, e.u) << " <= 0\n";
      }

  out << "Binary\n";
  for (const auto& b : binaries) out << " " << b << "\n";
  out << "End\n";
  out.close();

  st.variables = var_count;
  st.binary_variables = var_count;

  std::ofstream mf(path + ".manifest.json");
  manifest["chain_len"] = C;
  manifest["dests"] = dests;
  manifest["sources"] = sources;
  mf << manifest.dump(1) << "\n";
  return st;
}

}  // namespace sof
