#include "sof/distsim.hpp"

#include <algorithm>
#include <queue>

#include "sof/errors.hpp"
#include "sof/rng.hpp"

namespace sof {

std::vector<domain> partition(const network& net, int k_domains, std::uint64_t seed) {
  std::vector<int> ids = net.node_ids();
  if (k_domains < 1 || k_domains > static_cast<int>(ids.size()))
    throw input_error("partition: bad domain count");
  rng r(seed);
  std::vector<int> seeds = ids;
  r.shuffle(seeds);
  seeds.resize(static_cast<std::size_t>(k_domains));

  std::map<int, int> owner;
  std::vector<std::queue<int>> frontier(static_cast<std::size_t>(k_domains));
  for (int d = 0; d < k_domains; ++d) {
    owner[seeds[static_cast<std::size_t>(d)]] = d;
    frontier[static_cast<std::size_t>(d)].push(seeds[static_cast<std::size_t>(d)]);
  }
  // round-robin BFS growth keeps domains connected and balanced
  bool grew = true;
  while (grew) {
    grew = false;
    for (int d = 0; d < k_domains; ++d) {
      auto& q = frontier[static_cast<std::size_t>(d)];
      while (!q.empty()) {
        int u = q.front();
        int claimed = -1;
        for (const auto& e : net.neighbors(u))
          if (!owner.count(e.to)) {
            claimed = e.to;
            break;
          }
        if (claimed < 0) {
          q.pop();
          continue;
        }
        owner[claimed] = d;
        q.push(claimed);
        grew = true;
        break;
      }
    }
  }
  // disconnected leftovers (if any) go to domain 0
  for (int id : ids)
    if (!owner.count(id)) owner[id] = 0;

  std::vector<domain> out(static_cast<std::size_t>(k_domains));
  for (int d = 0; d < k_domains; ++d) out[static_cast<std::size_t>(d)].controller = d;
  for (int id : ids) out[static_cast<std::size_t>(owner[id])].nodes.push_back(id);
  for (const auto& e : net.edges())
    if (owner[e.u] != owner[e.v]) {
      out[static_cast<std::size_t>(owner[e.u])].borders.push_back(e.u);
      out[static_cast<std::size_t>(owner[e.v])].borders.push_back(e.v);
    }
  for (auto& d : out) {
    std::sort(d.nodes.begin(), d.nodes.end());
    std::sort(d.borders.begin(), d.borders.end());
    d.borders.erase(std::unique(d.borders.begin(), d.borders.end()), d.borders.end());
  }
  return out;
}

namespace {

// Leader-side shortest paths over border skeletons. Every inter-controller
// message is tallied; replies are cached the way a controller would remember
// what it already shared.
class dist_path_provider : public path_provider {
 public:
  dist_path_provider(const network& net, const std::vector<domain>& domains, int leader,
                     message_stats& stats)
      : net_(&net), domains_(&domains), leader_(leader), stats_(&stats) {
    for (std::size_t d = 0; d < domains.size(); ++d) {
      subnets_.push_back(make_subnet(domains[d]));
      for (int n : domains[d].nodes) owner_[n] = static_cast<int>(d);
    }
    // BorderMatrix + ReachabilityInfo broadcast, k(k-1) messages each
    int k = static_cast<int>(domains.size());
    if (k > 1) {
      stats_->per_kind["BorderMatrix"] += static_cast<long>(k) * (k - 1);
      stats_->per_kind["ReachabilityInfo"] += static_cast<long>(k) * (k - 1);
      stats_->rounds = std::max(stats_->rounds, 1);
    }
    for (std::size_t d = 0; d < domains.size(); ++d) {
      const auto& borders = domains[d].borders;
      for (std::size_t i = 0; i < borders.size(); ++i)
        for (std::size_t j = i + 1; j < borders.size(); ++j) {
          auto pr = local_query(static_cast<int>(d), borders[i], borders[j]);
          if (pr.reachable())
            border_matrix_[{borders[i], borders[j]}] = pr.cost;
        }
    }
  }

  path_result query(int u, int v) override {
    if (u == v) return {0.0, {u}};
    auto hit = cache_.find({u, v});
    if (hit != cache_.end()) return hit->second;
    path_result r = resolve(u, v);
    cache_[{u, v}] = r;
    return r;
  }

 private:
  network make_subnet(const domain& d) const {
    network sub;
    std::set<int> mine(d.nodes.begin(), d.nodes.end());
    for (int n : d.nodes) {
      const auto& info = net_->node(n);
      sub.add_node(n, info.role, info.setup_cost, info.capacity, info.load);
    }
    for (const auto& e : net_->edges())
      if (mine.count(e.u) && mine.count(e.v))
        sub.add_edge(e.u, e.v, e.connection_cost, e.capacity, e.load);
    return sub;
  }

  path_result local_query(int dom, int a, int b) {
    auto& cache = local_cache_[dom];
    auto it = cache.find(a);
    if (it == cache.end()) it = cache.emplace(a, dijkstra(subnets_[static_cast<std::size_t>(dom)], a)).first;
    path_result r;
    r.cost = it->second.dist_to(b);
    r.nodes = it->second.path_to(b);
    if (r.nodes.empty()) r.cost = k_inf;
    return r;
  }

  void count_query(int dom) {
    if (dom == leader_) return;  // the leader asks itself for free
    stats_->per_kind["PathQuery"] += 1;
    stats_->per_kind["PathReply"] += 1;
  }

  path_result resolve(int u, int v) {
    int du = owner_.at(u), dv = owner_.at(v);
    if (domains_->size() == 1) return local_query(0, u, v);

    // skeleton: u, v, all borders; intra-domain collapsed distances plus
    // cross edges; a same-domain direct option when applicable
    std::map<int, std::vector<std::pair<int, double>>> adj;
    auto link = [&](int a, int b, double w) {
      adj[a].push_back({b, w});
      adj[b].push_back({a, w});
    };
    for (const auto& [bb, w] : border_matrix_) link(bb.first, bb.second, w);
    for (const auto& e : net_->edges())
      if (owner_.at(e.u) != owner_.at(e.v)) link(e.u, e.v, e.connection_cost);

    auto attach = [&](int x, int dom_x) {
      bool queried = false;
      for (int b : (*domains_)[static_cast<std::size_t>(dom_x)].borders) {
        if (b == x) continue;
        auto pr = local_query(dom_x, x, b);
        if (pr.reachable()) {
          link(x, b, pr.cost);
          queried = true;
        }
      }
      if (queried) count_query(dom_x);
    };
    attach(u, du);
    attach(v, dv);
    if (du == dv) {
      auto pr = local_query(du, u, v);
      if (pr.reachable()) link(u, v, pr.cost);
    }
    for (auto& [_, lst] : adj) std::sort(lst.begin(), lst.end());

    // dijkstra over the skeleton
    std::map<int, double> dist;
    std::map<int, int> parent;
    dist[u] = 0.0;
    using entry = std::pair<double, int>;
    std::priority_queue<entry, std::vector<entry>, std::greater<>> heap;
    heap.push({0.0, u});
    while (!heap.empty()) {
      auto [dcur, cur] = heap.top();
      heap.pop();
      auto dit = dist.find(cur);
      if (dit == dist.end() || dcur > dit->second) continue;
      auto ait = adj.find(cur);
      if (ait == adj.end()) continue;
      for (const auto& [to, w] : ait->second) {
        double nd = dcur + w;
        auto tit = dist.find(to);
        if (tit == dist.end() || nd < tit->second ||
            (nd == tit->second && parent.count(to) && cur < parent[to])) {
          dist[to] = nd;
          parent[to] = cur;
          heap.push({nd, to});
        }
      }
    }
    path_result out;
    if (!dist.count(v)) return out;

    // unfold skeleton hops into concrete paths
    std::vector<int> hops{v};
    int cur = v;
    while (cur != u) {
      cur = parent.at(cur);
      hops.push_back(cur);
    }
    std::reverse(hops.begin(), hops.end());
    std::vector<int> full{u};
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
      int a = hops[i], b = hops[i + 1];
      std::vector<int> seg;
      if (owner_.at(a) == owner_.at(b)) {
        int dom = owner_.at(a);
        auto pr = local_query(dom, a, b);
        count_query(dom);
        seg = pr.nodes;
      } else {
        seg = {a, b};  // cross edge, endpoints known to both controllers
      }
      for (std::size_t p = 1; p < seg.size(); ++p) full.push_back(seg[p]);
    }
    // cost re-accumulated edge by edge so centralized and distributed sums
    // agree bit for bit
    double cost = 0.0;
    for (std::size_t p = 0; p + 1 < full.size(); ++p)
      cost += net_->edge_cost(full[p], full[p + 1]);
    out.cost = cost;
    out.nodes = std::move(full);
    return out;
  }

  const network* net_;
  const std::vector<domain>* domains_;
  int leader_;
  message_stats* stats_;
  std::vector<network> subnets_;
  std::map<int, int> owner_;
  std::map<std::pair<int, int>, double> border_matrix_;
  std::map<int, std::map<int, sp_tree>> local_cache_;
  std::map<std::pair<int, int>, path_result> cache_;
};

}  // namespace

distsim_result run_distributed_sofda(const sof_instance& inst,
                                     const std::vector<domain>& domains,
                                     kstroll_mode mode) {
  if (domains.empty()) throw input_error("distsim: no domains");
  std::set<int> covered;
  for (const auto& d : domains) covered.insert(d.nodes.begin(), d.nodes.end());
  for (int id : inst.net.node_ids())
    if (!covered.count(id)) throw input_error("distsim: node " + std::to_string(id) +
                                              " not covered by any domain");

  // the controller covering the lowest source id takes the request
  int first_source = *inst.sources.begin();
  int leader = 0;
  for (std::size_t d = 0; d < domains.size(); ++d)
    if (std::binary_search(domains[d].nodes.begin(), domains[d].nodes.end(), first_source))
      leader = static_cast<int>(d);

  distsim_result out;
  out.leader = leader;
  dist_path_provider provider(inst.net, domains, leader, out.stats);

  out.result = sofda(inst, mode, &provider);

  std::map<int, int> owner;
  for (std::size_t d = 0; d < domains.size(); ++d)
    for (int n : domains[d].nodes) owner[n] = static_cast<int>(d);

  if (domains.size() > 1) {
    // candidate chains advertised by each source's controller to the leader
    long adverts = 0;
    for (int s : inst.sources)
      if (owner.at(s) != leader)
        adverts += static_cast<long>(inst.net.vm_ids().size());
    out.stats.per_kind["ChainAdvert"] += adverts;

    // pairwise conflict removal between the controllers involved
    for (const auto& ev : out.result.conflicts.events) {
      if (owner.at(ev.vm) != leader) {
        out.stats.per_kind["ConflictNotify"] += 1;
        out.stats.per_kind["ConflictResolve"] += 1;
      }
    }

    // forest pieces shipped to every controller that owns part of it
    std::set<int> involved;
    for (const auto& w : out.result.forest.walks)
      for (const auto& v : w.visits) involved.insert(owner.at(v.node));
    for (const auto& [u, v] : out.result.forest.tree_edges) {
      involved.insert(owner.at(u));
      involved.insert(owner.at(v));
    }
    involved.erase(leader);
    out.stats.per_kind["Deploy"] += static_cast<long>(involved.size());
    out.stats.rounds = std::max(out.stats.rounds, 4);
  }
  return out;
}

}  // namespace sof
