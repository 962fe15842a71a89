#include "detnet/routing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "detnet/errors.hpp"

namespace detnet::routing {
namespace {

struct Arc {
  int from;
  int to;
  double weight;
};

struct Digraph {
  std::vector<std::vector<int>> out;  // arc ids per node
  std::vector<Arc> arcs;

  explicit Digraph(int n) : out(n) {}
  int add(int from, int to, double weight) {
    arcs.push_back({from, to, weight});
    out[from].push_back(static_cast<int>(arcs.size()) - 1);
    return static_cast<int>(arcs.size()) - 1;
  }
};

struct GraphPath {
  std::vector<int> nodes;
  std::vector<int> arcs;
  double cost = 0.0;
};

double path_cost(const Digraph& g, const std::vector<int>& arcs) {
  double c = 0.0;
  for (int a : arcs) c += g.arcs[a].weight;
  return c;
}

bool path_less(const GraphPath& x, const GraphPath& y) {
  const auto xs = x.arcs.size(), ys = y.arcs.size();
  return std::tie(x.cost, xs, x.nodes, x.arcs) < std::tie(y.cost, ys, y.nodes, y.arcs);
}

std::optional<GraphPath> dijkstra(const Digraph& g, int src, int dst,
                                  const std::vector<char>& banned_node,
                                  const std::vector<char>& banned_arc) {
  const int n = static_cast<int>(g.out.size());
  std::vector<double> dist(n, kInfinity);
  std::vector<int> hops(n, INT32_MAX);
  std::vector<int> via(n, -1);
  std::vector<char> done(n, 0);
  using Entry = std::tuple<double, int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  dist[src] = 0.0;
  hops[src] = 0;
  pq.emplace(0.0, 0, src);
  while (!pq.empty()) {
    auto [d, h, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == dst) break;
    for (int a : g.out[u]) {
      const Arc& arc = g.arcs[a];
      if (banned_arc[a] || banned_node[arc.to] || done[arc.to] || std::isinf(arc.weight)) continue;
      const double nd = d + arc.weight;
      const int nh = h + 1;
      if (nd < dist[arc.to] || (nd == dist[arc.to] && nh < hops[arc.to])) {
        dist[arc.to] = nd;
        hops[arc.to] = nh;
        via[arc.to] = a;
        pq.emplace(nd, nh, arc.to);
      }
    }
  }
  if (!done[dst]) return std::nullopt;
  GraphPath p;
  for (int cur = dst; cur != src; cur = g.arcs[via[cur]].from) {
    p.arcs.push_back(via[cur]);
  }
  std::reverse(p.arcs.begin(), p.arcs.end());
  p.nodes.push_back(src);
  for (int a : p.arcs) p.nodes.push_back(g.arcs[a].to);
  p.cost = path_cost(g, p.arcs);
  return p;
}

std::vector<GraphPath> yen(const Digraph& g, int src, int dst, int k) {
  const std::size_t n = g.out.size();
  std::vector<GraphPath> found;
  std::vector<GraphPath> pending;
  std::vector<char> no_nodes(n, 0);
  std::vector<char> no_arcs(g.arcs.size(), 0);
  auto first = dijkstra(g, src, dst, no_nodes, no_arcs);
  if (!first) return found;
  found.push_back(std::move(*first));

  auto known = [&](const GraphPath& p) {
    auto same = [&](const GraphPath& q) { return q.arcs == p.arcs; };
    return std::any_of(found.begin(), found.end(), same) ||
           std::any_of(pending.begin(), pending.end(), same);
  };

  while (static_cast<int>(found.size()) < k) {
    const GraphPath prev = found.back();
    for (std::size_t j = 0; j + 1 < prev.nodes.size(); ++j) {
      std::vector<char> banned_node(n, 0);
      std::vector<char> banned_arc(g.arcs.size(), 0);
      for (std::size_t r = 0; r < j; ++r) banned_node[prev.nodes[r]] = 1;
      for (const auto& p : found) {
        if (p.arcs.size() > j &&
            std::equal(prev.arcs.begin(), prev.arcs.begin() + j, p.arcs.begin())) {
          banned_arc[p.arcs[j]] = 1;
        }
      }
      auto spur = dijkstra(g, prev.nodes[j], dst, banned_node, banned_arc);
      if (!spur) continue;
      GraphPath total;
      total.arcs.assign(prev.arcs.begin(), prev.arcs.begin() + j);
      total.arcs.insert(total.arcs.end(), spur->arcs.begin(), spur->arcs.end());
      total.nodes.push_back(src);
      for (int a : total.arcs) total.nodes.push_back(g.arcs[a].to);
      total.cost = path_cost(g, total.arcs);
      if (!known(total)) pending.push_back(std::move(total));
    }
    if (pending.empty()) break;
    auto best = std::min_element(pending.begin(), pending.end(), path_less);
    found.push_back(std::move(*best));
    pending.erase(best);
  }
  return found;
}

// Switch-level digraph of one queue-level graph.
struct ClassGraph {
  Digraph graph;
  std::map<std::string, int> index;
  std::vector<const DirectedLink*> arc_link;

  explicit ClassGraph(const QueueLevelGraph& q) : graph(static_cast<int>(q.nodes.size())) {
    for (std::size_t i = 0; i < q.nodes.size(); ++i) index[q.nodes[i]] = static_cast<int>(i);
    for (const auto& e : q.edges) {
      graph.add(index.at(e.from), index.at(e.to), e.weight_s);
      arc_link.push_back(&e);
    }
  }
};

PathCandidate to_candidate(const ClassGraph& cg, const QueueLevelGraph& q, const GraphPath& p) {
  PathCandidate c;
  c.class_q = q.class_q;
  for (int node : p.nodes) c.switches.push_back(q.nodes[node]);
  for (int a : p.arcs) {
    const DirectedLink& e = *cg.arc_link[a];
    c.hops.push_back({e.from, e.egress_port});
    c.links.push_back(e.link);
  }
  c.weight_sum_s = p.cost;
  return c;
}

}  // namespace

QueueLevelGraph build_queue_level_graph(const NetworkState& state, int class_q,
                                        const netcalc::ArrivalCurve& probe) {
  if (class_q < 0 || class_q >= state.num_classes) {
    throw InvalidParameter("class " + std::to_string(class_q) + " out of range");
  }
  const auto& topo = state.topology;
  QueueLevelGraph g;
  g.class_q = class_q;
  g.nodes = topo.switch_ids();

  std::map<PortKey, PortLoad> loads;
  for (const auto& [key, qs] : state.queues) {
    auto [it, fresh] = loads.try_emplace(key.port_key(), state.num_classes);
    it->second.per_class[key.class_q] = qs.aggregate;
    it->second.max_packet_bits[key.class_q] = qs.max_packet_bits;
  }
  const PortLoad empty(state.num_classes);

  for (std::size_t li : topo.switch_links()) {
    const auto& link = topo.links()[li];
    for (const auto& [from, to] : {std::pair{link.a, link.b}, std::pair{link.b, link.a}}) {
      DirectedLink e{from, to, topo.egress_port(li, from), li, kInfinity};
      const PortKey key{from, e.egress_port};
      auto it = loads.find(key);
      const auto bound = class_bound(port_context(state, key), it == loads.end() ? empty : it->second,
                                     class_q, probe);
      if (!bound.overloaded) e.weight_s = bound.delay_s;
      g.edges.push_back(std::move(e));
    }
  }
  return g;
}

std::string attach_point(const topology::PhysicalTopology& topo, const std::string& endpoint) {
  if (topo.is_host(endpoint)) return topo.access_of(endpoint).switch_id;
  if (topo.is_switch(endpoint)) return endpoint;
  throw UnknownEndpoint("unknown endpoint '" + endpoint + "'");
}

std::vector<PathCandidate> k_shortest(const QueueLevelGraph& graph,
                                      const topology::PhysicalTopology& topo,
                                      const std::string& src, const std::string& dst, int k) {
  if (k < 1) throw InvalidParameter("k must be >= 1");
  const auto from = attach_point(topo, src);
  const auto to = attach_point(topo, dst);
  if (from == to) {
    PathCandidate c;
    c.class_q = graph.class_q;
    c.switches = {from};
    return {c};
  }
  ClassGraph cg(graph);
  std::vector<PathCandidate> out;
  for (const auto& p : yen(cg.graph, cg.index.at(from), cg.index.at(to), k)) {
    out.push_back(to_candidate(cg, graph, p));
  }
  return out;
}

std::optional<PathCandidate> shortest_path(const QueueLevelGraph& graph,
                                           const topology::PhysicalTopology& topo,
                                           const std::string& src, const std::string& dst) {
  if (src == dst) throw InvalidParameter("src equals dst");
  auto paths = k_shortest(graph, topo, src, dst, 1);
  if (paths.empty()) return std::nullopt;
  return paths.front();
}

std::vector<PathCandidate> rank_candidates(std::span<const QueueLevelGraph> graphs,
                                           const topology::TreeCatalog& trees,
                                           const topology::PhysicalTopology& topo,
                                           const std::string& src, const std::string& dst,
                                           int k_per_class) {
  if (k_per_class < 1) throw InvalidParameter("k_per_class must be >= 1");
  std::vector<PathCandidate> all;
  for (const auto& g : graphs) {
    for (auto& c : k_shortest(g, topo, src, dst, k_per_class)) {
      if (const auto* tree = trees.find_configured(c.links)) {
        c.tree_index = tree->index;
        c.vlan_id = tree->vlan_id;
      }
      all.push_back(std::move(c));
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const PathCandidate& x, const PathCandidate& y) {
    return std::make_tuple(x.weight_sum_s, x.hops.size(), -x.class_q, std::cref(x.hops)) <
           std::make_tuple(y.weight_sum_s, y.hops.size(), -y.class_q, std::cref(y.hops));
  });
  return all;
}

std::vector<PhysicalPath> yen_k_paths(const topology::PhysicalTopology& topo,
                                      const std::string& src, const std::string& dst, int k) {
  if (k < 1) throw InvalidParameter("k must be >= 1");
  if (!topo.has_node(src)) throw UnknownEndpoint("unknown endpoint '" + src + "'");
  if (!topo.has_node(dst)) throw UnknownEndpoint("unknown endpoint '" + dst + "'");
  if (src == dst) return {PhysicalPath{{src}, {}}};

  std::map<std::string, int> index;
  for (const auto& n : topo.nodes()) index.emplace(n.id, static_cast<int>(index.size()));
  Digraph g(static_cast<int>(index.size()));
  std::vector<std::size_t> arc_link;
  for (std::size_t li = 0; li < topo.links().size(); ++li) {
    const auto& l = topo.links()[li];
    g.add(index.at(l.a), index.at(l.b), 1.0);
    arc_link.push_back(li);
    g.add(index.at(l.b), index.at(l.a), 1.0);
    arc_link.push_back(li);
  }
  std::vector<PhysicalPath> out;
  for (const auto& p : yen(g, index.at(src), index.at(dst), k)) {
    PhysicalPath pp;
    for (int node : p.nodes) pp.nodes.push_back(topo.nodes()[node].id);
    for (int a : p.arcs) pp.links.push_back(arc_link[a]);
    out.push_back(std::move(pp));
  }
  return out;
}

std::vector<std::size_t> path_links(const topology::PhysicalTopology& topo,
                                    std::span<const Hop> hops) {
  std::vector<std::size_t> out;
  for (const auto& h : hops) out.push_back(topo.port(h.switch_id, h.egress_port).link);
  return out;
}

std::vector<std::string> reroute_candidates(const NetworkState& state,
                                            std::span<const std::size_t> selected_links) {
  const std::set<std::size_t> selected(selected_links.begin(), selected_links.end());
  std::vector<const EmbeddedFlow*> hits;
  for (const auto& [id, f] : state.flows) {
    if (f.management) continue;
    const auto links = path_links(state.topology, f.path);
    if (std::any_of(links.begin(), links.end(), [&](std::size_t l) { return selected.count(l); })) {
      hits.push_back(&f);
    }
  }
  std::stable_sort(hits.begin(), hits.end(), [](const EmbeddedFlow* x, const EmbeddedFlow* y) {
    return x->request.rate_bps > y->request.rate_bps;
  });
  std::vector<std::string> out;
  for (const auto* f : hits) out.push_back(f->request.id);
  return out;
}

PathCandidate candidate_from_links(const topology::PhysicalTopology& topo,
                                   const std::string& from_switch,
                                   std::span<const std::size_t> links, int class_q) {
  PathCandidate c;
  c.class_q = class_q;
  c.switches.push_back(from_switch);
  std::string cur = from_switch;
  for (std::size_t li : links) {
    c.hops.push_back({cur, topo.egress_port(li, cur)});
    c.links.push_back(li);
    cur = topo.other_end(li, cur);
    c.switches.push_back(cur);
  }
  return c;
}

}  // namespace detnet::routing
