#include "detnet/topology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <tuple>

#include "detnet/errors.hpp"

namespace detnet::topology {
namespace {

using Kind = TopologyError::Kind;

std::string port_name(const std::string& node, int port) {
  return node + ":" + std::to_string(port);
}

void normalize(Link& l) {
  if (std::tie(l.b, l.b_port) < std::tie(l.a, l.a_port)) {
    std::swap(l.a, l.b);
    std::swap(l.a_port, l.b_port);
  }
}

}  // namespace

std::string to_string(NodeKind kind) { return kind == NodeKind::kHost ? "host" : "switch"; }

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "host") return NodeKind::kHost;
  if (s == "switch") return NodeKind::kSwitch;
  throw SchemaMismatch("unknown node kind '" + s + "'");
}

PhysicalTopology::PhysicalTopology(std::vector<Node> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  std::sort(nodes_.begin(), nodes_.end(), [](const Node& x, const Node& y) { return x.id < y.id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id.empty()) throw TopologyError(Kind::kInvalidLink, "node with empty id");
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw TopologyError(Kind::kConflictingReports, "duplicate node id " + nodes_[i].id);
    }
  }
  for (auto& l : links_) normalize(l);
  std::sort(links_.begin(), links_.end(), [](const Link& x, const Link& y) {
    return std::tie(x.a, x.b, x.a_port, x.b_port) < std::tie(y.a, y.b, y.a_port, y.b_port);
  });

  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& l = links_[i];
    if (!has_node(l.a) || !has_node(l.b)) {
      throw TopologyError(Kind::kUnknownNode,
                          "link " + port_name(l.a, l.a_port) + " - " + port_name(l.b, l.b_port) +
                              " references an unknown node");
    }
    if (l.a == l.b) throw TopologyError(Kind::kInvalidLink, "self-loop on " + l.a);
    if (!(l.rate_bps > 0.0)) {
      throw TopologyError(Kind::kInvalidLink, "link " + l.a + " - " + l.b + " has no rate");
    }
    if (!(l.propagation_s >= 0.0)) {
      throw TopologyError(Kind::kInvalidLink, "negative propagation delay on " + l.a + " - " + l.b);
    }
    if (!ports_[l.a].emplace(l.a_port, PortRef{i, l.b, l.b_port}).second) {
      throw TopologyError(Kind::kConflictingReports, "port " + port_name(l.a, l.a_port) +
                                                         " used by two links");
    }
    if (!ports_[l.b].emplace(l.b_port, PortRef{i, l.a, l.a_port}).second) {
      throw TopologyError(Kind::kConflictingReports, "port " + port_name(l.b, l.b_port) +
                                                         " used by two links");
    }
  }

  for (const auto& n : nodes_) {
    if (n.kind != NodeKind::kHost) continue;
    auto it = ports_.find(n.id);
    const std::size_t degree = it == ports_.end() ? 0 : it->second.size();
    if (degree != 1) {
      throw TopologyError(Kind::kHostDegreeViolation,
                          "host " + n.id + " has degree " + std::to_string(degree));
    }
    if (!is_switch(it->second.begin()->second.peer)) {
      throw TopologyError(Kind::kHostDegreeViolation, "host " + n.id + " is not attached to a switch");
    }
  }

  if (nodes_.empty()) return;
  std::set<std::string> seen{nodes_.front().id};
  std::deque<std::string> todo{nodes_.front().id};
  while (!todo.empty()) {
    auto cur = todo.front();
    todo.pop_front();
    auto it = ports_.find(cur);
    if (it == ports_.end()) continue;
    for (const auto& [p, ref] : it->second) {
      if (seen.insert(ref.peer).second) todo.push_back(ref.peer);
    }
  }
  if (seen.size() != nodes_.size()) {
    throw TopologyError(Kind::kDisconnectedTopology,
                        "topology is disconnected (" + std::to_string(seen.size()) + " of " +
                            std::to_string(nodes_.size()) + " nodes reachable)");
  }
}

const Node& PhysicalTopology::node(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownEndpoint("unknown node '" + id + "'");
  return nodes_[it->second];
}

bool PhysicalTopology::is_switch(const std::string& id) const {
  auto it = index_.find(id);
  return it != index_.end() && nodes_[it->second].kind == NodeKind::kSwitch;
}

bool PhysicalTopology::is_host(const std::string& id) const {
  auto it = index_.find(id);
  return it != index_.end() && nodes_[it->second].kind == NodeKind::kHost;
}

std::vector<std::string> PhysicalTopology::switch_ids() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::kSwitch) out.push_back(n.id);
  }
  return out;
}

std::vector<std::string> PhysicalTopology::host_ids() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::kHost) out.push_back(n.id);
  }
  return out;
}

std::vector<std::size_t> PhysicalTopology::switch_links() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (is_switch(links_[i].a) && is_switch(links_[i].b)) out.push_back(i);
  }
  return out;
}

PhysicalTopology::Attachment PhysicalTopology::access_of(const std::string& host) const {
  if (!is_host(host)) throw UnknownEndpoint("'" + host + "' is not a host");
  const auto& [host_port, ref] = *ports_.at(host).begin();
  return {ref.peer, ref.peer_port, ref.link};
}

const std::map<int, PhysicalTopology::PortRef>& PhysicalTopology::ports(const std::string& id) const {
  static const std::map<int, PortRef> kNone;
  node(id);
  auto it = ports_.find(id);
  return it == ports_.end() ? kNone : it->second;
}

const PhysicalTopology::PortRef& PhysicalTopology::port(const std::string& id, int port) const {
  const auto& all = ports(id);
  auto it = all.find(port);
  if (it == all.end()) throw UnknownEndpoint("no link on port " + port_name(id, port));
  return it->second;
}

int PhysicalTopology::egress_port(std::size_t link, const std::string& from) const {
  const Link& l = links_.at(link);
  if (l.a == from) return l.a_port;
  if (l.b == from) return l.b_port;
  throw InvalidParameter("node " + from + " is not an endpoint of link " + std::to_string(link));
}

const std::string& PhysicalTopology::other_end(std::size_t link, const std::string& from) const {
  const Link& l = links_.at(link);
  if (l.a == from) return l.b;
  if (l.b == from) return l.a;
  throw InvalidParameter("node " + from + " is not an endpoint of link " + std::to_string(link));
}

int PhysicalTopology::active_ports(const std::string& switch_id) const {
  return static_cast<int>(ports(switch_id).size());
}

PhysicalTopology ingest_lldp(std::span<const NeighborReport> reports,
                             const std::string& default_profile, double default_rate_bps,
                             std::vector<std::string>* warnings) {
  struct Evidence {
    Link link;
    std::set<std::string> reporters;
  };
  using End = std::pair<std::string, int>;
  std::map<std::pair<End, End>, Evidence> merged;
  std::map<std::string, std::optional<NodeKind>> kinds;

  auto note_kind = [&](const std::string& id, std::optional<NodeKind> hint) {
    auto& k = kinds[id];
    if (!hint) return;
    if (k && *k != *hint) {
      throw TopologyError(Kind::kConflictingReports, "conflicting capabilities for " + id);
    }
    k = hint;
  };

  for (const auto& r : reports) {
    Link l{r.a, r.a_port, r.b, r.b_port, r.rate_bps > 0.0 ? r.rate_bps : default_rate_bps, 0.0};
    if (l.a == l.b) throw TopologyError(Kind::kInvalidLink, "self-loop reported by " + r.reporter);
    auto a_kind = r.a_kind;
    auto b_kind = r.b_kind;
    if (std::tie(l.b, l.b_port) < std::tie(l.a, l.a_port)) std::swap(a_kind, b_kind);
    normalize(l);
    note_kind(l.a, a_kind);
    note_kind(l.b, b_kind);
    auto key = std::make_pair(End{l.a, l.a_port}, End{l.b, l.b_port});
    auto [it, inserted] = merged.try_emplace(key, Evidence{l, {}});
    if (!inserted && it->second.link.rate_bps != l.rate_bps) {
      throw TopologyError(Kind::kConflictingReports,
                          "link " + port_name(l.a, l.a_port) + " - " + port_name(l.b, l.b_port) +
                              " reported with different speeds");
    }
    it->second.reporters.insert(r.reporter.empty() ? l.a : r.reporter);
  }

  std::vector<Link> links;
  for (const auto& [key, ev] : merged) {
    const bool both = ev.reporters.count(ev.link.a) && ev.reporters.count(ev.link.b);
    if (!both && warnings) {
      warnings->push_back("link " + port_name(ev.link.a, ev.link.a_port) + " - " +
                          port_name(ev.link.b, ev.link.b_port) +
                          " seen from one side only; accepted");
    }
    links.push_back(ev.link);
  }

  std::vector<Node> nodes;
  for (const auto& [id, kind] : kinds) {
    const NodeKind k = kind.value_or(NodeKind::kSwitch);
    nodes.push_back({id, k, k == NodeKind::kSwitch ? default_profile : std::string{}});
  }
  return PhysicalTopology(std::move(nodes), std::move(links));
}

// ---------------------------------------------------------------------------
// Spanning trees

SpanningTreeEnumerator::SpanningTreeEnumerator(const PhysicalTopology& topo) {
  names_ = topo.switch_ids();
  node_count_ = static_cast<int>(names_.size());
  std::map<std::string, int> idx;
  for (int i = 0; i < node_count_; ++i) idx[names_[i]] = i;
  for (std::size_t li : topo.switch_links()) {
    const Link& l = topo.links()[li];
    edges_.emplace_back(idx.at(l.a), idx.at(l.b));
    link_ids_.push_back(li);
  }
  status_.assign(edges_.size(), 0);
  if (node_count_ == 0) done_ = true;
}

bool SpanningTreeEnumerator::joined_by_included(int u, int v) const {
  std::vector<char> seen(node_count_, 0);
  std::vector<int> stack{u};
  seen[u] = 1;
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    if (cur == v) return true;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (status_[e] != 1) continue;
      auto [x, y] = edges_[e];
      int nxt = x == cur ? y : (y == cur ? x : -1);
      if (nxt >= 0 && !seen[nxt]) {
        seen[nxt] = 1;
        stack.push_back(nxt);
      }
    }
  }
  return false;
}

bool SpanningTreeEnumerator::connected_without_excluded() const {
  std::vector<char> seen(node_count_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (status_[e] == 2) continue;
      auto [x, y] = edges_[e];
      int nxt = x == cur ? y : (y == cur ? x : -1);
      if (nxt >= 0 && !seen[nxt]) {
        seen[nxt] = 1;
        ++reached;
        stack.push_back(nxt);
      }
    }
  }
  return reached == node_count_;
}

SpanningTree SpanningTreeEnumerator::make_tree() const {
  SpanningTree t;
  t.index = produced_;
  std::vector<std::vector<int>> adj(node_count_);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (status_[e] != 1) continue;
    t.links.push_back(link_ids_[e]);
    adj[edges_[e].first].push_back(edges_[e].second);
    adj[edges_[e].second].push_back(edges_[e].first);
  }
  // Minimum eccentricity, ties to the lowest id (names_ is sorted).
  int best = 0;
  int best_ecc = node_count_;
  for (int start = 0; start < node_count_; ++start) {
    std::vector<int> depth(node_count_, -1);
    std::deque<int> todo{start};
    depth[start] = 0;
    int ecc = 0;
    while (!todo.empty()) {
      int cur = todo.front();
      todo.pop_front();
      ecc = std::max(ecc, depth[cur]);
      for (int nxt : adj[cur]) {
        if (depth[nxt] < 0) {
          depth[nxt] = depth[cur] + 1;
          todo.push_back(nxt);
        }
      }
    }
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = start;
    }
  }
  t.root = names_[best];
  return t;
}

std::optional<SpanningTree> SpanningTreeEnumerator::next() {
  // status_: 0 undecided, 1 included, 2 excluded.
  // Frame steps: 0 fresh, 1 include branch taken, 2 exclude branch taken,
  // 3 leaf already reported.
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    frames_.push_back({0, 0});
  }
  const std::size_t m = edges_.size();
  while (!frames_.empty()) {
    Frame& f = frames_.back();
    if (f.step == 3) {
      frames_.pop_back();
      continue;
    }
    if (f.step == 0 && included_ == node_count_ - 1) {
      f.step = 3;
      SpanningTree t = make_tree();
      ++produced_;
      return t;
    }
    if (f.pos == m) {
      frames_.pop_back();
      continue;
    }
    const std::size_t pos = f.pos;
    if (f.step == 0) {
      f.step = 1;
      if (!joined_by_included(edges_[pos].first, edges_[pos].second)) {
        status_[pos] = 1;
        ++included_;
        frames_.push_back({pos + 1, 0});
        continue;
      }
    }
    if (f.step == 1) {
      if (status_[pos] == 1) {
        status_[pos] = 0;
        --included_;
      }
      f.step = 2;
      status_[pos] = 2;
      if (connected_without_excluded()) {
        frames_.push_back({pos + 1, 0});
        continue;
      }
    }
    status_[pos] = 0;
    frames_.pop_back();
  }
  done_ = true;
  return std::nullopt;
}

std::string select_root(const PhysicalTopology& topo, std::span<const std::size_t> tree_links) {
  const auto ids = topo.switch_ids();
  if (ids.empty()) return {};
  std::map<std::string, std::vector<std::string>> adj;
  for (std::size_t li : tree_links) {
    const Link& l = topo.links().at(li);
    adj[l.a].push_back(l.b);
    adj[l.b].push_back(l.a);
  }
  std::string best;
  std::size_t best_ecc = SIZE_MAX;
  for (const auto& start : ids) {
    std::map<std::string, std::size_t> depth{{start, 0}};
    std::deque<std::string> todo{start};
    std::size_t ecc = 0;
    while (!todo.empty()) {
      auto cur = todo.front();
      todo.pop_front();
      ecc = std::max(ecc, depth[cur]);
      for (const auto& nxt : adj[cur]) {
        if (depth.emplace(nxt, depth[cur] + 1).second) todo.push_back(nxt);
      }
    }
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = start;
    }
  }
  return best;
}

std::vector<SpanningTree> enumerate_spanning_trees(const PhysicalTopology& topo, int limit) {
  if (limit < 1) throw InvalidParameter("tree limit must be >= 1");
  std::vector<SpanningTree> out;
  SpanningTreeEnumerator en(topo);
  while (static_cast<int>(out.size()) < limit) {
    auto t = en.next();
    if (!t) break;
    out.push_back(std::move(*t));
  }
  return out;
}

std::map<std::string, int> bridge_priorities(const PhysicalTopology& topo,
                                             const SpanningTree& tree) {
  if (!topo.is_switch(tree.root)) throw InvalidParameter("tree root '" + tree.root + "' is not a switch");
  std::map<std::string, std::vector<std::string>> adj;
  for (std::size_t li : tree.links) {
    const Link& l = topo.links().at(li);
    adj[l.a].push_back(l.b);
    adj[l.b].push_back(l.a);
  }
  std::map<std::string, int> depth{{tree.root, 0}};
  std::deque<std::string> todo{tree.root};
  while (!todo.empty()) {
    auto cur = todo.front();
    todo.pop_front();
    for (const auto& nxt : adj[cur]) {
      if (depth.emplace(nxt, depth[cur] + 1).second) todo.push_back(nxt);
    }
  }
  std::map<std::string, int> prio;
  for (const auto& [id, d] : depth) {
    if (d >= kMaxBridgePriorities) {
      throw DepthExceeded("switch " + id + " sits at depth " + std::to_string(d) +
                          "; only 16 bridge priorities exist");
    }
    prio[id] = d * kBridgePriorityStep;
  }
  return prio;
}

bool tree_contains(const SpanningTree& tree, std::span<const std::size_t> links) {
  return std::all_of(links.begin(), links.end(), [&](std::size_t l) {
    return std::binary_search(tree.links.begin(), tree.links.end(), l);
  });
}

std::vector<std::size_t> tree_path(const PhysicalTopology& topo, const SpanningTree& tree,
                                   const std::string& from, const std::string& to) {
  std::map<std::string, std::vector<std::size_t>> adj;
  for (std::size_t li : tree.links) {
    adj[topo.links().at(li).a].push_back(li);
    adj[topo.links().at(li).b].push_back(li);
  }
  std::map<std::string, std::size_t> via;
  std::set<std::string> seen{from};
  std::deque<std::string> todo{from};
  while (!todo.empty()) {
    auto cur = todo.front();
    todo.pop_front();
    if (cur == to) break;
    for (std::size_t li : adj[cur]) {
      const auto& nxt = topo.other_end(li, cur);
      if (seen.insert(nxt).second) {
        via[nxt] = li;
        todo.push_back(nxt);
      }
    }
  }
  if (!seen.count(to)) throw UnknownEndpoint(to + " is not reachable from " + from + " in tree");
  std::vector<std::size_t> path;
  for (std::string cur = to; cur != from;) {
    std::size_t li = via.at(cur);
    path.push_back(li);
    cur = topo.other_end(li, cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

TreeCatalog::TreeCatalog(const PhysicalTopology& topo) : enumerator_(topo) {}

int TreeCatalog::assign_vlan(SpanningTree& tree) {
  if (tree.vlan_id || tree.configured) {
    throw InvalidParameter("tree " + std::to_string(tree.index) + " already has a VLAN");
  }
  int vlan = kMinVlan;
  for (int used : used_vlans_) {
    if (used != vlan) break;
    ++vlan;
  }
  if (vlan > kMaxVlan) {
    throw VlanExhausted("all VLAN ids 1..4094 are assigned; cannot configure tree " +
                        std::to_string(tree.index));
  }
  used_vlans_.insert(vlan);
  tree.vlan_id = vlan;
  tree.configured = true;
  auto pos = std::lower_bound(configured_.begin(), configured_.end(), vlan,
                              [](const SpanningTree& t, int v) { return *t.vlan_id < v; });
  configured_.insert(pos, tree);
  return vlan;
}

std::optional<SpanningTree> TreeCatalog::tree_at(int index) {
  while (static_cast<int>(enumerated_.size()) <= index) {
    auto t = enumerator_.next();
    if (!t) return std::nullopt;
    enumerated_.push_back(std::move(*t));
  }
  return enumerated_[index];
}

const SpanningTree* TreeCatalog::find_configured(std::span<const std::size_t> links) const {
  for (const auto& t : configured_) {
    if (tree_contains(t, links)) return &t;
  }
  return nullptr;
}

const SpanningTree* TreeCatalog::configured_by_vlan(int vlan) const {
  for (const auto& t : configured_) {
    if (t.vlan_id == vlan) return &t;
  }
  return nullptr;
}

std::optional<SpanningTree> TreeCatalog::first_containing(std::span<const std::size_t> links,
                                                          int search_limit) {
  for (int i = 0; i < search_limit; ++i) {
    auto t = tree_at(i);
    if (!t) return std::nullopt;
    if (tree_contains(*t, links)) return t;
  }
  return std::nullopt;
}

void TreeCatalog::restore(std::vector<SpanningTree> configured) {
  configured_ = std::move(configured);
  std::sort(configured_.begin(), configured_.end(),
            [](const SpanningTree& x, const SpanningTree& y) { return x.vlan_id < y.vlan_id; });
  used_vlans_.clear();
  for (const auto& t : configured_) {
    if (!t.vlan_id || *t.vlan_id < kMinVlan || *t.vlan_id > kMaxVlan) {
      throw SchemaMismatch("configured tree without a valid VLAN id");
    }
    if (!used_vlans_.insert(*t.vlan_id).second) throw SchemaMismatch("duplicate VLAN id");
  }
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const PhysicalTopology& t) {
  j = nlohmann::json::object();
  j["schema_version"] = 1;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& n : t.nodes()) {
    nlohmann::json e{{"id", n.id}, {"kind", to_string(n.kind)}};
    if (n.kind == NodeKind::kSwitch) e["profile"] = n.profile;
    nodes.push_back(std::move(e));
  }
  auto& links = j["links"] = nlohmann::json::array();
  for (const auto& l : t.links()) {
    nlohmann::json e{{"a", l.a}, {"a_port", l.a_port}, {"b", l.b}, {"b_port", l.b_port},
                     {"rate_bps", l.rate_bps}};
    if (l.propagation_s != 0.0) e["propagation_s"] = l.propagation_s;
    links.push_back(std::move(e));
  }
}

PhysicalTopology topology_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1) {
      throw SchemaMismatch("unsupported topology schema_version");
    }
    std::vector<Node> nodes;
    for (const auto& e : j.at("nodes")) {
      Node n;
      e.at("id").get_to(n.id);
      n.kind = node_kind_from_string(e.value("kind", std::string("switch")));
      if (n.kind == NodeKind::kSwitch) n.profile = e.value("profile", std::string("FS-S2805S"));
      nodes.push_back(std::move(n));
    }
    std::vector<Link> links;
    for (const auto& e : j.at("links")) {
      Link l;
      e.at("a").get_to(l.a);
      e.at("a_port").get_to(l.a_port);
      e.at("b").get_to(l.b);
      e.at("b_port").get_to(l.b_port);
      e.at("rate_bps").get_to(l.rate_bps);
      l.propagation_s = e.value("propagation_s", 0.0);
      links.push_back(std::move(l));
    }
    return PhysicalTopology(std::move(nodes), std::move(links));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("topology document: ") + e.what());
  }
}

PhysicalTopology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topology file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(path + ": " + e.what());
  }
  return topology_from_json(doc);
}

std::vector<NeighborReport> reports_from_json(const nlohmann::json& j) {
  try {
    const auto& arr = j.is_object() ? j.at("reports") : j;
    std::vector<NeighborReport> out;
    for (const auto& e : arr) {
      NeighborReport r;
      r.reporter = e.value("reporter", std::string{});
      e.at("a").get_to(r.a);
      e.at("a_port").get_to(r.a_port);
      e.at("b").get_to(r.b);
      e.at("b_port").get_to(r.b_port);
      r.rate_bps = e.value("rate_bps", 0.0);
      if (e.contains("a_kind")) r.a_kind = node_kind_from_string(e.at("a_kind").get<std::string>());
      if (e.contains("b_kind")) r.b_kind = node_kind_from_string(e.at("b_kind").get<std::string>());
      out.push_back(std::move(r));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("neighbor reports: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const SpanningTree& t) {
  j = nlohmann::json{{"index", t.index}, {"links", t.links}, {"root", t.root},
                     {"configured", t.configured}};
  j["vlan_id"] = t.vlan_id ? nlohmann::json(*t.vlan_id) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, SpanningTree& t) {
  j.at("index").get_to(t.index);
  j.at("links").get_to(t.links);
  j.at("root").get_to(t.root);
  j.at("configured").get_to(t.configured);
  if (j.contains("vlan_id") && !j.at("vlan_id").is_null()) {
    t.vlan_id = j.at("vlan_id").get<int>();
  } else {
    t.vlan_id.reset();
  }
}

}  // namespace detnet::topology
