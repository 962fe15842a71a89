#pragma once

// Physical topology, spanning-tree catalog and VLAN/bridge-priority planning.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace detnet::topology {

enum class NodeKind { kSwitch, kHost };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::kSwitch;
  std::string profile;  // switches only

  friend bool operator==(const Node&, const Node&) = default;
};

/// Undirected full-duplex link. Stored with a < b.
struct Link {
  std::string a;
  int a_port = 0;
  std::string b;
  int b_port = 0;
  double rate_bps = 0.0;
  double propagation_s = 0.0;

  friend bool operator==(const Link&, const Link&) = default;
};

/// One LLDP neighbour entry as delivered by a device. The optional kind hints
/// come from the system-capabilities TLV.
struct NeighborReport {
  std::string reporter;
  std::string a;
  int a_port = 0;
  std::string b;
  int b_port = 0;
  double rate_bps = 0.0;
  std::optional<NodeKind> a_kind;
  std::optional<NodeKind> b_kind;
};

class PhysicalTopology {
 public:
  struct Attachment {
    std::string switch_id;
    int switch_port = 0;
    std::size_t link = 0;
  };

  struct PortRef {
    std::size_t link = 0;
    std::string peer;
    int peer_port = 0;
  };

  PhysicalTopology() = default;

  /// Normalizes and validates. Throws TopologyError.
  PhysicalTopology(std::vector<Node> nodes, std::vector<Link> links);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  bool empty() const { return nodes_.empty(); }

  bool has_node(const std::string& id) const { return index_.count(id) != 0; }
  const Node& node(const std::string& id) const;
  bool is_switch(const std::string& id) const;
  bool is_host(const std::string& id) const;

  std::vector<std::string> switch_ids() const;
  std::vector<std::string> host_ids() const;

  /// Indices of switch-to-switch links in link order.
  std::vector<std::size_t> switch_links() const;

  Attachment access_of(const std::string& host) const;

  /// Ports of a node in ascending order.
  const std::map<int, PortRef>& ports(const std::string& id) const;
  const PortRef& port(const std::string& id, int port) const;

  /// Egress port on `from` for link `link`.
  int egress_port(std::size_t link, const std::string& from) const;
  const std::string& other_end(std::size_t link, const std::string& from) const;

  /// Number of connected ports on a switch.
  int active_ports(const std::string& switch_id) const;

  friend bool operator==(const PhysicalTopology& x, const PhysicalTopology& y) {
    return x.nodes_ == y.nodes_ && x.links_ == y.links_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::map<int, PortRef>> ports_;
};

/// Builds a topology from LLDP neighbour reports. Links seen from one side
/// only are accepted; a note is appended to `warnings` for each of them.
PhysicalTopology ingest_lldp(std::span<const NeighborReport> reports,
                             const std::string& default_profile,
                             double default_rate_bps,
                             std::vector<std::string>* warnings = nullptr);

struct SpanningTree {
  int index = -1;
  std::vector<std::size_t> links;  // sorted link indices
  std::string root;
  std::optional<int> vlan_id;
  bool configured = false;

  friend bool operator==(const SpanningTree&, const SpanningTree&) = default;
};

/// Enumerates every spanning tree of the switch subgraph exactly once, in
/// lexicographic order of the (sorted) link sets. Backtracks over links in
/// order: a link is included when it closes no cycle and excluded when the
/// remaining graph stays connected. State is self-contained, so enumeration
/// can be suspended and resumed at any point.
class SpanningTreeEnumerator {
 public:
  SpanningTreeEnumerator() = default;
  explicit SpanningTreeEnumerator(const PhysicalTopology& topo);

  std::optional<SpanningTree> next();
  int produced() const { return produced_; }

 private:
  struct Frame {
    std::size_t pos;
    unsigned char step;
  };

  bool joined_by_included(int u, int v) const;
  bool connected_without_excluded() const;
  SpanningTree make_tree() const;

  int node_count_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::size_t> link_ids_;
  std::vector<std::string> names_;
  std::vector<unsigned char> status_;
  std::vector<Frame> frames_;
  int included_ = 0;
  int produced_ = 0;
  bool started_ = false;
  bool done_ = false;
};

std::vector<SpanningTree> enumerate_spanning_trees(const PhysicalTopology& topo, int limit);

/// Switch with the smallest eccentricity in the tree, ties to the lowest id.
std::string select_root(const PhysicalTopology& topo, std::span<const std::size_t> tree_links);

/// BFS from the root: priority = depth * 4096. Throws DepthExceeded at depth 16.
std::map<std::string, int> bridge_priorities(const PhysicalTopology& topo,
                                             const SpanningTree& tree);

inline constexpr int kBridgePriorityStep = 4096;
inline constexpr int kMaxBridgePriorities = 16;
inline constexpr int kMinVlan = 1;
inline constexpr int kMaxVlan = 4094;

bool tree_contains(const SpanningTree& tree, std::span<const std::size_t> links);

/// Links of the unique tree path between two switches.
std::vector<std::size_t> tree_path(const PhysicalTopology& topo, const SpanningTree& tree,
                                   const std::string& from, const std::string& to);

/// Configured trees plus the lazily advanced enumeration behind them.
class TreeCatalog {
 public:
  TreeCatalog() = default;
  explicit TreeCatalog(const PhysicalTopology& topo);

  /// Configured trees ordered by VLAN id.
  const std::vector<SpanningTree>& configured() const { return configured_; }

  /// Gives `tree` the lowest free VLAN id, marks it configured and records it.
  /// Throws VlanExhausted when [1, 4094] is used up.
  int assign_vlan(SpanningTree& tree);

  /// Tree at enumeration position `index`, enumerating on demand.
  std::optional<SpanningTree> tree_at(int index);

  /// Configured tree with the lowest VLAN id containing all `links`.
  const SpanningTree* find_configured(std::span<const std::size_t> links) const;
  const SpanningTree* configured_by_vlan(int vlan) const;

  /// First tree in enumeration order that contains `links`, looking at most
  /// `search_limit` trees deep.
  std::optional<SpanningTree> first_containing(std::span<const std::size_t> links,
                                               int search_limit);

  /// Replaces the configured set (used by snapshot restore).
  void restore(std::vector<SpanningTree> configured);

  bool operator==(const TreeCatalog& other) const { return configured_ == other.configured_; }

 private:
  SpanningTreeEnumerator enumerator_;
  std::vector<SpanningTree> enumerated_;
  std::vector<SpanningTree> configured_;
  std::set<int> used_vlans_;
};

std::string to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

void to_json(nlohmann::json& j, const PhysicalTopology& t);
PhysicalTopology topology_from_json(const nlohmann::json& j);
PhysicalTopology load_topology(const std::string& path);
std::vector<NeighborReport> reports_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const SpanningTree& t);
void from_json(const nlohmann::json& j, SpanningTree& t);

}  // namespace detnet::topology
