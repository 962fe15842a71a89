#pragma once

// Queue-level graphs and path search.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detnet/network_state.hpp"
#include "detnet/topology.hpp"

namespace detnet::routing {

/// One switch-to-switch egress, weighted by the worst-case delay a packet of
/// the graph's class would see there.
struct DirectedLink {
  std::string from;
  std::string to;
  int egress_port = 0;
  std::size_t link = 0;
  double weight_s = 0.0;  // kInfinity when the class is overloaded on this port
};

struct QueueLevelGraph {
  int class_q = 0;
  std::vector<std::string> nodes;  // switch ids, sorted
  std::vector<DirectedLink> edges;
};

/// Weights every directed switch link with the class-`q` delay bound at its
/// egress queue, with `probe` added to the queue's aggregate.
QueueLevelGraph build_queue_level_graph(const NetworkState& state, int class_q,
                                        const netcalc::ArrivalCurve& probe = {});

struct PathCandidate {
  int class_q = 0;
  std::optional<int> tree_index;
  std::optional<int> vlan_id;
  std::vector<std::string> switches;  // access switch of src ... access switch of dst
  std::vector<Hop> hops;              // switch egresses between them
  std::vector<std::size_t> links;
  double weight_sum_s = 0.0;

  friend bool operator==(const PathCandidate&, const PathCandidate&) = default;
};

struct PhysicalPath {
  std::vector<std::string> nodes;
  std::vector<std::size_t> links;

  friend bool operator==(const PhysicalPath&, const PhysicalPath&) = default;
};

/// Access switch of a host, or the id itself for a switch.
std::string attach_point(const topology::PhysicalTopology& topo, const std::string& endpoint);

/// Minimum-weight path between the endpoints' access switches, avoiding
/// infinite edges. Same access switch gives an empty path with weight 0.
std::optional<PathCandidate> shortest_path(const QueueLevelGraph& graph,
                                           const topology::PhysicalTopology& topo,
                                           const std::string& src, const std::string& dst);

/// Up to `k` loop-free paths on one class graph (Yen), ascending by weight.
std::vector<PathCandidate> k_shortest(const QueueLevelGraph& graph,
                                      const topology::PhysicalTopology& topo,
                                      const std::string& src, const std::string& dst, int k);

/// Pools up to `k_per_class` paths from every class graph and orders them by
/// weight, then hop count, then lower priority first, then hop sequence.
/// Each candidate carries the configured tree containing it, if any.
std::vector<PathCandidate> rank_candidates(std::span<const QueueLevelGraph> graphs,
                                           const topology::TreeCatalog& trees,
                                           const topology::PhysicalTopology& topo,
                                           const std::string& src, const std::string& dst,
                                           int k_per_class);

/// Up to `k` loop-free paths over the physical topology with unit link
/// weights, ascending by hop count.
std::vector<PhysicalPath> yen_k_paths(const topology::PhysicalTopology& topo,
                                      const std::string& src, const std::string& dst, int k);

/// Links a flow's path crosses, in order.
std::vector<std::size_t> path_links(const topology::PhysicalTopology& topo,
                                    std::span<const Hop> hops);

/// Embedded (non-management) flows sharing a physical link with
/// `selected_links`, by descending requested rate.
std::vector<std::string> reroute_candidates(const NetworkState& state,
                                            std::span<const std::size_t> selected_links);

/// Candidate for a switch-level physical path.
PathCandidate candidate_from_links(const topology::PhysicalTopology& topo,
                                   const std::string& from_switch,
                                   std::span<const std::size_t> links, int class_q);

}  // namespace detnet::routing
