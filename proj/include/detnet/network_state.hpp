#pragma once

// Controller state: embedded flows, per-queue aggregates and the
// whole-network bound analysis they are derived from.

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "detnet/devicemodel.hpp"
#include "detnet/netcalc.hpp"
#include "detnet/topology.hpp"

namespace detnet {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::int64_t kDefaultMaxPacketBytes = 1542;

/// One egress port traversed by a flow.
struct Hop {
  std::string switch_id;
  int egress_port = 0;

  friend auto operator<=>(const Hop&, const Hop&) = default;
};

struct FlowRequest {
  std::string id;
  std::string src;
  std::string dst;
  double rate_bps = 0.0;
  std::int64_t burst_bytes = 0;
  double deadline_s = 0.0;
  std::int64_t max_packet_bytes = kDefaultMaxPacketBytes;

  /// Throws InvalidParameter on out-of-range fields.
  void validate() const;

  friend bool operator==(const FlowRequest&, const FlowRequest&) = default;
};

struct EmbeddedFlow {
  FlowRequest request;
  double compensated_rate_bps = 0.0;
  int class_q = 0;
  int vlan_id = 0;
  std::vector<Hop> path;
  std::vector<netcalc::ArrivalCurve> per_hop_arrival;
  std::vector<double> per_hop_delay_s;
  double delay_bound_s = 0.0;
  bool management = false;

  double packet_bits() const { return 8.0 * static_cast<double>(request.max_packet_bytes); }
  netcalc::ArrivalCurve source_curve() const {
    return {compensated_rate_bps, 8.0 * static_cast<double>(request.burst_bytes)};
  }

  friend bool operator==(const EmbeddedFlow&, const EmbeddedFlow&) = default;
};

struct PortKey {
  std::string switch_id;
  int port = 0;
  friend auto operator<=>(const PortKey&, const PortKey&) = default;
};

struct QueueKey {
  std::string switch_id;
  int port = 0;
  int class_q = 0;
  PortKey port_key() const { return {switch_id, port}; }
  friend auto operator<=>(const QueueKey&, const QueueKey&) = default;
};

struct QueueState {
  netcalc::ArrivalCurve aggregate;
  netcalc::ServiceCurve residual;
  bool overloaded = false;
  double delay_s = 0.0;
  double backlog_bits = 0.0;
  double budget_bits = 0.0;
  double max_packet_bits = 0.0;
  std::vector<std::string> flows;

  friend bool operator==(const QueueState&, const QueueState&) = default;
};

struct ControllerConfig {
  int num_classes = 0;  // 0: smallest queue count among switch profiles
  int k_per_class = 4;
  int reroute_k = 4;
  bool rerouting = true;
  int max_moved_flows = 1;
  bool compensate_tbf = true;
  int preconfigure_trees = 1;
  int tree_search_limit = 100000;
  bool management = true;
  std::string controller_host;  // empty: lowest host id
  double management_rate_bps = 1e6;
  std::int64_t management_burst_bytes = 3000;
  std::int64_t management_packet_bytes = kDefaultMaxPacketBytes;
  double management_deadline_s = 0.1;

  void validate() const;
  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

struct NetworkState {
  topology::PhysicalTopology topology;
  devicemodel::ProfileRegistry profiles;
  devicemodel::TbfDeviationTable tbf_table = devicemodel::TbfDeviationTable::measured();
  ControllerConfig config;
  int num_classes = 0;
  topology::TreeCatalog trees;
  std::map<std::string, EmbeddedFlow> flows;
  std::map<QueueKey, QueueState> queues;
  bool initialized = false;

  int lowest_class() const { return num_classes - 1; }
};

/// Fresh state over `topo`: the first `config.preconfigure_trees` trees are
/// configured (tree 0 gets VLAN 1). No flows, management not yet embedded.
NetworkState make_state(topology::PhysicalTopology topo, devicemodel::ProfileRegistry profiles,
                        devicemodel::TbfDeviationTable table, ControllerConfig config);

/// Static description of an egress port used by the bound computation.
struct PortContext {
  double link_rate_bps = 0.0;
  double propagation_s = 0.0;
  const devicemodel::SwitchProfile* profile = nullptr;
  int active_ports = 0;

  netcalc::ServiceCurve service() const;
  double budget_bits() const;
};

PortContext port_context(const NetworkState& state, const PortKey& port);

/// Per-class load on one egress port.
struct PortLoad {
  std::vector<netcalc::ArrivalCurve> per_class;
  std::vector<double> max_packet_bits;

  explicit PortLoad(int num_classes = 0)
      : per_class(num_classes), max_packet_bits(num_classes, 0.0) {}
};

struct ClassBound {
  bool overloaded = false;
  netcalc::ServiceCurve residual;
  double blocking_bits = 0.0;
  double delay_s = kInfinity;
  double backlog_bits = kInfinity;
};

/// Bound for class `q` on a port: residual strict-priority service given the
/// higher classes, plus non-preemptive blocking by one maximum-size frame for
/// every class that has lower classes beneath it. `probe` is added to the
/// class-q aggregate (used to weight links for a prospective flow).
ClassBound class_bound(const PortContext& ctx, const PortLoad& load, int q,
                       const netcalc::ArrivalCurve& probe = {});

struct FlowBounds {
  std::vector<netcalc::ArrivalCurve> per_hop_arrival;
  std::vector<double> per_hop_delay_s;
  double delay_bound_s = 0.0;
};

struct Analysis {
  std::map<QueueKey, QueueState> queues;
  std::map<std::string, FlowBounds> flows;
  bool converged = true;
  int iterations = 0;
};

/// Recomputes every bound from scratch. Arrival curves propagate hop by hop
/// as (r, b + r*d) where d is the hop's delay bound; on cyclic port
/// dependencies this is iterated to its fixed point from below. Diverging
/// or non-converging systems report infinite bounds.
Analysis analyze(const NetworkState& state, const std::map<std::string, EmbeddedFlow>& flows);

/// Stores the analysis results in the flow records and queue cache.
void apply_analysis(NetworkState& state, const Analysis& analysis);

/// Recomputes from scratch and compares with the cached values. Returns a
/// human-readable list of mismatches (empty when consistent).
std::vector<std::string> verify_consistency(const NetworkState& state);

int pcp_for_class(int class_q);

}  // namespace detnet
