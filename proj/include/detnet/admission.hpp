#pragma once

// Flow admission: bound checks on candidate paths, the embed/remove pipeline
// with single-level rerouting, and device configuration records.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "detnet/network_state.hpp"
#include "detnet/routing.hpp"

namespace detnet::admission {

enum class RejectReason {
  kDeadlineInfeasible,
  kBufferOverflow,
  kUnroutable,
  kVlanExhausted,
  kWouldViolateExisting,
};

std::string to_string(RejectReason reason);
RejectReason reject_reason_from_string(const std::string& s);

struct Decision {
  bool accepted = false;
  std::optional<RejectReason> reason;
  std::string detail;
  double delay_bound_s = kInfinity;
  std::vector<double> per_hop_backlogs;
  EmbeddedFlow flow;
  Analysis analysis;
};

/// Evaluates `candidate` for `request` against the current state without
/// changing it. The whole network is re-analysed with the flow added, so
/// every flow whose bound depends on the touched queues is rechecked.
Decision check_path(const NetworkState& state, const FlowRequest& request,
                    const routing::PathCandidate& candidate);

struct SwitchConfigRecord {
  struct MstpInstance {
    int vlan_id = 0;
    int bridge_priority = 0;
    friend bool operator==(const MstpInstance&, const MstpInstance&) = default;
  };
  std::string switch_id;
  std::vector<MstpInstance> mstp_instances;
  std::map<int, std::vector<int>> port_vlan_memberships;
  bool spq_enabled = true;
  int queue_count = 0;

  friend bool operator==(const SwitchConfigRecord&, const SwitchConfigRecord&) = default;
};

struct HostConfigRecord {
  std::string host_id;
  std::string flow_id;
  double tbf_rate_bps = 0.0;
  std::int64_t tbf_burst_bytes = 0;
  int vlan_id = 0;
  int pcp = 0;

  friend bool operator==(const HostConfigRecord&, const HostConfigRecord&) = default;
};

/// One record per switch covering every configured tree.
std::vector<SwitchConfigRecord> switch_configs(const NetworkState& state);
HostConfigRecord host_config(const NetworkState& state, const std::string& flow_id);

struct ReroutedFlow {
  std::string flow_id;
  std::vector<Hop> path;
  int vlan_id = 0;
};

struct EmbedResult {
  bool accepted = false;
  std::optional<RejectReason> reason;
  std::string detail;
  int vlan_id = 0;
  int class_q = 0;
  std::vector<Hop> path;
  double delay_bound_s = 0.0;
  std::vector<ReroutedFlow> rerouted_flows;
  std::vector<SwitchConfigRecord> switch_configs;
  std::vector<HostConfigRecord> host_configs;
};

/// Admits `request` or leaves `state` untouched. Throws DuplicateFlowId,
/// UnknownEndpoint or InvalidParameter for malformed requests.
EmbedResult embed(NetworkState& state, const FlowRequest& request);

/// Throws UnknownFlow.
void remove(NetworkState& state, const std::string& flow_id);

/// Embeds in-band management traffic: one aggregate flow from the controller
/// host to every other switch along tree 0 (VLAN 1) at the lowest priority.
/// On rejection the state is left unchanged and not initialized.
EmbedResult init_management(NetworkState& state);

}  // namespace detnet::admission
