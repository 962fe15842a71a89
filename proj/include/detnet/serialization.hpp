#pragma once

// JSON documents: controller snapshots and the wire format of the flow
// dispatcher. Snapshots keep SI units; wire documents use bps, bytes and
// microseconds.

#include <string>

#include <nlohmann/json.hpp>

#include "detnet/admission.hpp"
#include "detnet/network_state.hpp"

namespace detnet {

inline constexpr int kSnapshotSchemaVersion = 1;

nlohmann::json snapshot_json(const NetworkState& state);

/// Rebuilds a state from a snapshot document. Cached bounds are checked
/// against a fresh recomputation. Throws SchemaMismatch.
NetworkState restore_json(const nlohmann::json& doc);

/// Writes a byte-stable snapshot (sorted keys, two-space indent).
void snapshot(const NetworkState& state, const std::string& path);
std::string snapshot_string(const NetworkState& state);

/// Throws IoError / SchemaMismatch.
NetworkState restore(const std::string& path);

nlohmann::json config_to_json(const ControllerConfig& c);
ControllerConfig config_from_json(const nlohmann::json& j);

namespace wire {

/// Finite values as numbers, infinities as "inf" / "-inf".
nlohmann::json number(double v);

/// {id, src, dst, rate_bps, burst_bytes, deadline_us[, max_packet_bytes]}
FlowRequest flow_request(const nlohmann::json& j);
nlohmann::json flow_request(const FlowRequest& r);

nlohmann::json path(const std::vector<Hop>& hops);
nlohmann::json embedded_flow(const EmbeddedFlow& f);
nlohmann::json embed_result(const admission::EmbedResult& r);
nlohmann::json switch_config(const admission::SwitchConfigRecord& r);
nlohmann::json host_config(const admission::HostConfigRecord& r);

}  // namespace wire

}  // namespace detnet
