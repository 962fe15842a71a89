#include "detnet/admission.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "detnet/errors.hpp"

namespace detnet::admission {
namespace {

using routing::PathCandidate;

struct Placement {
  NetworkState state;
  std::string flow_id;
};

struct Outcome {
  std::optional<Placement> placement;
  std::optional<RejectReason> reason;
  std::string detail;
};

double effective_rate(const NetworkState& state, const FlowRequest& r) {
  if (!state.config.compensate_tbf) return r.rate_bps;
  return devicemodel::compensate_rate(state.tbf_table, r.rate_bps, r.burst_bytes);
}

std::vector<Hop> full_path(const NetworkState& state, const FlowRequest& r,
                           const PathCandidate& c) {
  std::vector<Hop> hops = c.hops;
  if (state.topology.is_host(r.dst)) {
    const auto access = state.topology.access_of(r.dst);
    hops.push_back({access.switch_id, access.switch_port});
  }
  return hops;
}

// Gives the candidate a VLAN: an already configured tree, or the first tree
// in enumeration order containing it (configured on `state`).
std::optional<RejectReason> bind_tree(NetworkState& state, PathCandidate& c, std::string& detail) {
  if (c.vlan_id) return std::nullopt;
  if (const auto* t = state.trees.find_configured(c.links)) {
    c.tree_index = t->index;
    c.vlan_id = t->vlan_id;
    return std::nullopt;
  }
  auto tree = state.trees.first_containing(c.links, state.config.tree_search_limit);
  if (!tree) {
    detail = "no spanning tree within the search limit contains the path";
    return RejectReason::kUnroutable;
  }
  try {
    (void)topology::bridge_priorities(state.topology, *tree);
    c.vlan_id = state.trees.assign_vlan(*tree);
    c.tree_index = tree->index;
  } catch (const VlanExhausted& e) {
    detail = e.what();
    return RejectReason::kVlanExhausted;
  } catch (const DepthExceeded& e) {
    detail = e.what();
    return RejectReason::kUnroutable;
  }
  return std::nullopt;
}

void commit_flow(NetworkState& state, const Decision& d, int vlan_id) {
  EmbeddedFlow flow = d.flow;
  flow.vlan_id = vlan_id;
  state.flows[flow.request.id] = std::move(flow);
  apply_analysis(state, d.analysis);
}

// Tries every ranked candidate in order; the first one that passes wins.
Outcome place(const NetworkState& state, const FlowRequest& request) {
  Outcome out;
  const double rate = effective_rate(state, request);
  const auto access = state.topology.access_of(request.src);
  if (rate > state.topology.links()[access.link].rate_bps) {
    out.reason = RejectReason::kUnroutable;
    out.detail = "rate exceeds the source access link";
    return out;
  }

  const netcalc::ArrivalCurve probe{rate, 8.0 * static_cast<double>(request.burst_bytes)};
  std::vector<routing::QueueLevelGraph> graphs;
  for (int q = 0; q < state.num_classes; ++q) {
    graphs.push_back(routing::build_queue_level_graph(state, q, probe));
  }
  auto candidates = routing::rank_candidates(graphs, state.trees, state.topology, request.src,
                                             request.dst, state.config.k_per_class);
  if (candidates.empty()) {
    out.reason = RejectReason::kUnroutable;
    out.detail = "no path with finite weight in any class";
    return out;
  }

  for (auto& candidate : candidates) {
    NetworkState trial = state;
    std::string detail;
    if (auto why = bind_tree(trial, candidate, detail)) {
      if (!out.reason) {
        out.reason = why;
        out.detail = detail;
      }
      continue;
    }
    auto d = check_path(trial, request, candidate);
    if (!d.accepted) {
      if (!out.reason) {
        out.reason = d.reason;
        out.detail = d.detail;
      }
      continue;
    }
    commit_flow(trial, d, *candidate.vlan_id);
    out.placement = Placement{std::move(trial), request.id};
    out.reason.reset();
    out.detail.clear();
    return out;
  }
  return out;
}

// Moves one existing flow at a time onto an alternative physical path and
// retries the new flow, up to `moves_left` moved flows.
std::optional<std::pair<NetworkState, std::vector<ReroutedFlow>>> place_with_moves(
    const NetworkState& state, const FlowRequest& request, int moves_left,
    const std::set<std::string>& moved) {
  if (moves_left <= 0) return std::nullopt;
  const auto& topo = state.topology;
  const auto src_sw = routing::attach_point(topo, request.src);
  const auto dst_sw = routing::attach_point(topo, request.dst);
  if (src_sw == dst_sw) return std::nullopt;
  const auto wanted = routing::yen_k_paths(topo, src_sw, dst_sw, 1);
  if (wanted.empty()) return std::nullopt;

  for (const auto& fid : routing::reroute_candidates(state, wanted.front().links)) {
    if (moved.count(fid)) continue;
    const EmbeddedFlow& current = state.flows.at(fid);
    const auto from = routing::attach_point(topo, current.request.src);
    const auto to = routing::attach_point(topo, current.request.dst);
    auto current_links = routing::path_links(topo, current.path);
    if (topo.is_host(current.request.dst)) current_links.pop_back();

    for (const auto& alt : routing::yen_k_paths(topo, from, to, state.config.reroute_k)) {
      if (alt.links == current_links) continue;
      NetworkState trial = state;
      trial.flows.erase(fid);
      apply_analysis(trial, analyze(trial, trial.flows));

      auto cand = routing::candidate_from_links(topo, from, alt.links, current.class_q);
      std::string detail;
      if (bind_tree(trial, cand, detail)) continue;
      auto moved_decision = check_path(trial, current.request, cand);
      if (!moved_decision.accepted) continue;
      commit_flow(trial, moved_decision, *cand.vlan_id);
      trial.flows.at(fid).management = current.management;

      ReroutedFlow record{fid, trial.flows.at(fid).path, *cand.vlan_id};
      auto outcome = place(trial, request);
      if (outcome.placement) {
        return std::make_pair(std::move(outcome.placement->state), std::vector{record});
      }
      auto next_moved = moved;
      next_moved.insert(fid);
      if (auto deeper = place_with_moves(trial, request, moves_left - 1, next_moved)) {
        deeper->second.insert(deeper->second.begin(), record);
        return deeper;
      }
    }
  }
  return std::nullopt;
}

void validate_endpoints(const NetworkState& state, const FlowRequest& r) {
  const auto& topo = state.topology;
  if (!topo.has_node(r.src)) throw UnknownEndpoint("unknown source '" + r.src + "'");
  if (!topo.has_node(r.dst)) throw UnknownEndpoint("unknown destination '" + r.dst + "'");
  if (!topo.is_host(r.src)) throw UnknownEndpoint("source '" + r.src + "' is not a host");
}

EmbedResult accepted_result(const NetworkState& state, const std::string& id) {
  const auto& f = state.flows.at(id);
  EmbedResult res;
  res.accepted = true;
  res.vlan_id = f.vlan_id;
  res.class_q = f.class_q;
  res.path = f.path;
  res.delay_bound_s = f.delay_bound_s;
  res.switch_configs = switch_configs(state);
  res.host_configs.push_back(host_config(state, id));
  return res;
}

}  // namespace

std::string to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kDeadlineInfeasible: return "DeadlineInfeasible";
    case RejectReason::kBufferOverflow: return "BufferOverflow";
    case RejectReason::kUnroutable: return "Unroutable";
    case RejectReason::kVlanExhausted: return "VlanExhausted";
    case RejectReason::kWouldViolateExisting: return "WouldViolateExisting";
  }
  return "Unknown";
}

RejectReason reject_reason_from_string(const std::string& s) {
  for (auto r : {RejectReason::kDeadlineInfeasible, RejectReason::kBufferOverflow,
                 RejectReason::kUnroutable, RejectReason::kVlanExhausted,
                 RejectReason::kWouldViolateExisting}) {
    if (to_string(r) == s) return r;
  }
  throw SchemaMismatch("unknown rejection reason '" + s + "'");
}

Decision check_path(const NetworkState& state, const FlowRequest& request,
                    const PathCandidate& candidate) {
  request.validate();
  const auto& topo = state.topology;
  const auto from = routing::attach_point(topo, request.src);
  const auto to = routing::attach_point(topo, request.dst);
  if (candidate.switches.empty() || candidate.switches.front() != from ||
      candidate.switches.back() != to) {
    throw InvalidParameter("candidate path does not connect " + request.src + " and " +
                           request.dst);
  }

  Decision d;
  d.flow.request = request;
  d.flow.compensated_rate_bps = effective_rate(state, request);
  d.flow.class_q = candidate.class_q;
  d.flow.vlan_id = candidate.vlan_id.value_or(0);
  d.flow.path = full_path(state, request, candidate);

  auto flows = state.flows;
  flows[request.id] = d.flow;
  d.analysis = analyze(state, flows);

  const auto& own = d.analysis.flows.at(request.id);
  d.flow.per_hop_arrival = own.per_hop_arrival;
  d.flow.per_hop_delay_s = own.per_hop_delay_s;
  d.flow.delay_bound_s = own.delay_bound_s;
  d.delay_bound_s = own.delay_bound_s;
  for (const auto& hop : d.flow.path) {
    d.per_hop_backlogs.push_back(
        d.analysis.queues.at({hop.switch_id, hop.egress_port, candidate.class_q}).backlog_bits);
  }

  std::ostringstream msg;
  if (!(own.delay_bound_s <= request.deadline_s)) {
    d.reason = RejectReason::kDeadlineInfeasible;
    msg << "delay bound " << own.delay_bound_s * 1e6 << " us exceeds deadline "
        << request.deadline_s * 1e6 << " us";
    d.detail = msg.str();
    return d;
  }
  for (const auto& [key, qs] : d.analysis.queues) {
    if (!(qs.backlog_bits <= qs.budget_bits)) {
      d.reason = RejectReason::kBufferOverflow;
      msg << "backlog " << qs.backlog_bits << " bits exceeds buffer " << qs.budget_bits
          << " bits at " << key.switch_id << ":" << key.port << " class " << key.class_q;
      d.detail = msg.str();
      return d;
    }
  }
  for (const auto& [id, f] : state.flows) {
    const double bound = d.analysis.flows.at(id).delay_bound_s;
    if (!(bound <= f.request.deadline_s)) {
      d.reason = RejectReason::kWouldViolateExisting;
      msg << "flow " << id << " would reach " << bound * 1e6 << " us against a deadline of "
          << f.request.deadline_s * 1e6 << " us";
      d.detail = msg.str();
      return d;
    }
  }
  d.accepted = true;
  return d;
}

std::vector<SwitchConfigRecord> switch_configs(const NetworkState& state) {
  const auto& topo = state.topology;
  std::map<std::string, SwitchConfigRecord> records;
  for (const auto& id : topo.switch_ids()) {
    auto& rec = records[id];
    rec.switch_id = id;
    rec.queue_count = state.num_classes;
    rec.spq_enabled = true;
  }
  for (const auto& tree : state.trees.configured()) {
    const int vlan = *tree.vlan_id;
    for (const auto& [sw, prio] : topology::bridge_priorities(topo, tree)) {
      records[sw].mstp_instances.push_back({vlan, prio});
    }
    for (std::size_t li : tree.links) {
      const auto& l = topo.links()[li];
      records[l.a].port_vlan_memberships[l.a_port].push_back(vlan);
      records[l.b].port_vlan_memberships[l.b_port].push_back(vlan);
    }
    for (const auto& host : topo.host_ids()) {
      const auto access = topo.access_of(host);
      records[access.switch_id].port_vlan_memberships[access.switch_port].push_back(vlan);
    }
  }
  std::vector<SwitchConfigRecord> out;
  for (auto& [id, rec] : records) out.push_back(std::move(rec));
  return out;
}

HostConfigRecord host_config(const NetworkState& state, const std::string& flow_id) {
  auto it = state.flows.find(flow_id);
  if (it == state.flows.end()) throw UnknownFlow("unknown flow '" + flow_id + "'");
  const auto& f = it->second;
  return {f.request.src,           f.request.id, f.request.rate_bps, f.request.burst_bytes,
          f.vlan_id,               pcp_for_class(f.class_q)};
}

EmbedResult embed(NetworkState& state, const FlowRequest& request) {
  request.validate();
  if (state.flows.count(request.id)) {
    throw DuplicateFlowId("flow id '" + request.id + "' is already embedded");
  }
  validate_endpoints(state, request);

  auto outcome = place(state, request);
  if (outcome.placement) {
    state = std::move(outcome.placement->state);
    return accepted_result(state, request.id);
  }

  if (state.config.rerouting && state.config.max_moved_flows > 0) {
    if (auto moved = place_with_moves(state, request, state.config.max_moved_flows, {})) {
      state = std::move(moved->first);
      auto res = accepted_result(state, request.id);
      res.rerouted_flows = std::move(moved->second);
      for (const auto& r : res.rerouted_flows) {
        res.host_configs.push_back(host_config(state, r.flow_id));
      }
      return res;
    }
  }

  EmbedResult res;
  res.accepted = false;
  res.reason = outcome.reason.value_or(RejectReason::kUnroutable);
  res.detail = outcome.detail;
  return res;
}

void remove(NetworkState& state, const std::string& flow_id) {
  auto it = state.flows.find(flow_id);
  if (it == state.flows.end()) throw UnknownFlow("unknown flow '" + flow_id + "'");
  state.flows.erase(it);
  apply_analysis(state, analyze(state, state.flows));
}

EmbedResult init_management(NetworkState& state) {
  EmbedResult res;
  res.accepted = true;
  const auto& cfg = state.config;
  if (!cfg.management) {
    state.initialized = true;
    return res;
  }
  const auto& topo = state.topology;
  auto hosts = topo.host_ids();
  if (hosts.empty()) throw InvalidParameter("management traffic needs a controller host");
  const std::string controller = cfg.controller_host.empty() ? hosts.front() : cfg.controller_host;
  if (!topo.is_host(controller)) {
    throw UnknownEndpoint("controller host '" + controller + "' is not a host");
  }
  const auto* tree0 = state.trees.configured_by_vlan(topology::kMinVlan);
  if (!tree0) throw InvalidParameter("tree 0 is not configured");

  NetworkState trial = state;
  const auto access = topo.access_of(controller).switch_id;
  res.class_q = state.lowest_class();
  res.vlan_id = topology::kMinVlan;
  for (const auto& sw : topo.switch_ids()) {
    if (sw == access) continue;
    FlowRequest r;
    r.id = "mgmt:" + sw;
    r.src = controller;
    r.dst = sw;
    r.rate_bps = cfg.management_rate_bps;
    r.burst_bytes = cfg.management_burst_bytes;
    r.deadline_s = cfg.management_deadline_s;
    r.max_packet_bytes = cfg.management_packet_bytes;
    if (trial.flows.count(r.id)) throw DuplicateFlowId("management already embedded");

    auto links = topology::tree_path(topo, *tree0, access, sw);
    auto cand = routing::candidate_from_links(topo, access, links, state.lowest_class());
    cand.tree_index = tree0->index;
    cand.vlan_id = tree0->vlan_id;
    auto d = check_path(trial, r, cand);
    if (!d.accepted) {
      res.accepted = false;
      res.reason = d.reason;
      res.detail = "management flow " + r.id + ": " + d.detail;
      return res;
    }
    d.flow.management = true;
    commit_flow(trial, d, topology::kMinVlan);
    res.host_configs.push_back(host_config(trial, r.id));
  }
  trial.initialized = true;
  state = std::move(trial);
  res.switch_configs = switch_configs(state);
  return res;
}

}  // namespace detnet::admission
