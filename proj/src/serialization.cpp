#include "detnet/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "detnet/errors.hpp"

namespace detnet {
namespace {

using nlohmann::json;

// JSON has no infinity; keep it as a string so snapshots stay lossless.
json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw SchemaMismatch("bad number '" + s + "'");
  }
  return j.get<double>();
}

json curve(const netcalc::ArrivalCurve& c) {
  return {{"rate_bps", number(c.rate_bps)}, {"burst_bits", number(c.burst_bits)}};
}

netcalc::ArrivalCurve curve_from(const json& j) {
  return {number_from(j.at("rate_bps")), number_from(j.at("burst_bits"))};
}

json hops(const std::vector<Hop>& path) {
  json out = json::array();
  for (const auto& h : path) out.push_back({{"switch", h.switch_id}, {"port", h.egress_port}});
  return out;
}

std::vector<Hop> hops_from(const json& j) {
  std::vector<Hop> out;
  for (const auto& e : j) out.push_back({e.at("switch").get<std::string>(), e.at("port").get<int>()});
  return out;
}

json request_si(const FlowRequest& r) {
  return {{"id", r.id},
          {"src", r.src},
          {"dst", r.dst},
          {"rate_bps", r.rate_bps},
          {"burst_bytes", r.burst_bytes},
          {"deadline_s", r.deadline_s},
          {"max_packet_bytes", r.max_packet_bytes}};
}

FlowRequest request_si_from(const json& j) {
  FlowRequest r;
  j.at("id").get_to(r.id);
  j.at("src").get_to(r.src);
  j.at("dst").get_to(r.dst);
  j.at("rate_bps").get_to(r.rate_bps);
  j.at("burst_bytes").get_to(r.burst_bytes);
  j.at("deadline_s").get_to(r.deadline_s);
  j.at("max_packet_bytes").get_to(r.max_packet_bytes);
  return r;
}

json flow_si(const EmbeddedFlow& f) {
  json arrivals = json::array();
  for (const auto& a : f.per_hop_arrival) arrivals.push_back(curve(a));
  json delays = json::array();
  for (double d : f.per_hop_delay_s) delays.push_back(number(d));
  return {{"request", request_si(f.request)},
          {"compensated_rate_bps", f.compensated_rate_bps},
          {"class_q", f.class_q},
          {"vlan_id", f.vlan_id},
          {"path", hops(f.path)},
          {"per_hop_arrival", arrivals},
          {"per_hop_delay_s", delays},
          {"delay_bound_s", number(f.delay_bound_s)},
          {"management", f.management}};
}

EmbeddedFlow flow_si_from(const json& j) {
  EmbeddedFlow f;
  f.request = request_si_from(j.at("request"));
  j.at("compensated_rate_bps").get_to(f.compensated_rate_bps);
  j.at("class_q").get_to(f.class_q);
  j.at("vlan_id").get_to(f.vlan_id);
  f.path = hops_from(j.at("path"));
  for (const auto& a : j.at("per_hop_arrival")) f.per_hop_arrival.push_back(curve_from(a));
  for (const auto& d : j.at("per_hop_delay_s")) f.per_hop_delay_s.push_back(number_from(d));
  f.delay_bound_s = number_from(j.at("delay_bound_s"));
  j.at("management").get_to(f.management);
  return f;
}

json queue_si(const QueueKey& k, const QueueState& q) {
  return {{"switch", k.switch_id},
          {"port", k.port},
          {"class_q", k.class_q},
          {"aggregate", curve(q.aggregate)},
          {"residual", {{"rate_bps", number(q.residual.rate_bps)},
                        {"latency_s", number(q.residual.latency_s)}}},
          {"overloaded", q.overloaded},
          {"delay_s", number(q.delay_s)},
          {"backlog_bits", number(q.backlog_bits)},
          {"budget_bits", number(q.budget_bits)},
          {"max_packet_bits", number(q.max_packet_bits)},
          {"flows", q.flows}};
}

std::pair<QueueKey, QueueState> queue_si_from(const json& j) {
  QueueKey k{j.at("switch").get<std::string>(), j.at("port").get<int>(),
             j.at("class_q").get<int>()};
  QueueState q;
  q.aggregate = curve_from(j.at("aggregate"));
  q.residual = {number_from(j.at("residual").at("rate_bps")),
                number_from(j.at("residual").at("latency_s"))};
  j.at("overloaded").get_to(q.overloaded);
  q.delay_s = number_from(j.at("delay_s"));
  q.backlog_bits = number_from(j.at("backlog_bits"));
  q.budget_bits = number_from(j.at("budget_bits"));
  q.max_packet_bits = number_from(j.at("max_packet_bits"));
  j.at("flows").get_to(q.flows);
  return {std::move(k), std::move(q)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

json config_to_json(const ControllerConfig& c) {
  return {{"num_classes", c.num_classes},
          {"k_per_class", c.k_per_class},
          {"reroute_k", c.reroute_k},
          {"rerouting", c.rerouting},
          {"max_moved_flows", c.max_moved_flows},
          {"compensate_tbf", c.compensate_tbf},
          {"preconfigure_trees", c.preconfigure_trees},
          {"tree_search_limit", c.tree_search_limit},
          {"management", c.management},
          {"controller_host", c.controller_host},
          {"management_rate_bps", c.management_rate_bps},
          {"management_burst_bytes", c.management_burst_bytes},
          {"management_packet_bytes", c.management_packet_bytes},
          {"management_deadline_s", c.management_deadline_s}};
}

ControllerConfig config_from_json(const json& j) {
  ControllerConfig c;
  try {
    c.num_classes = j.value("num_classes", c.num_classes);
    c.k_per_class = j.value("k_per_class", c.k_per_class);
    c.reroute_k = j.value("reroute_k", c.reroute_k);
    c.rerouting = j.value("rerouting", c.rerouting);
    c.max_moved_flows = j.value("max_moved_flows", c.max_moved_flows);
    c.compensate_tbf = j.value("compensate_tbf", c.compensate_tbf);
    c.preconfigure_trees = j.value("preconfigure_trees", c.preconfigure_trees);
    c.tree_search_limit = j.value("tree_search_limit", c.tree_search_limit);
    c.management = j.value("management", c.management);
    c.controller_host = j.value("controller_host", c.controller_host);
    c.management_rate_bps = j.value("management_rate_bps", c.management_rate_bps);
    c.management_burst_bytes = j.value("management_burst_bytes", c.management_burst_bytes);
    c.management_packet_bytes = j.value("management_packet_bytes", c.management_packet_bytes);
    c.management_deadline_s = j.value("management_deadline_s", c.management_deadline_s);
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("controller config: ") + e.what());
  }
  c.validate();
  return c;
}

json snapshot_json(const NetworkState& state) {
  json doc;
  doc["schema_version"] = kSnapshotSchemaVersion;
  doc["topology"] = state.topology;
  json profiles = json::array();
  for (const auto& [name, p] : state.profiles.all()) profiles.push_back(p);
  doc["profiles"] = profiles;
  doc["tbf_table"] = state.tbf_table;
  doc["config"] = config_to_json(state.config);
  doc["num_classes"] = state.num_classes;
  doc["trees"] = state.trees.configured();
  json flows = json::array();
  for (const auto& [id, f] : state.flows) flows.push_back(flow_si(f));
  doc["flows"] = flows;
  json queues = json::array();
  for (const auto& [k, q] : state.queues) queues.push_back(queue_si(k, q));
  doc["queues"] = queues;
  doc["initialized"] = state.initialized;
  return doc;
}

NetworkState restore_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("schema_version", -1) != kSnapshotSchemaVersion) {
      throw SchemaMismatch("snapshot schema_version missing or unsupported");
    }
    NetworkState state;
    state.topology = topology::topology_from_json(doc.at("topology"));
    state.profiles = devicemodel::profiles_from_json({{"profiles", doc.at("profiles")}});
    state.tbf_table = doc.at("tbf_table").get<devicemodel::TbfDeviationTable>();
    state.config = config_from_json(doc.at("config"));
    doc.at("num_classes").get_to(state.num_classes);
    state.trees = topology::TreeCatalog(state.topology);
    state.trees.restore(doc.at("trees").get<std::vector<topology::SpanningTree>>());
    for (const auto& e : doc.at("flows")) {
      auto f = flow_si_from(e);
      const auto id = f.request.id;
      if (!state.flows.emplace(id, std::move(f)).second) {
        throw SchemaMismatch("duplicate flow '" + id + "' in snapshot");
      }
    }
    for (const auto& e : doc.at("queues")) state.queues.insert(queue_si_from(e));
    doc.at("initialized").get_to(state.initialized);

    std::vector<std::string> issues;
    try {
      issues = verify_consistency(state);
    } catch (const Error& e) {
      issues.push_back(e.what());
    }
    if (!issues.empty()) throw SchemaMismatch("snapshot is inconsistent: " + issues.front());
    return state;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("snapshot: ") + e.what());
  } catch (const SchemaMismatch&) {
    throw;
  } catch (const Error& e) {
    throw SchemaMismatch(std::string("snapshot: ") + e.what());
  }
}

std::string snapshot_string(const NetworkState& state) {
  return snapshot_json(state).dump(2) + "\n";
}

void snapshot(const NetworkState& state, const std::string& path) {
  const auto text = snapshot_string(state);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

NetworkState restore(const std::string& path) {
  const auto text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaMismatch(path + ": " + e.what());
  }
  return restore_json(doc);
}

namespace wire {

json number(double v) { return ::detnet::number(v); }

FlowRequest flow_request(const json& j) {
  FlowRequest r;
  try {
    j.at("id").get_to(r.id);
    j.at("src").get_to(r.src);
    j.at("dst").get_to(r.dst);
    j.at("rate_bps").get_to(r.rate_bps);
    j.at("burst_bytes").get_to(r.burst_bytes);
    r.deadline_s = j.at("deadline_us").get<double>() / 1e6;
    r.max_packet_bytes = j.value("max_packet_bytes", kDefaultMaxPacketBytes);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("flow request: ") + e.what());
  }
  r.validate();
  return r;
}

json flow_request(const FlowRequest& r) {
  return {{"id", r.id},
          {"src", r.src},
          {"dst", r.dst},
          {"rate_bps", r.rate_bps},
          {"burst_bytes", r.burst_bytes},
          {"deadline_us", std::round(r.deadline_s * 1e12) / 1e6},  // picosecond resolution
          {"max_packet_bytes", r.max_packet_bytes}};
}

json path(const std::vector<Hop>& p) { return hops(p); }

json embedded_flow(const EmbeddedFlow& f) {
  json per_hop = json::array();
  for (double d : f.per_hop_delay_s) per_hop.push_back(number(d * 1e6));
  return {{"request", flow_request(f.request)},
          {"compensated_rate_bps", f.compensated_rate_bps},
          {"class_q", f.class_q},
          {"pcp", pcp_for_class(f.class_q)},
          {"vlan_id", f.vlan_id},
          {"path", hops(f.path)},
          {"per_hop_delay_us", per_hop},
          {"delay_bound_us", number(f.delay_bound_s * 1e6)},
          {"management", f.management}};
}

json switch_config(const admission::SwitchConfigRecord& r) {
  json mstp = json::array();
  for (const auto& m : r.mstp_instances) {
    mstp.push_back({{"vlan_id", m.vlan_id}, {"bridge_priority", m.bridge_priority}});
  }
  json ports = json::object();
  for (const auto& [port, vlans] : r.port_vlan_memberships) ports[std::to_string(port)] = vlans;
  return {{"switch_id", r.switch_id},
          {"mstp_instances", mstp},
          {"port_vlan_memberships", ports},
          {"spq_enabled", r.spq_enabled},
          {"queue_count", r.queue_count}};
}

json host_config(const admission::HostConfigRecord& r) {
  return {{"host_id", r.host_id},
          {"flow_id", r.flow_id},
          {"tbf", {{"rate_bps", r.tbf_rate_bps}, {"burst_bytes", r.tbf_burst_bytes}}},
          {"vlan_id", r.vlan_id},
          {"pcp", r.pcp}};
}

json embed_result(const admission::EmbedResult& r) {
  json j;
  j["accepted"] = r.accepted;
  if (!r.accepted) {
    j["reason"] = r.reason ? admission::to_string(*r.reason) : "Unroutable";
    j["detail"] = r.detail;
    return j;
  }
  j["vlan_id"] = r.vlan_id;
  j["class_q"] = r.class_q;
  j["pcp"] = pcp_for_class(r.class_q);
  j["path"] = hops(r.path);
  j["delay_bound_us"] = number(r.delay_bound_s * 1e6);
  json moved = json::array();
  for (const auto& m : r.rerouted_flows) {
    moved.push_back({{"flow_id", m.flow_id}, {"path", hops(m.path)}, {"vlan_id", m.vlan_id}});
  }
  j["rerouted_flows"] = moved;
  json sw = json::array();
  for (const auto& s : r.switch_configs) sw.push_back(switch_config(s));
  j["switch_configs"] = sw;
  json hc = json::array();
  for (const auto& h : r.host_configs) hc.push_back(host_config(h));
  j["host_configs"] = hc;
  return j;
}

}  // namespace wire

}  // namespace detnet
