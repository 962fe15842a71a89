#include "detnet/service.hpp"

#include <httplib.h>

#include <mutex>

#include "detnet/admission.hpp"
#include "detnet/errors.hpp"
#include "detnet/serialization.hpp"
#include "detnet/simulator.hpp"

namespace detnet {
namespace {

using nlohmann::json;

Response error(int status, const std::string& reason, const std::string& detail) {
  return {status, {{"error", reason}, {"detail", detail}}};
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

struct FlowService::Http {
  httplib::Server server;
};

FlowService::FlowService(NetworkState state)
    : state_(std::move(state)), http_(std::make_shared<Http>()) {
  auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  auto& srv = http_->server;
  srv.Get(R"(/.*)", bridge);
  srv.Post(R"(/.*)", bridge);
  srv.Delete(R"(/.*)", bridge);
}

NetworkState FlowService::state() const {
  std::shared_lock lock(mutex_);
  return state_;
}

Response FlowService::handle(const std::string& method, const std::string& path,
                             const std::string& body) {
  try {
    if (path == "/flows" && method == "POST") return post_flow(body);
    if (path == "/flows" && method == "GET") return list_flows();
    if (path.rfind("/flows/", 0) == 0 && method == "DELETE") return delete_flow(path.substr(7));
    if (path.rfind("/flows/", 0) == 0 && method == "GET") {
      std::shared_lock lock(mutex_);
      auto it = state_.flows.find(path.substr(7));
      if (it == state_.flows.end()) return error(404, "UnknownFlow", path.substr(7));
      return {200, wire::embedded_flow(it->second)};
    }
    if (path == "/topology" && method == "GET") {
      std::shared_lock lock(mutex_);
      return {200, json(state_.topology)};
    }
    if (path == "/state" && method == "GET") {
      std::shared_lock lock(mutex_);
      return {200, snapshot_json(state_)};
    }
    if (path == "/lldp" && method == "POST") return post_lldp(body);
    if (path == "/simulate" && method == "POST") return post_simulate(body);
    return error(404, "NotFound", method + " " + path);
  } catch (const InvalidParameter& e) {
    return error(400, "InvalidParameter", e.what());
  } catch (const SchemaMismatch& e) {
    return error(400, "SchemaMismatch", e.what());
  } catch (const InvalidScenario& e) {
    return error(400, "InvalidScenario", e.what());
  } catch (const TopologyError& e) {
    return error(400, "TopologyError", e.what());
  } catch (const std::exception& e) {
    return error(500, "InternalError", e.what());
  }
}

Response FlowService::post_flow(const std::string& body) {
  const auto request = wire::flow_request(parse_body(body));
  std::unique_lock lock(mutex_);
  if (!state_.initialized) return error(503, "NotInitialized", "no topology ingested yet");
  try {
    auto result = admission::embed(state_, request);
    auto doc = wire::embed_result(result);
    doc["flow_id"] = request.id;
    return {result.accepted ? 201 : 409, doc};
  } catch (const DuplicateFlowId& e) {
    return {409, {{"accepted", false}, {"reason", "DuplicateFlowId"}, {"detail", e.what()}}};
  } catch (const UnknownEndpoint& e) {
    return {400, {{"accepted", false}, {"reason", "UnknownEndpoint"}, {"detail", e.what()}}};
  }
}

Response FlowService::delete_flow(const std::string& id) {
  std::unique_lock lock(mutex_);
  if (!state_.initialized) return error(503, "NotInitialized", "no topology ingested yet");
  auto it = state_.flows.find(id);
  if (it == state_.flows.end()) return error(404, "UnknownFlow", "unknown flow '" + id + "'");
  if (it->second.management) return error(409, "ManagementFlow", id + " carries management traffic");
  admission::remove(state_, id);
  return {200, {{"removed", id}}};
}

Response FlowService::list_flows() const {
  std::shared_lock lock(mutex_);
  json flows = json::array();
  for (const auto& [id, f] : state_.flows) flows.push_back(wire::embedded_flow(f));
  return {200, {{"flows", flows}}};
}

// Replaces the topology. Allowed while only management traffic is embedded.
Response FlowService::post_lldp(const std::string& body) {
  const auto reports = topology::reports_from_json(parse_body(body));
  std::unique_lock lock(mutex_);
  for (const auto& [id, f] : state_.flows) {
    if (!f.management) return error(409, "FlowsEmbedded", "remove flows before re-ingesting");
  }
  std::vector<std::string> warnings;
  auto topo = topology::ingest_lldp(reports, devicemodel::ProfileRegistry::default_name(),
                                    devicemodel::SwitchProfile::fs_s2805s().link_rate_bps,
                                    &warnings);
  auto fresh = make_state(std::move(topo), state_.profiles, state_.tbf_table, state_.config);
  auto mgmt = admission::init_management(fresh);
  if (!mgmt.accepted) {
    return error(409, mgmt.reason ? admission::to_string(*mgmt.reason) : "Unroutable",
                 mgmt.detail);
  }
  state_ = std::move(fresh);
  return {200, {{"warnings", warnings}, {"topology", json(state_.topology)}}};
}

Response FlowService::post_simulate(const std::string& body) const {
  const auto doc = body.empty() ? json::object() : parse_body(body);
  sim::Scenario scenario;
  {
    std::shared_lock lock(mutex_);
    if (!state_.initialized) return error(503, "NotInitialized", "no topology ingested yet");
    json own = doc;
    own.erase("state");
    own.erase("state_file");
    scenario = sim::scenario_from_json(own, &state_);
  }
  return {200, sim::to_json(sim::run(scenario))};
}

int FlowService::bind(const std::string& host, int port) {
  if (port == 0) return http_->server.bind_to_any_port(host);
  return http_->server.bind_to_port(host, port) ? port : -1;
}

bool FlowService::listen() { return http_->server.listen_after_bind(); }

void FlowService::stop() { http_->server.stop(); }

}  // namespace detnet
