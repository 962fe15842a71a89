#pragma once

// Flow dispatcher: the REST surface of the controller.

#include <memory>
#include <shared_mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "detnet/network_state.hpp"

namespace detnet {

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// Owns the controller state. Mutations (flow admission and removal,
/// topology ingest) are serialized; queries run under a shared lock.
class FlowService {
 public:
  /// `state` may be uninitialized; flow endpoints answer 503 until a
  /// topology has been ingested through POST /lldp.
  explicit FlowService(NetworkState state);

  /// Dispatches one request. Never throws.
  Response handle(const std::string& method, const std::string& path, const std::string& body);

  NetworkState state() const;

  /// Binds the HTTP/1.1 listener. Port 0 picks a free port. Returns the
  /// bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  bool listen();
  bool serve(const std::string& host, int port) { return bind(host, port) >= 0 && listen(); }
  void stop();

 private:
  Response post_flow(const std::string& body);
  Response delete_flow(const std::string& id);
  Response list_flows() const;
  Response post_lldp(const std::string& body);
  Response post_simulate(const std::string& body) const;

  mutable std::shared_mutex mutex_;
  NetworkState state_;
  struct Http;
  std::shared_ptr<Http> http_;
};

}  // namespace detnet
