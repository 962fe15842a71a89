#pragma once

// Packet-level discrete-event replay of an admitted network.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "detnet/network_state.hpp"

namespace detnet::sim {

enum class SourceModel { kGreedy, kPeriodic };

struct ProcModel {
  enum class Kind { kConstantUpper, kUniform } kind = Kind::kUniform;
  double lo_s = 1e-6;
  double hi_s = 4.15e-6;  // capped at the switch profile's processing time
};

/// Where the scheduler overhead is paid. kPerFrame: every frame becomes
/// eligible for transmission t_spq after it is enqueued. kPerClassSwitchover:
/// the port spends t_spq before a frame whose class differs from the previous
/// one. Only kPerFrame is covered by the controller's bounds.
enum class ArbitrationModel { kPerFrame, kPerClassSwitchover };

struct Scenario {
  NetworkState state;
  std::map<std::string, SourceModel> sources;  // flows not listed are greedy
  double duration_s = 1.0;
  std::uint64_t seed = 1;
  ProcModel proc;
  ArbitrationModel arbitration = ArbitrationModel::kPerFrame;
  bool tbf_leak = true;  // sources send at the measured (leaky) shaper rate
};

struct FlowStats {
  double max_latency_s = 0.0;
  double p99_latency_s = 0.0;
  std::int64_t packets_sent = 0;
  std::int64_t packets_received = 0;
  std::int64_t packets_dropped = 0;
  double delay_bound_s = 0.0;
  double source_rate_bps = 0.0;

  friend bool operator==(const FlowStats&, const FlowStats&) = default;
};

struct QueueStats {
  double max_backlog_bits = 0.0;
  double backlog_bound_bits = 0.0;
  std::int64_t drops = 0;

  friend bool operator==(const QueueStats&, const QueueStats&) = default;
};

struct Violation {
  enum class Kind { kLatency, kBacklog, kDrop } kind = Kind::kLatency;
  std::string subject;
  double observed = 0.0;
  double bound = 0.0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct SimReport {
  std::map<std::string, FlowStats> flows;
  std::map<QueueKey, QueueStats> queues;
  std::vector<Violation> violations;
  std::int64_t events = 0;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// Observed value within `bound` up to floating-point noise.
bool within_bound(double observed, double bound);

/// Runs the scenario. Throws InvalidScenario for negative durations or
/// source entries naming unknown flows.
SimReport run(const Scenario& scenario);

struct SizeLimits {
  int max_switches = 5;
  int max_hosts = 8;
  int max_flows = 20;
  double duration_s = 1.0;
};

struct ScenarioSummary {
  std::uint64_t seed = 0;
  int switches = 0;
  int hosts = 0;
  int flows_requested = 0;
  int flows_admitted = 0;
  std::int64_t packets = 0;
  std::size_t violations = 0;
  double min_latency_margin_s = 0.0;  // min over flows of bound - observed
  double max_latency_ratio = 0.0;     // max over flows of observed / bound
  double max_backlog_ratio = 0.0;

  friend bool operator==(const ScenarioSummary&, const ScenarioSummary&) = default;
};

struct SuiteReport {
  std::vector<ScenarioSummary> scenarios;
  std::size_t total_violations = 0;
  std::vector<Violation> violations;

  friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

/// Random connected topologies within `limits`, filled with random flows
/// through admission and replayed with greedy sources.
SuiteReport stress_suite(std::uint64_t seed, int n_scenarios, const SizeLimits& limits = {});

std::string to_string(Violation::Kind kind);

nlohmann::json to_json(const SimReport& r);
nlohmann::json to_json(const SuiteReport& r);

/// Scenario document: {"state": <snapshot> | "state_file": path, "duration_s",
/// "seed", "proc": {"kind", "lo_us", "hi_us"}, "arbitration", "tbf_leak",
/// "sources": {flow_id: "greedy" | "periodic"}}. `state` is used when the
/// document carries neither.
Scenario scenario_from_json(const nlohmann::json& j, const NetworkState* state = nullptr);
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace detnet::sim
