#include "detnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>

#include "detnet/errors.hpp"
#include "detnet/serialization.hpp"

namespace detnet::sim {
namespace {

struct Packet {
  int flow = 0;
  int hop = 0;
  double first_arrival = 0.0;
  double eligible = 0.0;
};

enum class EventType { kEmit, kArrive, kEnqueue, kWake, kTxDone };

struct Event {
  double time;
  std::uint64_t seq;
  EventType type;
  int target;  // flow for kEmit, port otherwise (switch for kArrive)
  Packet packet;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct FlowRt {
  const EmbeddedFlow* flow = nullptr;
  std::vector<int> ports;
  double rate_bps = 0.0;
  double packet_bits = 0.0;
  double burst_bits = 0.0;
  SourceModel model = SourceModel::kGreedy;
  double phase_s = 0.0;
  double access_delay_s = 0.0;  // serialization plus propagation on the host link
  std::int64_t next = 0;
  std::vector<double> latencies;
  FlowStats stats;
};

struct SwitchRt {
  double t_proc_s = 0.0;
  double last_completion = 0.0;
};

struct PortRt {
  QueueKey base;  // class_q unused
  int sw = 0;
  double rate_bps = 0.0;
  double propagation_s = 0.0;
  double t_spq_s = 0.0;
  double budget_bits = 0.0;
  std::vector<std::deque<Packet>> queues;
  std::vector<double> occupancy;
  std::vector<double> max_backlog;
  std::vector<std::int64_t> drops;
  std::vector<char> used;
  bool busy = false;
  int last_class = -1;
  double pending_wake = kInfinity;
};

class Engine {
 public:
  explicit Engine(const Scenario& sc) : sc_(sc), rng_(sc.seed) {}

  SimReport run();

 private:
  void setup();
  void push(double t, EventType type, int target, const Packet& p = {}) {
    events_.push({t, seq_++, type, target, p});
  }
  double emission_time(const FlowRt& f, std::int64_t n) const;
  double proc_delay(const SwitchRt& s);
  void try_start(int port, double now);

  const Scenario& sc_;
  std::mt19937_64 rng_;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::uint64_t seq_ = 0;
  std::vector<FlowRt> flows_;
  std::vector<SwitchRt> switches_;
  std::vector<PortRt> ports_;
  int classes_ = 0;
};

double Engine::emission_time(const FlowRt& f, std::int64_t n) const {
  const double k = static_cast<double>(n);
  if (f.model == SourceModel::kPeriodic) return f.phase_s + k * f.packet_bits / f.rate_bps;
  return std::max(0.0, ((k + 1.0) * f.packet_bits - f.burst_bits) / f.rate_bps);
}

double Engine::proc_delay(const SwitchRt& s) {
  if (sc_.proc.kind == ProcModel::Kind::kConstantUpper) return s.t_proc_s;
  const double hi = std::min(sc_.proc.hi_s, s.t_proc_s);
  const double lo = std::min(sc_.proc.lo_s, hi);
  if (lo == hi) return hi;
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

void Engine::setup() {
  const auto& state = sc_.state;
  const auto& topo = state.topology;
  classes_ = state.num_classes;

  std::map<std::string, int> switch_index;
  for (const auto& id : topo.switch_ids()) {
    switch_index[id] = static_cast<int>(switches_.size());
    switches_.push_back({state.profiles.get(topo.node(id).profile).t_proc_s, 0.0});
  }

  std::map<PortKey, int> port_index;
  for (const auto& [id, f] : state.flows) {
    FlowRt rt;
    rt.flow = &f;
    const double compensated = devicemodel::compensate_rate(state.tbf_table, f.request.rate_bps,
                                                             f.request.burst_bytes);
    rt.rate_bps = sc_.tbf_leak ? compensated : f.request.rate_bps;
    rt.packet_bits = 8.0 * static_cast<double>(std::min(f.request.max_packet_bytes,
                                                        f.request.burst_bytes));
    rt.burst_bits = 8.0 * static_cast<double>(f.request.burst_bytes);
    if (auto it = sc_.sources.find(id); it != sc_.sources.end()) rt.model = it->second;
    if (rt.model == SourceModel::kPeriodic) {
      rt.phase_s = std::uniform_real_distribution<double>(0.0, rt.packet_bits / rt.rate_bps)(rng_);
    }
    const auto access = topo.access_of(f.request.src);
    const auto& link = topo.links()[access.link];
    rt.access_delay_s = rt.packet_bits / link.rate_bps + link.propagation_s;

    for (const auto& hop : f.path) {
      PortKey key{hop.switch_id, hop.egress_port};
      auto [it, fresh] = port_index.try_emplace(key, static_cast<int>(ports_.size()));
      if (fresh) {
        const auto ctx = port_context(state, key);
        PortRt p;
        p.base = {key.switch_id, key.port, 0};
        p.sw = switch_index.at(key.switch_id);
        p.rate_bps = ctx.link_rate_bps;
        p.propagation_s = ctx.propagation_s;
        p.t_spq_s = ctx.profile->t_spq_s;
        p.budget_bits = ctx.budget_bits();
        p.queues.resize(classes_);
        p.occupancy.assign(classes_, 0.0);
        p.max_backlog.assign(classes_, 0.0);
        p.drops.assign(classes_, 0);
        p.used.assign(classes_, 0);
        ports_.push_back(std::move(p));
      }
      ports_[it->second].used[f.class_q] = 1;
      rt.ports.push_back(it->second);
    }
    rt.stats.delay_bound_s = f.delay_bound_s;
    rt.stats.source_rate_bps = rt.rate_bps;
    flows_.push_back(std::move(rt));
  }
}

void Engine::try_start(int pi, double now) {
  auto& port = ports_[pi];
  if (port.busy) return;
  int chosen = -1;
  double earliest = kInfinity;
  for (int q = 0; q < classes_; ++q) {
    if (port.queues[q].empty()) continue;
    const double e = port.queues[q].front().eligible;
    if (e <= now) {
      chosen = q;
      break;
    }
    earliest = std::min(earliest, e);
  }
  if (chosen < 0) {
    if (earliest < port.pending_wake) {
      port.pending_wake = earliest;
      push(earliest, EventType::kWake, pi);
    }
    return;
  }
  Packet p = port.queues[chosen].front();
  port.queues[chosen].pop_front();
  const auto& f = flows_[p.flow];
  port.occupancy[chosen] -= f.packet_bits;
  double gap = 0.0;
  if (sc_.arbitration == ArbitrationModel::kPerClassSwitchover && port.last_class >= 0 &&
      port.last_class != chosen) {
    gap = port.t_spq_s;
  }
  port.last_class = chosen;
  port.busy = true;
  push(now + gap + f.packet_bits / port.rate_bps, EventType::kTxDone, pi, p);
}

SimReport Engine::run() {
  SimReport report;
  if (sc_.duration_s == 0.0) return report;
  setup();

  for (int i = 0; i < static_cast<int>(flows_.size()); ++i) {
    const double t = emission_time(flows_[i], 0);
    if (t < sc_.duration_s) push(t, EventType::kEmit, i);
  }

  while (!events_.empty()) {
    const Event ev = events_.top();
    events_.pop();
    ++report.events;
    const double now = ev.time;
    switch (ev.type) {
      case EventType::kEmit: {
        auto& f = flows_[ev.target];
        ++f.stats.packets_sent;
        Packet p;
        p.flow = ev.target;
        p.hop = 0;
        p.first_arrival = now + f.access_delay_s;
        push(p.first_arrival, EventType::kArrive, ports_[f.ports[0]].sw, p);
        const double next = emission_time(f, ++f.next);
        if (next < sc_.duration_s) push(next, EventType::kEmit, ev.target);
        break;
      }
      case EventType::kArrive: {
        auto& sw = switches_[ev.target];
        const double done = std::max(now + proc_delay(sw), sw.last_completion);
        sw.last_completion = done;
        push(done, EventType::kEnqueue, flows_[ev.packet.flow].ports[ev.packet.hop], ev.packet);
        break;
      }
      case EventType::kEnqueue: {
        auto& port = ports_[ev.target];
        auto& f = flows_[ev.packet.flow];
        const int q = f.flow->class_q;
        if (port.occupancy[q] + f.packet_bits > port.budget_bits) {
          ++port.drops[q];
          ++f.stats.packets_dropped;
          break;
        }
        Packet p = ev.packet;
        p.eligible = sc_.arbitration == ArbitrationModel::kPerFrame ? now + port.t_spq_s : now;
        port.queues[q].push_back(p);
        port.occupancy[q] += f.packet_bits;
        port.max_backlog[q] = std::max(port.max_backlog[q], port.occupancy[q]);
        try_start(ev.target, now);
        break;
      }
      case EventType::kWake: {
        auto& port = ports_[ev.target];
        if (port.pending_wake == now) port.pending_wake = kInfinity;
        try_start(ev.target, now);
        break;
      }
      case EventType::kTxDone: {
        auto& port = ports_[ev.target];
        port.busy = false;
        auto& f = flows_[ev.packet.flow];
        const double arrival = now + port.propagation_s;
        if (ev.packet.hop + 1 < static_cast<int>(f.ports.size())) {
          Packet p = ev.packet;
          ++p.hop;
          push(arrival, EventType::kArrive, ports_[f.ports[p.hop]].sw, p);
        } else {
          ++f.stats.packets_received;
          f.latencies.push_back(arrival - ev.packet.first_arrival);
        }
        try_start(ev.target, now);
        break;
      }
    }
  }

  for (auto& f : flows_) {
    const auto& id = f.flow->request.id;
    if (!f.latencies.empty()) {
      std::sort(f.latencies.begin(), f.latencies.end());
      f.stats.max_latency_s = f.latencies.back();
      const auto n = f.latencies.size();
      const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(n)));
      f.stats.p99_latency_s = f.latencies[std::max<std::size_t>(rank, 1) - 1];
    }
    if (!within_bound(f.stats.max_latency_s, f.stats.delay_bound_s)) {
      report.violations.push_back(
          {Violation::Kind::kLatency, id, f.stats.max_latency_s, f.stats.delay_bound_s});
    }
    report.flows.emplace(id, f.stats);
  }
  for (const auto& port : ports_) {
    for (int q = 0; q < classes_; ++q) {
      if (!port.used[q]) continue;
      QueueKey key{port.base.switch_id, port.base.port, q};
      QueueStats qs;
      qs.max_backlog_bits = port.max_backlog[q];
      auto it = sc_.state.queues.find(key);
      qs.backlog_bound_bits = it != sc_.state.queues.end() ? it->second.backlog_bits : 0.0;
      qs.drops = port.drops[q];
      const auto subject =
          key.switch_id + ":" + std::to_string(key.port) + "/" + std::to_string(key.class_q);
      if (!within_bound(qs.max_backlog_bits, qs.backlog_bound_bits)) {
        report.violations.push_back(
            {Violation::Kind::kBacklog, subject, qs.max_backlog_bits, qs.backlog_bound_bits});
      }
      if (qs.drops > 0) {
        report.violations.push_back(
            {Violation::Kind::kDrop, subject, static_cast<double>(qs.drops), 0.0});
      }
      report.queues.emplace(key, qs);
    }
  }
  return report;
}

}  // namespace

bool within_bound(double observed, double bound) {
  return observed <= bound * (1.0 + 1e-9) + 1e-12;
}

SimReport run(const Scenario& scenario) {
  if (!(scenario.duration_s >= 0.0) || !std::isfinite(scenario.duration_s)) {
    throw InvalidScenario("duration must be a finite non-negative number");
  }
  for (const auto& [id, model] : scenario.sources) {
    if (!scenario.state.flows.count(id)) {
      throw InvalidScenario("source model given for unknown flow '" + id + "'");
    }
  }
  const auto& proc = scenario.proc;
  if (proc.kind == ProcModel::Kind::kUniform &&
      !(proc.lo_s >= 0.0 && proc.lo_s <= proc.hi_s && std::isfinite(proc.hi_s))) {
    throw InvalidScenario("processing jitter needs 0 <= lo <= hi");
  }
  Engine engine(scenario);
  return engine.run();
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kLatency: return "latency";
    case Violation::Kind::kBacklog: return "backlog";
    case Violation::Kind::kDrop: return "drop";
  }
  return "unknown";
}

namespace {

nlohmann::json violation_json(const Violation& v) {
  return {{"kind", to_string(v.kind)},
          {"subject", v.subject},
          {"observed", v.observed},
          {"bound", wire::number(v.bound)}};
}

}  // namespace

nlohmann::json to_json(const SimReport& r) {
  nlohmann::json j;
  auto& flows = j["flows"] = nlohmann::json::object();
  for (const auto& [id, f] : r.flows) {
    flows[id] = {{"max_latency_us", f.max_latency_s * 1e6},
                 {"p99_latency_us", f.p99_latency_s * 1e6},
                 {"delay_bound_us", wire::number(f.delay_bound_s * 1e6)},
                 {"packets_sent", f.packets_sent},
                 {"packets_received", f.packets_received},
                 {"packets_dropped", f.packets_dropped},
                 {"source_rate_bps", f.source_rate_bps}};
  }
  auto& queues = j["queues"] = nlohmann::json::array();
  for (const auto& [k, q] : r.queues) {
    queues.push_back({{"switch", k.switch_id},
                      {"port", k.port},
                      {"class_q", k.class_q},
                      {"max_backlog_bits", q.max_backlog_bits},
                      {"backlog_bound_bits", wire::number(q.backlog_bound_bits)},
                      {"drops", q.drops}});
  }
  auto& v = j["violations"] = nlohmann::json::array();
  for (const auto& x : r.violations) v.push_back(violation_json(x));
  j["events"] = r.events;
  return j;
}

nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json j;
  auto& list = j["scenarios"] = nlohmann::json::array();
  for (const auto& s : r.scenarios) {
    list.push_back({{"seed", s.seed},
                    {"switches", s.switches},
                    {"hosts", s.hosts},
                    {"flows_requested", s.flows_requested},
                    {"flows_admitted", s.flows_admitted},
                    {"packets", s.packets},
                    {"violations", s.violations},
                    {"min_latency_margin_us", wire::number(s.min_latency_margin_s * 1e6)},
                    {"max_latency_ratio", s.max_latency_ratio},
                    {"max_backlog_ratio", s.max_backlog_ratio}});
  }
  j["total_violations"] = r.total_violations;
  auto& v = j["violations"] = nlohmann::json::array();
  for (const auto& x : r.violations) v.push_back(violation_json(x));
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j, const NetworkState* state) {
  Scenario s;
  try {
    if (j.contains("state")) {
      s.state = restore_json(j.at("state"));
    } else if (j.contains("state_file")) {
      s.state = restore(j.at("state_file").get<std::string>());
    } else if (state) {
      s.state = *state;
    } else {
      throw InvalidScenario("scenario names no state");
    }
    s.duration_s = j.value("duration_s", s.duration_s);
    s.seed = j.value("seed", s.seed);
    s.tbf_leak = j.value("tbf_leak", s.tbf_leak);
    if (j.contains("proc")) {
      const auto& p = j.at("proc");
      const auto kind = p.value("kind", std::string("uniform"));
      if (kind == "uniform") {
        s.proc.kind = ProcModel::Kind::kUniform;
      } else if (kind == "constant_upper") {
        s.proc.kind = ProcModel::Kind::kConstantUpper;
      } else {
        throw InvalidScenario("unknown processing model '" + kind + "'");
      }
      s.proc.lo_s = p.value("lo_us", s.proc.lo_s * 1e6) * 1e-6;
      s.proc.hi_s = p.value("hi_us", s.proc.hi_s * 1e6) * 1e-6;
    }
    const auto arb = j.value("arbitration", std::string("per_frame"));
    if (arb == "per_frame") {
      s.arbitration = ArbitrationModel::kPerFrame;
    } else if (arb == "per_class_switchover") {
      s.arbitration = ArbitrationModel::kPerClassSwitchover;
    } else {
      throw InvalidScenario("unknown arbitration model '" + arb + "'");
    }
    if (j.contains("sources")) {
      for (const auto& [id, v] : j.at("sources").items()) {
        const auto m = v.get<std::string>();
        if (m == "greedy") {
          s.sources[id] = SourceModel::kGreedy;
        } else if (m == "periodic") {
          s.sources[id] = SourceModel::kPeriodic;
        } else {
          throw InvalidScenario("unknown source model '" + m + "'");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidScenario(std::string("scenario: ") + e.what());
  }
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["state"] = snapshot_json(s.state);
  j["duration_s"] = s.duration_s;
  j["seed"] = s.seed;
  j["tbf_leak"] = s.tbf_leak;
  j["proc"] = {{"kind", s.proc.kind == ProcModel::Kind::kUniform ? "uniform" : "constant_upper"},
               {"lo_us", s.proc.lo_s * 1e6},
               {"hi_us", s.proc.hi_s * 1e6}};
  j["arbitration"] =
      s.arbitration == ArbitrationModel::kPerFrame ? "per_frame" : "per_class_switchover";
  auto& src = j["sources"] = nlohmann::json::object();
  for (const auto& [id, m] : s.sources) src[id] = m == SourceModel::kGreedy ? "greedy" : "periodic";
  return j;
}

}  // namespace detnet::sim
