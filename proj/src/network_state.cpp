#include "detnet/network_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detnet/errors.hpp"

namespace detnet {
namespace {

constexpr int kMaxFixedPointIterations = 2000;
constexpr double kFixedPointTolerance = 1e-12;
constexpr double kDivergenceBits = 1e18;

bool same_value(double a, double b) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::fabs(a - b) <= kFixedPointTolerance * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

void FlowRequest::validate() const {
  if (id.empty()) throw InvalidParameter("flow id must not be empty");
  if (src.empty() || dst.empty()) throw InvalidParameter("flow " + id + ": missing endpoint");
  if (src == dst) throw InvalidParameter("flow " + id + ": src equals dst");
  if (!(rate_bps > 0.0) || !std::isfinite(rate_bps)) {
    throw InvalidParameter("flow " + id + ": rate must be > 0");
  }
  if (burst_bytes < 1) throw InvalidParameter("flow " + id + ": burst must be >= 1 byte");
  if (!(deadline_s > 0.0)) throw InvalidParameter("flow " + id + ": deadline must be > 0");
  if (max_packet_bytes < 1) throw InvalidParameter("flow " + id + ": packet size must be >= 1");
}

void ControllerConfig::validate() const {
  if (num_classes < 0 || num_classes > 8) throw InvalidParameter("num_classes must be in [0, 8]");
  if (k_per_class < 1) throw InvalidParameter("k_per_class must be >= 1");
  if (reroute_k < 1) throw InvalidParameter("reroute_k must be >= 1");
  if (max_moved_flows < 0) throw InvalidParameter("max_moved_flows must be >= 0");
  if (preconfigure_trees < 1) throw InvalidParameter("preconfigure_trees must be >= 1");
  if (tree_search_limit < 1) throw InvalidParameter("tree_search_limit must be >= 1");
  if (management) {
    if (!(management_rate_bps > 0.0) || management_burst_bytes < 1 ||
        management_packet_bytes < 1 || !(management_deadline_s > 0.0)) {
      throw InvalidParameter("invalid management traffic parameters");
    }
  }
}

NetworkState make_state(topology::PhysicalTopology topo, devicemodel::ProfileRegistry profiles,
                        devicemodel::TbfDeviationTable table, ControllerConfig config) {
  config.validate();
  NetworkState state;
  state.topology = std::move(topo);
  state.profiles = std::move(profiles);
  state.tbf_table = std::move(table);
  state.config = config;

  int classes = 8;
  for (const auto& id : state.topology.switch_ids()) {
    const auto& profile = state.profiles.get(state.topology.node(id).profile);
    classes = std::min(classes, profile.num_queues);
    if (state.topology.active_ports(id) > profile.port_count) {
      throw InvalidParameter("switch " + id + " uses more ports than its profile " +
                             profile.name + " provides");
    }
  }
  if (config.num_classes > classes) {
    throw InvalidParameter("num_classes exceeds the queue count of some switch");
  }
  state.num_classes = config.num_classes > 0 ? config.num_classes : classes;

  state.trees = topology::TreeCatalog(state.topology);
  for (int i = 0; i < config.preconfigure_trees; ++i) {
    auto tree = state.trees.tree_at(i);
    if (!tree) break;
    state.trees.assign_vlan(*tree);
  }
  return state;
}

netcalc::ServiceCurve PortContext::service() const {
  return netcalc::port_service(link_rate_bps, profile->t_proc_s, profile->t_spq_s);
}

double PortContext::budget_bits() const {
  return 8.0 * static_cast<double>(devicemodel::per_queue_buffer(*profile, active_ports));
}

PortContext port_context(const NetworkState& state, const PortKey& port) {
  const auto& topo = state.topology;
  if (!topo.is_switch(port.switch_id)) {
    throw UnknownEndpoint("'" + port.switch_id + "' is not a switch");
  }
  const auto& ref = topo.port(port.switch_id, port.port);
  const auto& link = topo.links()[ref.link];
  PortContext ctx;
  ctx.link_rate_bps = link.rate_bps;
  ctx.propagation_s = link.propagation_s;
  ctx.profile = &state.profiles.get(topo.node(port.switch_id).profile);
  ctx.active_ports = topo.active_ports(port.switch_id);
  return ctx;
}

ClassBound class_bound(const PortContext& ctx, const PortLoad& load, int q,
                       const netcalc::ArrivalCurve& probe) {
  const int classes = static_cast<int>(load.per_class.size());
  if (q < 0 || q >= classes) throw InvalidParameter("class " + std::to_string(q) + " out of range");

  netcalc::ArrivalCurve higher;
  for (int c = 0; c < q; ++c) higher = higher + load.per_class[c];

  ClassBound out;
  if (q < classes - 1) {
    double blocking = 8.0 * ctx.profile->max_frame_bytes;
    for (int c = q + 1; c < classes; ++c) blocking = std::max(blocking, load.max_packet_bits[c]);
    out.blocking_bits = blocking;
  }

  const auto port = ctx.service();
  if (higher.rate_bps >= port.rate_bps) {
    out.overloaded = true;
    return out;
  }
  out.residual = netcalc::residual_spq(port, higher, out.blocking_bits);
  const auto own = load.per_class[q] + probe;
  if (own.rate_bps > out.residual.rate_bps) {
    out.overloaded = true;
    return out;
  }
  out.delay_s = netcalc::delay_bound(own, out.residual) + ctx.propagation_s;
  out.backlog_bits = netcalc::backlog_bound(own, out.residual);
  return out;
}

Analysis analyze(const NetworkState& state, const std::map<std::string, EmbeddedFlow>& flows) {
  struct Item {
    const EmbeddedFlow* flow;
    std::vector<PortKey> ports;
    std::vector<double> burst;
  };
  const int classes = state.num_classes;
  std::vector<Item> items;
  std::map<PortKey, PortContext> contexts;
  for (const auto& [id, f] : flows) {
    if (f.class_q < 0 || f.class_q >= classes) {
      throw InvalidParameter("flow " + id + " uses class " + std::to_string(f.class_q));
    }
    Item item{&f, {}, {}};
    for (const auto& hop : f.path) {
      PortKey key{hop.switch_id, hop.egress_port};
      if (!contexts.count(key)) contexts.emplace(key, port_context(state, key));
      item.ports.push_back(std::move(key));
    }
    item.burst.assign(f.path.size(), f.source_curve().burst_bits);
    items.push_back(std::move(item));
  }

  Analysis result;
  std::map<QueueKey, ClassBound> bounds;
  std::map<PortKey, PortLoad> loads;
  bool converged = false;
  int iter = 0;
  for (; iter < kMaxFixedPointIterations && !converged; ++iter) {
    loads.clear();
    for (const auto& item : items) {
      const auto rate = item.flow->compensated_rate_bps;
      for (std::size_t k = 0; k < item.ports.size(); ++k) {
        auto [it, fresh] = loads.try_emplace(item.ports[k], classes);
        auto& load = it->second;
        const int q = item.flow->class_q;
        load.per_class[q] = load.per_class[q] + netcalc::ArrivalCurve{rate, item.burst[k]};
        load.max_packet_bits[q] = std::max(load.max_packet_bits[q], item.flow->packet_bits());
      }
    }
    bounds.clear();
    for (const auto& item : items) {
      for (const auto& port : item.ports) {
        QueueKey key{port.switch_id, port.port, item.flow->class_q};
        if (bounds.count(key)) continue;
        const auto& load = loads.at(port);
        if (std::isinf(load.per_class[key.class_q].burst_bits)) {
          ClassBound overloaded;
          overloaded.overloaded = true;
          bounds.emplace(key, overloaded);
          continue;
        }
        bounds.emplace(key, class_bound(contexts.at(port), load, key.class_q));
      }
    }
    converged = true;
    for (auto& item : items) {
      const auto rate = item.flow->compensated_rate_bps;
      for (std::size_t k = 1; k < item.ports.size(); ++k) {
        const auto& prev = item.ports[k - 1];
        const double d = bounds.at({prev.switch_id, prev.port, item.flow->class_q}).delay_s;
        double next = item.burst[k - 1] + rate * d;
        if (!(next < kDivergenceBits)) next = kInfinity;
        if (!same_value(next, item.burst[k])) converged = false;
        item.burst[k] = next;
      }
    }
  }
  result.converged = converged;
  result.iterations = iter;

  for (const auto& item : items) {
    FlowBounds fb;
    const auto rate = item.flow->compensated_rate_bps;
    double total = 0.0;
    for (std::size_t k = 0; k < item.ports.size(); ++k) {
      const auto& port = item.ports[k];
      const double d =
          converged ? bounds.at({port.switch_id, port.port, item.flow->class_q}).delay_s : kInfinity;
      fb.per_hop_arrival.push_back({rate, item.burst[k]});
      fb.per_hop_delay_s.push_back(d);
      total += d;
    }
    fb.delay_bound_s = total;
    result.flows.emplace(item.flow->request.id, std::move(fb));

    for (std::size_t k = 0; k < item.ports.size(); ++k) {
      const auto& port = item.ports[k];
      QueueKey key{port.switch_id, port.port, item.flow->class_q};
      auto& qs = result.queues[key];
      qs.flows.push_back(item.flow->request.id);
    }
  }
  for (auto& [key, qs] : result.queues) {
    const auto& b = bounds.at(key);
    const auto& load = loads.at(key.port_key());
    qs.aggregate = load.per_class[key.class_q];
    qs.max_packet_bits = load.max_packet_bits[key.class_q];
    qs.residual = b.residual;
    qs.overloaded = b.overloaded || !converged;
    qs.delay_s = converged ? b.delay_s : kInfinity;
    qs.backlog_bits = converged ? b.backlog_bits : kInfinity;
    qs.budget_bits = contexts.at(key.port_key()).budget_bits();
  }
  return result;
}

void apply_analysis(NetworkState& state, const Analysis& analysis) {
  for (auto& [id, f] : state.flows) {
    const auto& fb = analysis.flows.at(id);
    f.per_hop_arrival = fb.per_hop_arrival;
    f.per_hop_delay_s = fb.per_hop_delay_s;
    f.delay_bound_s = fb.delay_bound_s;
  }
  state.queues = analysis.queues;
}

std::vector<std::string> verify_consistency(const NetworkState& state) {
  std::vector<std::string> issues;
  const auto fresh = analyze(state, state.flows);
  if (fresh.queues != state.queues) {
    std::ostringstream msg;
    msg << "queue cache differs from recomputation (" << state.queues.size() << " cached, "
        << fresh.queues.size() << " recomputed)";
    issues.push_back(msg.str());
  }
  for (const auto& [id, f] : state.flows) {
    const auto& fb = fresh.flows.at(id);
    if (fb.delay_bound_s != f.delay_bound_s || fb.per_hop_arrival != f.per_hop_arrival ||
        fb.per_hop_delay_s != f.per_hop_delay_s) {
      issues.push_back("flow " + id + " bounds differ from recomputation");
    }
    if (!(f.delay_bound_s <= f.request.deadline_s)) {
      issues.push_back("flow " + id + " exceeds its deadline");
    }
  }
  for (const auto& [key, qs] : state.queues) {
    if (!(qs.backlog_bits <= qs.budget_bits)) {
      issues.push_back("queue " + key.switch_id + ":" + std::to_string(key.port) + "/" +
                       std::to_string(key.class_q) + " exceeds its buffer budget");
    }
  }
  return issues;
}

int pcp_for_class(int class_q) { return 7 - class_q; }

}  // namespace detnet
