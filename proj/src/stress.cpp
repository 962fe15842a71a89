#include <algorithm>
#include <cmath>
#include <random>

#include "detnet/admission.hpp"
#include "detnet/simulator.hpp"

namespace detnet::sim {
namespace {

using topology::Link;
using topology::Node;
using topology::NodeKind;

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

topology::PhysicalTopology random_topology(std::mt19937_64& rng, const SizeLimits& limits) {
  const int n_sw = limits.max_switches < 2 ? 1 : uniform_int(rng, 2, limits.max_switches);
  const int port_cap = devicemodel::SwitchProfile::fs_s2805s().port_count;

  std::vector<Node> nodes;
  std::vector<std::string> sw;
  for (int i = 0; i < n_sw; ++i) {
    sw.push_back("s" + std::to_string(i + 1));
    nodes.push_back({sw.back(), NodeKind::kSwitch, devicemodel::ProfileRegistry::default_name()});
  }
  std::vector<int> next_port(n_sw, 1);
  std::vector<Link> links;
  auto prop = [&] {
    return std::bernoulli_distribution(0.5)(rng) ? 0.0
                                                 : std::uniform_real_distribution<double>(0, 2e-6)(rng);
  };
  auto connect = [&](int a, int b) {
    links.push_back({sw[a], next_port[a]++, sw[b], next_port[b]++, 1e9, prop()});
  };
  std::vector<std::vector<char>> adj(n_sw, std::vector<char>(n_sw, 0));
  for (int k = 1; k < n_sw; ++k) {
    const int j = uniform_int(rng, 0, k - 1);
    connect(j, k);
    adj[j][k] = adj[k][j] = 1;
  }
  for (int a = 0; a < n_sw; ++a) {
    for (int b = a + 1; b < n_sw; ++b) {
      if (!adj[a][b] && std::bernoulli_distribution(0.35)(rng)) connect(a, b);
    }
  }

  const int n_hosts = uniform_int(rng, 2, std::max(2, limits.max_hosts));
  for (int h = 0; h < n_hosts; ++h) {
    std::vector<int> open;
    for (int i = 0; i < n_sw; ++i) {
      if (next_port[i] <= port_cap) open.push_back(i);
    }
    if (open.empty()) break;
    const int s = open[uniform_int(rng, 0, static_cast<int>(open.size()) - 1)];
    const std::string id = "h" + std::to_string(h + 1);
    nodes.push_back({id, NodeKind::kHost, ""});
    links.push_back({id, 1, sw[s], next_port[s]++, 1e9, prop()});
  }
  return topology::PhysicalTopology(std::move(nodes), std::move(links));
}

}  // namespace

SuiteReport stress_suite(std::uint64_t seed, int n_scenarios, const SizeLimits& limits) {
  SuiteReport suite;
  std::mt19937_64 master(seed);
  for (int i = 0; i < n_scenarios; ++i) {
    ScenarioSummary summary;
    summary.seed = master();
    std::mt19937_64 rng(summary.seed);

    auto topo = random_topology(rng, limits);
    auto state = make_state(topo, devicemodel::ProfileRegistry(),
                            devicemodel::TbfDeviationTable::measured(), ControllerConfig{});
    admission::init_management(state);
    summary.switches = static_cast<int>(state.topology.switch_ids().size());
    const auto hosts = state.topology.host_ids();
    summary.hosts = static_cast<int>(hosts.size());

    const int n_flows = uniform_int(rng, 1, std::max(1, limits.max_flows));
    for (int f = 0; f < n_flows && hosts.size() >= 2; ++f) {
      const int a = uniform_int(rng, 0, summary.hosts - 1);
      int b = uniform_int(rng, 0, summary.hosts - 2);
      if (b >= a) ++b;
      FlowRequest r;
      r.id = "f" + std::to_string(f + 1);
      r.src = hosts[a];
      r.dst = hosts[b];
      r.rate_bps = std::round(log_uniform(rng, 1e6, 2e8));
      r.burst_bytes = uniform_int(rng, 1542, 8 * 1542);
      r.deadline_s = log_uniform(rng, 50e-6, 5e-3);
      ++summary.flows_requested;
      if (admission::embed(state, r).accepted) ++summary.flows_admitted;
    }

    Scenario sc;
    sc.state = std::move(state);
    sc.duration_s = limits.duration_s;
    sc.seed = summary.seed;
    const auto report = run(sc);

    summary.min_latency_margin_s = kInfinity;
    for (const auto& [id, fs] : report.flows) {
      summary.packets += fs.packets_received;
      summary.min_latency_margin_s =
          std::min(summary.min_latency_margin_s, fs.delay_bound_s - fs.max_latency_s);
      if (fs.delay_bound_s > 0) {
        summary.max_latency_ratio =
            std::max(summary.max_latency_ratio, fs.max_latency_s / fs.delay_bound_s);
      }
    }
    if (report.flows.empty()) summary.min_latency_margin_s = 0.0;
    for (const auto& [key, qs] : report.queues) {
      if (qs.backlog_bound_bits > 0) {
        summary.max_backlog_ratio =
            std::max(summary.max_backlog_ratio, qs.max_backlog_bits / qs.backlog_bound_bits);
      }
    }
    summary.violations = report.violations.size();
    suite.total_violations += report.violations.size();
    for (auto v : report.violations) {
      v.subject = "scenario " + std::to_string(i) + " " + v.subject;
      suite.violations.push_back(std::move(v));
    }
    suite.scenarios.push_back(summary);
  }
  return suite;
}

}  // namespace detnet::sim
