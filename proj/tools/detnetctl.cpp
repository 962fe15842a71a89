// detnetctl: command-line front end of the controller.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "detnet/admission.hpp"
#include "detnet/errors.hpp"
#include "detnet/serialization.hpp"
#include "detnet/service.hpp"
#include "detnet/simulator.hpp"

namespace {

using nlohmann::json;
using namespace detnet;

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kUsage = 2;

struct Options {
  std::string state_path = "detnet-state.json";
  std::string profiles_path;
  std::string config_path;
  bool json = false;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaMismatch(path + ": " + e.what());
  }
}

std::string hop_list(const std::vector<Hop>& path) {
  std::string out;
  for (const auto& h : path) {
    if (!out.empty()) out += ' ';
    out += h.switch_id + ":" + std::to_string(h.egress_port);
  }
  return out;
}

int topo_load(const Options& opt, const std::string& file, bool lldp) {
  auto profiles =
      opt.profiles_path.empty() ? devicemodel::ProfileRegistry() : devicemodel::load_profiles(opt.profiles_path);
  auto config = opt.config_path.empty() ? ControllerConfig{} : config_from_json(read_json(opt.config_path));
  std::vector<std::string> warnings;
  topology::PhysicalTopology topo;
  if (lldp) {
    const auto reports = topology::reports_from_json(read_json(file));
    topo = topology::ingest_lldp(reports, devicemodel::ProfileRegistry::default_name(),
                                 profiles.get(devicemodel::ProfileRegistry::default_name()).link_rate_bps,
                                 &warnings);
  } else {
    topo = topology::load_topology(file);
  }
  auto state = make_state(std::move(topo), std::move(profiles),
                          devicemodel::TbfDeviationTable::measured(), config);
  const auto mgmt = admission::init_management(state);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  if (!mgmt.accepted) {
    std::cerr << "management traffic rejected: " << mgmt.detail << "\n";
    return kRejected;
  }
  snapshot(state, opt.state_path);
  if (opt.json) {
    std::cout << json{{"switches", state.topology.switch_ids()},
                      {"hosts", state.topology.host_ids()},
                      {"links", state.topology.links().size()},
                      {"management_flows", mgmt.host_configs.size()},
                      {"warnings", warnings}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << state.topology.switch_ids().size() << " switches, "
              << state.topology.host_ids().size() << " hosts, " << state.topology.links().size()
              << " links; " << mgmt.host_configs.size() << " management flows\n";
  }
  return kOk;
}

int topo_trees(const Options& opt, int limit) {
  auto state = restore(opt.state_path);
  const auto trees = topology::enumerate_spanning_trees(state.topology, limit);
  const auto& links = state.topology.links();
  if (opt.json) {
    json out = json::array();
    for (auto t : trees) {
      if (const auto* c = state.trees.find_configured(t.links); c && c->links == t.links) {
        t.vlan_id = c->vlan_id;
        t.configured = true;
      }
      out.push_back(t);
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  for (const auto& t : trees) {
    std::cout << "tree " << t.index << " root " << t.root;
    if (const auto* c = state.trees.find_configured(t.links); c && c->links == t.links) {
      std::cout << " vlan " << *c->vlan_id;
    }
    std::cout << ":";
    for (auto li : t.links) std::cout << " " << links[li].a << "-" << links[li].b;
    std::cout << "\n";
  }
  return kOk;
}

int flow_add(const Options& opt, FlowRequest r) {
  auto state = restore(opt.state_path);
  if (r.id.empty()) {
    for (int k = 1;; ++k) {
      r.id = "f" + std::to_string(k);
      if (!state.flows.count(r.id)) break;
    }
  }
  const auto result = admission::embed(state, r);
  if (result.accepted) snapshot(state, opt.state_path);
  if (opt.json) {
    auto j = wire::embed_result(result);
    j["flow_id"] = r.id;
    std::cout << j.dump(2) << "\n";
  } else if (result.accepted) {
    std::cout << "accepted " << r.id << ": vlan " << result.vlan_id << ", class "
              << result.class_q << " (pcp " << pcp_for_class(result.class_q) << "), bound "
              << std::setprecision(6) << result.delay_bound_s * 1e6 << " us, path "
              << hop_list(result.path) << "\n";
    for (const auto& m : result.rerouted_flows) {
      std::cout << "moved " << m.flow_id << " to vlan " << m.vlan_id << ": " << hop_list(m.path)
                << "\n";
    }
  } else {
    std::cout << "rejected " << r.id << ": " << admission::to_string(*result.reason) << " ("
              << result.detail << ")\n";
  }
  return result.accepted ? kOk : kRejected;
}

int flow_rm(const Options& opt, const std::string& id) {
  auto state = restore(opt.state_path);
  admission::remove(state, id);
  snapshot(state, opt.state_path);
  if (opt.json) {
    std::cout << json{{"removed", id}}.dump() << "\n";
  } else {
    std::cout << "removed " << id << "\n";
  }
  return kOk;
}

int flow_list(const Options& opt) {
  const auto state = restore(opt.state_path);
  if (opt.json) {
    json out = json::array();
    for (const auto& [id, f] : state.flows) out.push_back(wire::embedded_flow(f));
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  for (const auto& [id, f] : state.flows) {
    std::cout << id << (f.management ? " [mgmt]" : "") << " " << f.request.src << " -> "
              << f.request.dst << " vlan " << f.vlan_id << " class " << f.class_q << " bound "
              << std::setprecision(6) << f.delay_bound_s * 1e6 << " us / deadline "
              << f.request.deadline_s * 1e6 << " us\n";
  }
  return kOk;
}

int state_dump(const Options& opt, const std::string& out) {
  const auto state = restore(opt.state_path);
  if (out == "-") {
    std::cout << snapshot_string(state);
  } else {
    snapshot(state, out);
  }
  return kOk;
}

struct SimOptions {
  std::string scenario_path;
  double duration_s = 1.0;
  std::uint64_t seed = 1;
  std::string proc = "uniform";
  std::string arbitration = "per_frame";
  bool no_leak = false;
  bool periodic = false;
};

int sim_run(const Options& opt, const SimOptions& so) {
  auto state = restore(opt.state_path);
  sim::Scenario sc;
  if (!so.scenario_path.empty()) {
    sc = sim::scenario_from_json(read_json(so.scenario_path), &state);
  } else {
    json doc{{"duration_s", so.duration_s},
             {"seed", so.seed},
             {"proc", {{"kind", so.proc}}},
             {"arbitration", so.arbitration},
             {"tbf_leak", !so.no_leak}};
    if (so.periodic) {
      for (const auto& [id, f] : state.flows) doc["sources"][id] = "periodic";
    }
    sc = sim::scenario_from_json(doc, &state);
  }
  const auto report = sim::run(sc);
  if (opt.json) {
    std::cout << sim::to_json(report).dump(2) << "\n";
  } else {
    for (const auto& [id, f] : report.flows) {
      std::cout << id << ": max " << std::setprecision(6) << f.max_latency_s * 1e6 << " us, p99 "
                << f.p99_latency_s * 1e6 << " us, bound " << f.delay_bound_s * 1e6 << " us, "
                << f.packets_received << "/" << f.packets_sent << " packets\n";
    }
    for (const auto& v : report.violations) {
      std::cout << "violation " << sim::to_string(v.kind) << " " << v.subject << ": "
                << v.observed << " > " << v.bound << "\n";
    }
    std::cout << report.violations.size() << " violations\n";
  }
  return report.violations.empty() ? kOk : kRejected;
}

int sim_stress(const Options& opt, std::uint64_t seed, int n, const sim::SizeLimits& limits) {
  const auto suite = sim::stress_suite(seed, n, limits);
  if (opt.json) {
    std::cout << sim::to_json(suite).dump(2) << "\n";
  } else {
    for (const auto& s : suite.scenarios) {
      std::cout << "scenario " << s.seed << ": " << s.switches << " switches, "
                << s.flows_admitted << "/" << s.flows_requested << " flows, worst latency ratio "
                << std::setprecision(4) << s.max_latency_ratio << ", " << s.violations
                << " violations\n";
    }
    std::cout << suite.total_violations << " violations\n";
  }
  return suite.total_violations == 0 ? kOk : kRejected;
}

FlowService* g_service = nullptr;

int serve(const Options& opt, const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw InvalidParameter("--bind expects host:port");
  const auto host = bind.substr(0, colon);
  const int port = std::stoi(bind.substr(colon + 1));
  NetworkState state;
  std::ifstream probe(opt.state_path);
  if (probe) state = restore(opt.state_path);
  FlowService service(std::move(state));
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service) g_service->stop();
  });
  const int bound = service.bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << bind << "\n";
    return kUsage;
  }
  std::cerr << "listening on " << host << ":" << bound << "\n";
  service.listen();
  g_service = nullptr;
  snapshot(service.state(), opt.state_path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic networking controller"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--state", opt.state_path, "Controller snapshot file");
  app.add_option("--profiles", opt.profiles_path, "Switch profile document");
  app.add_option("--config", opt.config_path, "Controller configuration document");
  app.add_flag("--json", opt.json, "Machine-readable output");

  std::function<int()> action;

  auto* topo = app.add_subcommand("topo", "Topology commands");
  topo->require_subcommand(1);
  auto* load = topo->add_subcommand("load", "Load a topology and initialize the controller");
  std::string topo_file;
  bool lldp = false;
  load->add_option("file", topo_file, "Topology or LLDP report document")->required();
  load->add_flag("--lldp", lldp, "The file holds LLDP neighbour reports");
  load->callback([&] { action = [&] { return topo_load(opt, topo_file, lldp); }; });

  auto* trees = topo->add_subcommand("trees", "List spanning trees");
  int limit = 16;
  trees->add_option("--limit", limit, "Maximum number of trees")->check(CLI::PositiveNumber);
  trees->callback([&] { action = [&] { return topo_trees(opt, limit); }; });

  auto* flow = app.add_subcommand("flow", "Flow commands");
  flow->require_subcommand(1);
  auto* add = flow->add_subcommand("add", "Admit a flow");
  FlowRequest req;
  double deadline_us = 0.0;
  add->add_option("--id", req.id, "Flow id (default: next free fN)");
  add->add_option("--src", req.src)->required();
  add->add_option("--dst", req.dst)->required();
  add->add_option("--rate", req.rate_bps, "Rate in bit/s")->required();
  add->add_option("--burst", req.burst_bytes, "Burst in bytes")->required();
  add->add_option("--deadline", deadline_us, "Deadline in microseconds")->required();
  add->add_option("--max-packet", req.max_packet_bytes, "Largest packet in bytes");
  add->callback([&] {
    action = [&] {
      req.deadline_s = deadline_us * 1e-6;
      return flow_add(opt, req);
    };
  });

  auto* rm = flow->add_subcommand("rm", "Remove a flow");
  std::string rm_id;
  rm->add_option("id", rm_id)->required();
  rm->callback([&] { action = [&] { return flow_rm(opt, rm_id); }; });

  auto* list = flow->add_subcommand("list", "List embedded flows");
  list->callback([&] { action = [&] { return flow_list(opt); }; });

  auto* st = app.add_subcommand("state", "State commands");
  st->require_subcommand(1);
  auto* dump = st->add_subcommand("dump", "Write the snapshot to a file ('-' for stdout)");
  std::string dump_file;
  dump->add_option("file", dump_file)->required();
  dump->callback([&] { action = [&] { return state_dump(opt, dump_file); }; });

  auto* sim_cmd = app.add_subcommand("sim", "Simulation commands");
  sim_cmd->require_subcommand(1);
  auto* run = sim_cmd->add_subcommand("run", "Replay the current state");
  SimOptions so;
  run->add_option("--scenario", so.scenario_path, "Scenario document");
  run->add_option("--duration", so.duration_s, "Seconds of traffic");
  run->add_option("--seed", so.seed);
  run->add_option("--proc", so.proc)->check(CLI::IsMember({"uniform", "constant_upper"}));
  run->add_option("--arbitration", so.arbitration)
      ->check(CLI::IsMember({"per_frame", "per_class_switchover"}));
  run->add_flag("--no-leak", so.no_leak, "Sources send exactly at their configured rate");
  run->add_flag("--periodic", so.periodic, "Periodic instead of greedy sources");
  run->callback([&] { action = [&] { return sim_run(opt, so); }; });

  auto* stress = sim_cmd->add_subcommand("stress", "Random admitted scenarios");
  std::uint64_t stress_seed = 1;
  int scenarios = 20;
  sim::SizeLimits limits;
  stress->add_option("--seed", stress_seed);
  stress->add_option("--scenarios", scenarios)->check(CLI::NonNegativeNumber);
  stress->add_option("--max-switches", limits.max_switches)->check(CLI::Range(1, 16));
  stress->add_option("--max-flows", limits.max_flows)->check(CLI::PositiveNumber);
  stress->add_option("--duration", limits.duration_s);
  stress->callback([&] { action = [&] { return sim_stress(opt, stress_seed, scenarios, limits); }; });

  auto* srv = app.add_subcommand("serve", "Run the REST flow dispatcher");
  std::string bind = "127.0.0.1:8080";
  srv->add_option("--bind", bind, "host:port");
  srv->callback([&] { action = [&] { return serve(opt, bind); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
