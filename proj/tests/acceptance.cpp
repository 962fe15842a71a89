// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "detnet/admission.hpp"
#include "detnet/devicemodel.hpp"
#include "detnet/errors.hpp"
#include "detnet/netcalc.hpp"
#include "detnet/serialization.hpp"
#include "detnet/simulator.hpp"
#include "detnet/topology.hpp"
#include "support.hpp"

using namespace detnet;
namespace ts = testsupport;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void expect(bool ok, const std::string& what) {
    if (!ok && pass) note << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(std::fabs(b), 1e-300);
}

void closed_form_vs_oracle(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double R = 1e6 + u(rng) * 1e10;
    const double r = u(rng) * R;
    const double b = u(rng) * 1e6;
    const double T = u(rng) * 1e-3;
    const auto alpha = ts::token_bucket(r, b);
    const auto beta = ts::rate_latency(R, T);
    const auto grid = ts::grid(T + b / R + 1e-3, 400, {0.0, T});
    const double h = ts::horizontal_deviation(alpha, beta, grid);
    const double v = ts::vertical_deviation(alpha, beta, grid);
    const double d = netcalc::delay_bound({r, b}, {R, T});
    const double q = netcalc::backlog_bound({r, b}, {R, T});
    worst = std::max({worst, std::fabs(d - h) / std::max(h, 1e-300), std::fabs(q - v) / std::max(v, 1e-300)});
    o.expect(rel_close(d, h, 1e-6), "delay pair " + std::to_string(i));
    o.expect(rel_close(q, v, 1e-6), "backlog pair " + std::to_string(i));
  }
  const double secs = seconds_since(t0);
  o.expect(secs < 10, "runtime");
  o.note << "1000 pairs, worst rel err " << worst << ", " << secs << " s";
}

void bound_soundness(Outcome& o) {
  const auto t0 = Clock::now();
  sim::SizeLimits limits;
  limits.max_switches = 5;
  limits.max_flows = 20;
  limits.duration_s = 1.0;
  const auto rep = sim::stress_suite(1, 20, limits);
  const double secs = seconds_since(t0);
  int admitted = 0;
  double ratio = 0;
  for (const auto& s : rep.scenarios) {
    admitted += s.flows_admitted;
    ratio = std::max(ratio, s.max_latency_ratio);
  }
  o.expect(rep.scenarios.size() == 20, "scenario count");
  o.expect(rep.total_violations == 0, "violations");
  o.expect(admitted > 0, "some flows admitted");
  o.expect(secs < 300, "runtime");
  o.note << rep.scenarios.size() << " scenarios, " << admitted << " flows, " << rep.total_violations
         << " violations, max latency/bound " << ratio << ", " << secs << " s";
}

void table_fixtures(Outcome& o) {
  const auto p = devicemodel::SwitchProfile::fs_s2805s();
  o.expect(devicemodel::per_queue_buffer(p, 1) == 500000, "1 port buffer");
  o.expect(devicemodel::per_queue_buffer(p, 8) == 62500, "8 port buffer");
  const auto svc = netcalc::port_service(p.link_rate_bps, p.t_proc_s, p.t_spq_s);
  o.expect(std::fabs(svc.latency_s - 7.65e-6) <= 1e-12, "port latency");
  o.expect(svc.rate_bps == 1e9, "port rate");
  o.note << "buffers " << devicemodel::per_queue_buffer(p, 1) << " / " << devicemodel::per_queue_buffer(p, 8)
         << " B, latency " << svc.latency_s * 1e6 << " us";
}

void tree_counts(Outcome& o) {
  using topology::enumerate_spanning_trees;
  o.expect(enumerate_spanning_trees(ts::build(3, ts::complete_edges(3)), 100).size() == 3, "triangle");
  o.expect(enumerate_spanning_trees(ts::build(4, ts::complete_edges(4)), 100).size() == 16, "K4");
  o.expect(ts::matrix_tree_count(4, ts::complete_edges(4)) == 16, "K4 matrix-tree");
  int graphs = 0;
  for (int n = 1; n <= 5; ++n) {
    const auto all = ts::complete_edges(n);
    for (unsigned mask = 0; mask < (1u << all.size()); ++mask) {
      std::vector<std::pair<int, int>> edges;
      for (std::size_t i = 0; i < all.size(); ++i)
        if (mask & (1u << i)) edges.push_back(all[i]);
      if (!ts::connected(n, edges)) continue;
      ++graphs;
      const auto topo = ts::build(n, edges);
      const auto trees = enumerate_spanning_trees(topo, 1000000);
      const auto oracle = ts::to_link_ids(topo, ts::brute_force_trees(n, ts::switch_edges(topo)));
      bool same = trees.size() == oracle.size();
      for (std::size_t i = 0; same && i < trees.size(); ++i) same = trees[i].links == oracle[i];
      o.expect(same, "graph n=" + std::to_string(n) + " mask=" + std::to_string(mask));
    }
  }
  o.note << "3 and 16 trees; " << graphs << " connected graphs match brute force";
}

void tbf_table(Outcome& o) {
  const std::vector<std::pair<std::int64_t, double>> measured{
      {84, 50.00649981552046},  {242, 13.08895590624894}, {442, 6.7677969950345},
      {642, 4.56462923611565},  {842, 3.44413241871526},  {1042, 2.76546023423554},
      {1242, 2.31063597897005}, {1442, 1.984468595702},   {1542, 1.85364426772192}};
  const auto t = devicemodel::TbfDeviationTable::measured();
  for (const auto& [burst, dev] : measured)
    o.expect(devicemodel::tbf_deviation(t, burst) == dev, "point " + std::to_string(burst));
  const double c = devicemodel::compensate_rate(t, 3e6, 1542);
  o.expect(std::fabs(c - 3.055609e6) <= 1.0, "compensated rate");
  o.note << "9 points exact, compensated " << std::fixed << c << " bps";
}

void vlan_rules(Outcome& o) {
  const auto k7 = ts::build(7, ts::complete_edges(7));
  topology::TreeCatalog cat(k7);
  std::set<int> seen;
  bool in_range = true;
  for (int i = 0; i < 4094; ++i) {
    auto tree = cat.tree_at(i);
    if (!tree) {
      o.expect(false, "K7 ran out of trees");
      return;
    }
    const int v = cat.assign_vlan(*tree);
    in_range = in_range && v >= 1 && v <= 4094;
    seen.insert(v);
  }
  o.expect(in_range, "ids within 1..4094");
  o.expect(seen.size() == 4094 && !seen.count(0) && !seen.count(4095), "distinct ids");
  bool exhausted = false;
  try {
    auto extra = cat.tree_at(4094);
    cat.assign_vlan(*extra);
  } catch (const VlanExhausted&) {
    exhausted = true;
  }
  o.expect(exhausted, "4095th request");

  const auto line = ts::build(17, ts::path_edges(17));
  auto tree = topology::enumerate_spanning_trees(line, 1)[0];
  tree.root = "s1";
  bool deep = false;
  try {
    topology::bridge_priorities(line, tree);
  } catch (const DepthExceeded&) {
    deep = true;
  }
  o.expect(deep, "17-deep tree");
  o.note << seen.size() << " VLANs assigned, 4095th refused, depth 16 refused";
}

void rerouting(Outcome& o) {
  auto off = ts::reroute_fixture(false);
  o.expect(admission::embed(off.state, off.f1).accepted, "f1 without rerouting");
  const auto before = snapshot_string(off.state);
  const auto rej = admission::embed(off.state, off.f2);
  o.expect(!rej.accepted, "f2 rejected without rerouting");
  o.expect(snapshot_string(off.state) == before, "rejection leaves state");

  auto on = ts::reroute_fixture(true);
  o.expect(admission::embed(on.state, on.f1).accepted, "f1 with rerouting");
  const auto res = admission::embed(on.state, on.f2);
  o.expect(res.accepted, "f2 accepted with rerouting");
  o.expect(res.rerouted_flows.size() == 1 && res.rerouted_flows[0].flow_id == "f1", "one moved flow");
  o.expect(verify_consistency(on.state).empty(), "recompute matches cache");
  const auto fresh = analyze(on.state, on.state.flows);
  for (const auto& [id, f] : on.state.flows) {
    const double bound = fresh.flows.at(id).delay_bound_s;
    o.expect(bound <= f.request.deadline_s, "guarantee of " + id);
  }
  for (const auto& [key, q] : fresh.queues) o.expect(q.backlog_bits <= q.budget_bits, "buffer");

  int feasible = 0, on_direct = 0;
  for (const auto& p : ts::exhaustive_placements(on)) {
    if (!p.feasible) continue;
    ++feasible;
    if (p.f1_ports.size() == 2) ++on_direct;
  }
  o.expect(feasible > 0 && on_direct == 0, "placement search agrees");
  o.note << "rejected (" << (rej.reason ? admission::to_string(*rej.reason) : "?") << ") then accepted moving "
         << res.rerouted_flows.size() << " flow; " << feasible << " feasible placements, none keep f1 direct";
}

// Configured trees outlive the flows that caused them.
nlohmann::json without_trees(nlohmann::json doc) {
  doc.erase("trees");
  return doc;
}

void atomicity(Outcome& o) {
  std::mt19937_64 rng(8);
  int rejections = 0, inversions = 0;
  for (int seq = 0; seq < 200; ++seq) {
    const int n = 2 + static_cast<int>(rng() % 3);
    std::vector<std::pair<int, int>> edges = ts::path_edges(n);
    if (n > 2) edges.emplace_back(0, n - 1);
    std::vector<int> hosts;
    for (int h = 0; h < n + 2; ++h) hosts.push_back(static_cast<int>(rng() % n));
    auto s = ts::make(ts::build(n, edges, hosts));
    admission::init_management(s);
    const auto ids = s.topology.host_ids();
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    for (int step = 0; step < 8; ++step) {
      const auto a = pick(rng);
      auto b = pick(rng);
      if (a == b) b = (b + 1) % ids.size();
      const double rate = std::exp(std::uniform_real_distribution<double>(std::log(1e6), std::log(6e8))(rng));
      const auto req = ts::request("q" + std::to_string(step), ids[a], ids[b], rate,
                                   std::uniform_int_distribution<int>(200, 40000)(rng),
                                   std::exp(std::uniform_real_distribution<double>(std::log(2e-5), std::log(5e-3))(rng)),
                                   std::uniform_int_distribution<int>(200, 1542)(rng));
      const auto snap = snapshot_string(s);
      const auto queues = s.queues;
      const auto res = admission::embed(s, req);
      if (!res.accepted) {
        ++rejections;
        o.expect(snapshot_string(s) == snap, "rejection seq " + std::to_string(seq));
        continue;
      }
      if (res.rerouted_flows.empty() && rng() % 2) {
        admission::remove(s, req.id);
        ++inversions;
        o.expect(s.queues == queues, "inverse seq " + std::to_string(seq));
        o.expect(without_trees(snapshot_json(s)) == without_trees(nlohmann::json::parse(snap)),
                 "inverse snapshot seq " + std::to_string(seq));
      }
      o.expect(verify_consistency(s).empty(), "consistency seq " + std::to_string(seq));
    }
  }
  o.expect(rejections > 0 && inversions > 0, "both paths exercised");
  o.note << "200 sequences, " << rejections << " rejections, " << inversions << " embed/remove pairs";
}

NetworkState merge_state(bool compensate) {
  ControllerConfig cfg;
  cfg.management = false;
  cfg.compensate_tbf = compensate;
  auto s = ts::make(ts::build(1, {}, {0, 0, 0}), cfg);
  admission::init_management(s);
  return s;
}

void negative_control(Outcome& o) {
  const auto r1 = ts::request("m1", "h1", "h3", 450e6, 84, 100e-6, 84);
  const auto r2 = ts::request("m2", "h2", "h3", 450e6, 84, 100e-6, 84);

  auto raw = merge_state(false);
  o.expect(admission::embed(raw, r1).accepted && admission::embed(raw, r2).accepted,
           "both admitted without compensation");
  sim::Scenario sc{raw};
  sc.duration_s = 0.05;
  const auto rep = sim::run(sc);
  std::size_t latency = 0;
  for (const auto& v : rep.violations) latency += v.kind == sim::Violation::Kind::kLatency;
  o.expect(latency > 0, "latency violation without compensation");

  auto comp = merge_state(true);
  const bool first = admission::embed(comp, r1).accepted;
  const bool second = admission::embed(comp, r2).accepted;
  o.expect(first && !second, "compensated controller refuses the second flow");
  sim::Scenario safe{comp};
  safe.duration_s = 0.05;
  o.expect(sim::run(safe).violations.empty(), "compensated run is clean");
  o.note << latency << " latency violations without compensation ("
         << rep.violations.size() << " total); compensated controller admits 1 of 2";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"closed-form bounds vs sampled oracle", closed_form_vs_oracle},
      {"bound soundness under simulation", bound_soundness},
      {"device fixtures", table_fixtures},
      {"spanning tree enumeration", tree_counts},
      {"shaper deviation table", tbf_table},
      {"vlan and depth limits", vlan_rules},
      {"rerouting", rerouting},
      {"atomicity and inversion", atomicity},
      {"shaper compensation negative control", negative_control},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << "exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.note.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
