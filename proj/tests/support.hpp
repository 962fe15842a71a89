#pragma once

// Shared fixtures and independent oracles for the test binaries. Nothing in
// here calls into the code under test except to build inputs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "detnet/admission.hpp"
#include "detnet/network_state.hpp"
#include "detnet/topology.hpp"

namespace testsupport {

using detnet::topology::Link;
using detnet::topology::Node;
using detnet::topology::NodeKind;
using detnet::topology::PhysicalTopology;

inline const std::string kProfile = "FS-S2805S";

// Switches s1..sn; `edges` are 0-based switch pairs. One host per entry of
// `hosts_on` (switch index), named h1, h2, ...
inline PhysicalTopology build(int n_switches, const std::vector<std::pair<int, int>>& edges,
                              const std::vector<int>& hosts_on = {}, double rate = 1e9) {
  std::vector<Node> nodes;
  for (int i = 0; i < n_switches; ++i) {
    nodes.push_back({"s" + std::to_string(i + 1), NodeKind::kSwitch, kProfile});
  }
  std::vector<int> next(n_switches, 1);
  std::vector<Link> links;
  for (auto [a, b] : edges) {
    links.push_back({"s" + std::to_string(a + 1), next[a]++, "s" + std::to_string(b + 1),
                     next[b]++, rate, 0.0});
  }
  for (std::size_t h = 0; h < hosts_on.size(); ++h) {
    const int s = hosts_on[h];
    const auto id = "h" + std::to_string(h + 1);
    nodes.push_back({id, NodeKind::kHost, ""});
    links.push_back({id, 1, "s" + std::to_string(s + 1), next[s]++, rate, 0.0});
  }
  return PhysicalTopology(std::move(nodes), std::move(links));
}

inline std::vector<std::pair<int, int>> complete_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) e.emplace_back(a, b);
  return e;
}

inline std::vector<std::pair<int, int>> path_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a + 1 < n; ++a) e.emplace_back(a, a + 1);
  return e;
}

inline detnet::NetworkState make(const PhysicalTopology& topo, detnet::ControllerConfig cfg = {}) {
  return detnet::make_state(topo, detnet::devicemodel::ProfileRegistry(),
                            detnet::devicemodel::TbfDeviationTable::measured(), cfg);
}

inline detnet::FlowRequest request(const std::string& id, const std::string& src,
                                   const std::string& dst, double rate, std::int64_t burst,
                                   double deadline_s, std::int64_t packet = 1542) {
  detnet::FlowRequest r;
  r.id = id;
  r.src = src;
  r.dst = dst;
  r.rate_bps = rate;
  r.burst_bytes = burst;
  r.deadline_s = deadline_s;
  r.max_packet_bytes = packet;
  return r;
}

// ---------------------------------------------------------------------------
// Curve oracle: deviations between sampled piecewise-linear curves.

using Curve = std::function<double(double)>;

// Smallest d >= 0 with beta(t + d) >= level, by bisection. beta must be
// non-decreasing and unbounded.
inline double invert(const Curve& beta, double t, double level) {
  if (beta(t) >= level) return 0.0;
  double hi = 1e-9;
  while (beta(t + hi) < level) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (beta(t + mid) >= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Grid of `n` points over [0, horizon] plus the given breakpoints and their
// right-neighbourhoods.
inline std::vector<double> grid(double horizon, int n, const std::vector<double>& breaks) {
  std::vector<double> ts;
  for (int i = 0; i <= n; ++i) ts.push_back(horizon * i / n);
  for (double b : breaks) {
    ts.push_back(b);
    ts.push_back(b * (1 + 1e-12) + 1e-18);
  }
  std::sort(ts.begin(), ts.end());
  return ts;
}

// Right-limit of a token bucket; the oracle samples alpha(0+) at t = 0.
inline Curve token_bucket(double r, double b) {
  return [=](double t) { return b + r * std::max(t, 0.0); };
}

inline Curve rate_latency(double R, double T) {
  return [=](double t) { return t > T ? R * (t - T) : 0.0; };
}

inline double horizontal_deviation(const Curve& alpha, const Curve& beta,
                                   const std::vector<double>& ts) {
  double h = 0.0;
  for (double t : ts) h = std::max(h, invert(beta, t, alpha(t)));
  return h;
}

inline double vertical_deviation(const Curve& alpha, const Curve& beta,
                                 const std::vector<double>& ts) {
  double v = 0.0;
  for (double t : ts) v = std::max(v, alpha(t) - beta(t));
  return v;
}

// ---------------------------------------------------------------------------
// Graph oracles.

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

// Every (n-1)-subset of `edges` that is acyclic, as sorted index lists in
// lexicographic order.
inline std::vector<std::vector<std::size_t>> brute_force_trees(
    int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t m = edges.size();
  if (n == 1) return {{}};
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (static_cast<int>(pick.size()) == n - 1) {
      Dsu d(n);
      for (auto i : pick)
        if (!d.join(edges[i].first, edges[i].second)) return;
      out.push_back(pick);
      return;
    }
    for (std::size_t i = from; i < m; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

// Kirchhoff: determinant of the reduced Laplacian.
inline double matrix_tree_count(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n == 1) return 1.0;
  std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
  for (auto [a, b] : edges) {
    L[a][a] += 1;
    L[b][b] += 1;
    L[a][b] -= 1;
    L[b][a] -= 1;
  }
  const int k = n - 1;
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r)
      if (std::fabs(L[r][c]) > std::fabs(L[piv][c])) piv = r;
    if (std::fabs(L[piv][c]) < 1e-12) return 0.0;
    if (piv != c) {
      std::swap(L[piv], L[c]);
      det = -det;
    }
    det *= L[c][c];
    for (int r = c + 1; r < k; ++r) {
      const double f = L[r][c] / L[c][c];
      for (int j = c; j < k; ++j) L[r][j] -= f * L[c][j];
    }
  }
  return std::round(det);
}

inline bool connected(int n, const std::vector<std::pair<int, int>>& edges) {
  Dsu d(n);
  int parts = n;
  for (auto [a, b] : edges)
    if (d.join(a, b)) --parts;
  return parts == 1;
}

// Every simple path between two vertices of a weighted digraph, as vertex
// sequences with their total weight.
struct SimplePath {
  std::vector<int> nodes;
  double weight = 0.0;
};

inline std::vector<SimplePath> all_simple_paths(
    int n, const std::vector<std::tuple<int, int, double>>& arcs, int src, int dst) {
  std::vector<SimplePath> out;
  std::vector<char> seen(n, 0);
  SimplePath cur;
  std::function<void(int)> rec = [&](int u) {
    if (u == dst) {
      out.push_back(cur);
      return;
    }
    for (auto [a, b, w] : arcs) {
      if (a != u || seen[b] || std::isinf(w)) continue;
      seen[b] = 1;
      cur.nodes.push_back(b);
      cur.weight += w;
      rec(b);
      cur.weight -= w;
      cur.nodes.pop_back();
      seen[b] = 0;
    }
  };
  seen[src] = 1;
  cur.nodes.push_back(src);
  rec(src);
  return out;
}

// ---------------------------------------------------------------------------
// Independent bound oracle for a set of placed flows. Each flow crosses a
// list of egress ports in one class; ports are identified by string.

struct OracleFlow {
  std::vector<std::string> ports;
  int cls = 0;
  double rate = 0.0;
  double burst = 0.0;
  double packet_bits = 12336.0;
};

struct OraclePort {
  double rate = 1e9;
  double latency = 7.65e-6;
  double frame_bits = 1516 * 8.0;
  double budget_bits = 0.0;
};

struct OracleResult {
  std::vector<double> flow_delay;
  std::map<std::pair<std::string, int>, double> backlog;
  bool overloaded = false;
};

// Strict priority per port with non-preemptive blocking, token buckets
// propagated as b + r*d, iterated to a fixed point.
inline OracleResult oracle_bounds(const std::vector<OracleFlow>& flows,
                                  const std::map<std::string, OraclePort>& ports, int classes) {
  std::vector<std::vector<double>> burst(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i)
    burst[i].assign(flows[i].ports.size(), flows[i].burst);
  OracleResult res;
  std::map<std::pair<std::string, int>, double> delay;
  for (int iter = 0; iter < 500; ++iter) {
    delay.clear();
    res.backlog.clear();
    res.overloaded = false;
    for (const auto& [pid, port] : ports) {
      std::vector<double> r(classes, 0), b(classes, 0), pk(classes, 0);
      std::vector<char> used(classes, 0);
      for (std::size_t i = 0; i < flows.size(); ++i)
        for (std::size_t k = 0; k < flows[i].ports.size(); ++k)
          if (flows[i].ports[k] == pid) {
            r[flows[i].cls] += flows[i].rate;
            b[flows[i].cls] += burst[i][k];
            pk[flows[i].cls] = std::max(pk[flows[i].cls], flows[i].packet_bits);
            used[flows[i].cls] = 1;
          }
      for (int q = 0; q < classes; ++q) {
        if (!used[q]) continue;
        double rh = 0, bh = 0;
        for (int c = 0; c < q; ++c) {
          rh += r[c];
          bh += b[c];
        }
        double block = 0;
        if (q < classes - 1) {
          block = port.frame_bits;
          for (int c = q + 1; c < classes; ++c) block = std::max(block, pk[c]);
        }
        const double R = port.rate - rh;
        if (R <= 0 || r[q] > R) {
          res.overloaded = true;
          delay[{pid, q}] = INFINITY;
          res.backlog[{pid, q}] = INFINITY;
          continue;
        }
        const double T = (port.rate * port.latency + bh + block) / R;
        delay[{pid, q}] = T + b[q] / R;
        res.backlog[{pid, q}] = b[q] + r[q] * T;
      }
    }
    bool changed = false;
    for (std::size_t i = 0; i < flows.size(); ++i)
      for (std::size_t k = 1; k < flows[i].ports.size(); ++k) {
        const double nb = burst[i][k - 1] + flows[i].rate * delay[{flows[i].ports[k - 1], flows[i].cls}];
        if (std::fabs(nb - burst[i][k]) > 1e-9 * std::max(1.0, nb)) changed = true;
        burst[i][k] = nb;
      }
    if (!changed) break;
  }
  for (std::size_t i = 0; i < flows.size(); ++i) {
    double total = 0;
    for (const auto& p : flows[i].ports) total += delay[{p, flows[i].cls}];
    res.flow_delay.push_back(total);
  }
  return res;
}

}  // namespace testsupport

namespace testsupport {

// Triangle s1-s2-s3 at 1 Gbit/s; h1, h2 on s1 and h3, h4 on s3. f1 sits on
// the direct s1-s3 link and can move; f2 only meets its deadline on that
// link.
struct RerouteFixture {
  detnet::NetworkState state;
  detnet::FlowRequest f1;
  detnet::FlowRequest f2;
};

inline RerouteFixture reroute_fixture(bool rerouting) {
  detnet::ControllerConfig cfg;
  cfg.management = false;
  cfg.rerouting = rerouting;
  RerouteFixture fx{make(build(3, complete_edges(3), {0, 0, 2, 2}), cfg),
                    request("f1", "h1", "h3", 600e6, 1542, 1e-3),
                    request("f2", "h2", "h4", 500e6, 1542, 60e-6)};
  detnet::admission::init_management(fx.state);
  return fx;
}

// Measured shaper deviation at a 1542 B burst, in percent.
inline constexpr double kDeviation1542 = 1.85364426772192;

struct Placement {
  std::vector<std::string> f1_ports, f2_ports;
  int c1 = 0, c2 = 0;
  bool feasible = false;
  OracleResult bounds;
};

// Every combination of simple path and class for f1 and f2 in the fixture,
// judged by the independent oracle.
inline std::vector<Placement> exhaustive_placements(const RerouteFixture& fx) {
  const auto& topo = fx.state.topology;
  auto port_id = [&](const std::string& a, const std::string& b) {
    for (const auto& [p, ref] : topo.ports(a))
      if (ref.peer == b) return a + ":" + std::to_string(p);
    throw std::runtime_error("no port");
  };
  const std::vector<std::vector<std::string>> routes1{
      {port_id("s1", "s3"), port_id("s3", "h3")},
      {port_id("s1", "s2"), port_id("s2", "s3"), port_id("s3", "h3")}};
  const std::vector<std::vector<std::string>> routes2{
      {port_id("s1", "s3"), port_id("s3", "h4")},
      {port_id("s1", "s2"), port_id("s2", "s3"), port_id("s3", "h4")}};
  std::map<std::string, OraclePort> ports;
  for (const auto& r : {routes1, routes2})
    for (const auto& route : r)
      for (const auto& p : route) {
        const auto sw = p.substr(0, p.find(':'));
        OraclePort op;
        op.budget_bits = 8.0 * (500000 / static_cast<int>(topo.ports(sw).size()));
        ports[p] = op;
      }
  const double factor = 1 + kDeviation1542 / 100;
  std::vector<Placement> out;
  for (const auto& r1 : routes1)
    for (const auto& r2 : routes2)
      for (int c1 = 0; c1 < 8; ++c1)
        for (int c2 = 0; c2 < 8; ++c2) {
          Placement pl{r1, r2, c1, c2, false, {}};
          std::vector<OracleFlow> flows{{r1, c1, fx.f1.rate_bps * factor, 12336},
                                        {r2, c2, fx.f2.rate_bps * factor, 12336}};
          pl.bounds = oracle_bounds(flows, ports, 8);
          pl.feasible = !pl.bounds.overloaded && pl.bounds.flow_delay[0] <= fx.f1.deadline_s &&
                        pl.bounds.flow_delay[1] <= fx.f2.deadline_s;
          for (const auto& [key, b] : pl.bounds.backlog)
            if (!(b <= ports[key.first].budget_bits)) pl.feasible = false;
          out.push_back(pl);
        }
  return out;
}

inline std::vector<std::string> port_ids(const std::vector<detnet::Hop>& path) {
  std::vector<std::string> out;
  for (const auto& h : path) out.push_back(h.switch_id + ":" + std::to_string(h.egress_port));
  return out;
}

}  // namespace testsupport

namespace testsupport {

// Switch-index edge list in the topology's link order.
inline std::vector<std::pair<int, int>> switch_edges(const PhysicalTopology& topo) {
  std::map<std::string, int> idx;
  const auto ids = topo.switch_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) idx[ids[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> out;
  for (auto li : topo.switch_links()) out.emplace_back(idx[topo.links()[li].a], idx[topo.links()[li].b]);
  return out;
}

inline std::vector<std::vector<std::size_t>> to_link_ids(const PhysicalTopology& topo,
                                                  const std::vector<std::vector<std::size_t>>& sets) {
  const auto sl = topo.switch_links();
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : sets) {
    std::vector<std::size_t> ids;
    for (auto i : s) ids.push_back(sl[i]);
    out.push_back(ids);
  }
  return out;
}

}  // namespace testsupport
