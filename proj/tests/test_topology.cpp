#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "detnet/errors.hpp"
#include "detnet/topology.hpp"
#include "support.hpp"

using namespace detnet;
using namespace detnet::topology;
namespace ts = testsupport;

namespace {

NeighborReport report(const std::string& who, const std::string& a, int ap, const std::string& b,
                      int bp) {
  return {who, a, ap, b, bp, 1e9, std::nullopt, std::nullopt};
}

}  // namespace

TEST_CASE("topology validation") {
  CHECK_NOTHROW(ts::build(3, ts::complete_edges(3), {0, 1}));
  try {
    ts::build(4, {{0, 1}, {2, 3}});
    FAIL("expected disconnected topology");
  } catch (const TopologyError& e) {
    CHECK(e.kind() == TopologyError::Kind::kDisconnectedTopology);
  }
  std::vector<Node> nodes{{"s1", NodeKind::kSwitch, "FS-S2805S"}, {"h1", NodeKind::kHost, ""},
                          {"h2", NodeKind::kHost, ""}};
  try {
    PhysicalTopology(nodes, {{"h1", 1, "s1", 1, 1e9, 0}, {"h1", 2, "h2", 1, 1e9, 0}});
    FAIL("expected host degree violation");
  } catch (const TopologyError& e) {
    CHECK(e.kind() == TopologyError::Kind::kHostDegreeViolation);
  }
  CHECK_THROWS_AS(PhysicalTopology({{"s1", NodeKind::kSwitch, "p"}}, {{"s1", 1, "s9", 1, 1e9, 0}}),
                  TopologyError);
}

TEST_CASE("accessors") {
  const auto t = ts::build(3, ts::complete_edges(3), {0, 2});
  CHECK(t.switch_ids() == std::vector<std::string>{"s1", "s2", "s3"});
  CHECK(t.host_ids() == std::vector<std::string>{"h1", "h2"});
  const auto acc = t.access_of("h2");
  CHECK(acc.switch_id == "s3");
  CHECK(t.port("s3", acc.switch_port).peer == "h2");
  CHECK(t.active_ports("s1") == 3);
  CHECK(t.switch_links().size() == 3);
  CHECK_THROWS_AS(t.access_of("s1"), UnknownEndpoint);
}

TEST_CASE("lldp ingest") {
  std::vector<NeighborReport> two{report("s1", "s1", 1, "s2", 1), report("s2", "s2", 1, "s1", 1)};
  std::vector<std::string> warnings;
  auto t = ingest_lldp(two, "FS-S2805S", 1e9, &warnings);
  CHECK(t.links().size() == 1);
  CHECK(warnings.empty());

  // full mesh of three switches plus two hosts, every link reported from both ends
  std::vector<NeighborReport> mesh;
  auto both = [&](std::string a, int ap, std::string b, int bp, bool host_b = false) {
    auto r1 = report(a, a, ap, b, bp);
    auto r2 = report(b, b, bp, a, ap);
    if (host_b) {
      r1.b_kind = NodeKind::kHost;
      r2.a_kind = NodeKind::kHost;
    }
    mesh.push_back(r1);
    mesh.push_back(r2);
  };
  both("s1", 1, "s2", 1);
  both("s2", 2, "s3", 1);
  both("s1", 2, "s3", 2);
  both("s1", 3, "h1", 1, true);
  both("s2", 3, "h2", 1, true);
  warnings.clear();
  t = ingest_lldp(mesh, "FS-S2805S", 1e9, &warnings);
  CHECK(t.nodes().size() == 5);
  CHECK(t.links().size() == 5);
  CHECK(t.host_ids().size() == 2);
  CHECK(warnings.empty());

  std::vector<NeighborReport> one_side{report("s1", "s1", 1, "s2", 1)};
  warnings.clear();
  t = ingest_lldp(one_side, "FS-S2805S", 1e9, &warnings);
  CHECK(t.links().size() == 1);
  CHECK(warnings.size() == 1);

  auto fast = report("s2", "s2", 1, "s1", 1);
  fast.rate_bps = 1e8;
  std::vector<NeighborReport> clash{report("s1", "s1", 1, "s2", 1), fast};
  CHECK_THROWS_AS(ingest_lldp(clash, "FS-S2805S", 1e9), TopologyError);
}

TEST_CASE("spanning tree counts") {
  CHECK(enumerate_spanning_trees(ts::build(3, ts::complete_edges(3)), 100).size() == 3);
  CHECK(enumerate_spanning_trees(ts::build(4, ts::complete_edges(4)), 100).size() == 16);
  const auto line = ts::build(4, ts::path_edges(4));
  const auto trees = enumerate_spanning_trees(line, 100);
  REQUIRE(trees.size() == 1);
  CHECK(trees[0].links == line.switch_links());
  CHECK(enumerate_spanning_trees(ts::build(1, {}), 10).size() == 1);
}

TEST_CASE("enumeration matches brute force and the matrix-tree theorem") {
  const std::vector<std::vector<std::pair<int, int>>> graphs{
      ts::complete_edges(5),
      {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}},
      {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}},
  };
  for (const auto& edges : graphs) {
    int n = 0;
    for (auto [a, b] : edges) n = std::max({n, a + 1, b + 1});
    const auto topo = ts::build(n, edges);
    const auto trees = enumerate_spanning_trees(topo, 100000);
    const auto oracle = ts::to_link_ids(topo, ts::brute_force_trees(n, ts::switch_edges(topo)));
    REQUIRE(trees.size() == oracle.size());
    CHECK(static_cast<double>(trees.size()) == ts::matrix_tree_count(n, edges));
    for (std::size_t i = 0; i < trees.size(); ++i) {
      CHECK(trees[i].links == oracle[i]);
      CHECK(trees[i].index == static_cast<int>(i));
    }
  }
}

TEST_CASE("enumeration can be resumed") {
  const auto topo = ts::build(4, ts::complete_edges(4));
  SpanningTreeEnumerator a(topo);
  std::vector<SpanningTree> first;
  for (int i = 0; i < 5; ++i) first.push_back(*a.next());
  SpanningTreeEnumerator b = a;  // copy mid-way
  auto rest_a = a.next();
  auto rest_b = b.next();
  CHECK(rest_a == rest_b);
  const auto all = enumerate_spanning_trees(topo, 100);
  CHECK(all[5] == *rest_a);
}

TEST_CASE("root selection and bridge priorities") {
  const auto line = ts::build(3, ts::path_edges(3));
  auto tree = enumerate_spanning_trees(line, 1)[0];
  CHECK(tree.root == "s2");
  CHECK(select_root(line, tree.links) == "s2");
  tree.root = "s1";
  auto prio = bridge_priorities(line, tree);
  CHECK(prio == std::map<std::string, int>{{"s1", 0}, {"s2", 4096}, {"s3", 8192}});

  const auto single = ts::build(1, {});
  prio = bridge_priorities(single, enumerate_spanning_trees(single, 1)[0]);
  CHECK(prio == std::map<std::string, int>{{"s1", 0}});

  const auto deep = ts::build(17, ts::path_edges(17));
  auto dt = enumerate_spanning_trees(deep, 1)[0];
  CHECK_NOTHROW(bridge_priorities(deep, dt));  // rooted at the centre: depth 8
  dt.root = "s1";
  CHECK_THROWS_AS(bridge_priorities(deep, dt), DepthExceeded);

  const auto sixteen = ts::build(16, ts::path_edges(16));
  auto st = enumerate_spanning_trees(sixteen, 1)[0];
  st.root = "s1";
  CHECK(bridge_priorities(sixteen, st).at("s16") == 15 * 4096);
}

TEST_CASE("vlan assignment") {
  const auto topo = ts::build(3, ts::complete_edges(3));
  TreeCatalog cat(topo);
  auto t0 = *cat.tree_at(0);
  CHECK(cat.assign_vlan(t0) == 1);
  auto t2 = *cat.tree_at(2);
  CHECK(cat.assign_vlan(t2) == 2);
  CHECK(cat.configured_by_vlan(2)->index == 2);
  CHECK(cat.find_configured(t2.links)->vlan_id == 2);
  CHECK_FALSE(cat.tree_at(3).has_value());
  auto again = t0;
  CHECK_THROWS_AS(cat.assign_vlan(again), InvalidParameter);

  // freed ids are reused from the bottom
  auto kept = cat.configured();
  kept.erase(kept.begin());
  cat.restore(kept);
  auto t1 = *cat.tree_at(1);
  CHECK(cat.assign_vlan(t1) == 1);
}

TEST_CASE("tree paths") {
  const auto topo = ts::build(4, ts::complete_edges(4));
  const auto tree = enumerate_spanning_trees(topo, 1)[0];
  for (const auto& a : topo.switch_ids())
    for (const auto& b : topo.switch_ids()) {
      const auto p = tree_path(topo, tree, a, b);
      CHECK(tree_contains(tree, p));
      std::string cur = a;
      for (auto li : p) cur = topo.other_end(li, cur);
      CHECK(cur == b);
    }
}

TEST_CASE("topology json round trip") {
  const auto topo = ts::build(3, ts::complete_edges(3), {0, 1});
  nlohmann::json j = topo;
  CHECK(j["schema_version"] == 1);
  CHECK(topology_from_json(j) == topo);
  j["schema_version"] = 7;
  CHECK_THROWS_AS(topology_from_json(j), SchemaMismatch);
  CHECK_THROWS_AS(topology_from_json(nlohmann::json::object()), SchemaMismatch);
  CHECK_THROWS_AS(load_topology("/nonexistent.json"), IoError);

  const auto tree = enumerate_spanning_trees(topo, 1)[0];
  nlohmann::json tj = tree;
  CHECK(tj.get<SpanningTree>() == tree);
}
