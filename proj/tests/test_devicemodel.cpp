#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "detnet/devicemodel.hpp"
#include "detnet/errors.hpp"

using namespace detnet;
using namespace detnet::devicemodel;

TEST_CASE("default profile") {
  const auto p = SwitchProfile::fs_s2805s();
  CHECK(p.t_proc_s == 4.15e-6);
  CHECK(p.t_spq_s == 3.5e-6);
  CHECK(p.num_queues == 8);
  CHECK(p.total_buffer_bits == 4e6);
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.num_queues = 9;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad = p;
  bad.max_bridge_priorities = 8;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("buffer is split evenly between active ports") {
  const auto p = SwitchProfile::fs_s2805s();
  CHECK(per_queue_buffer(p, 1) == 500000);
  CHECK(per_queue_buffer(p, 2) == 250000);
  CHECK(per_queue_buffer(p, 3) == 166666);
  CHECK(per_queue_buffer(p, 8) == 62500);
  CHECK_THROWS_AS(per_queue_buffer(p, 0), InvalidParameter);
  CHECK_THROWS_AS(per_queue_buffer(p, 9), InvalidParameter);
}

TEST_CASE("tbf deviation") {
  const auto t = TbfDeviationTable::measured();
  CHECK(tbf_deviation(t, 1542) == doctest::Approx(1.85364).epsilon(1e-5));
  CHECK(tbf_deviation(t, 84) == doctest::Approx(50.00650).epsilon(1e-6));
  CHECK(tbf_deviation(t, 942) == doctest::Approx(3.10480).epsilon(1e-5));
  CHECK(tbf_deviation(t, 942) == doctest::Approx((3.44413241871526 + 2.76546023423554) / 2));
  // clamped outside the measured range
  CHECK(tbf_deviation(t, 10) == tbf_deviation(t, 84));
  CHECK(tbf_deviation(t, 9000) == tbf_deviation(t, 1542));
  CHECK_THROWS_AS(TbfDeviationTable({{100, 1.0}, {100, 2.0}}), InvalidParameter);
  CHECK_THROWS_AS(TbfDeviationTable({{100, -1.0}}), InvalidParameter);
}

TEST_CASE("compensated rate") {
  const auto t = TbfDeviationTable::measured();
  CHECK(compensate_rate(t, 3e6, 1542) == doctest::Approx(3.055609e6).epsilon(1e-6));
  CHECK(compensate_rate(t, 1e6, 84) == doctest::Approx(1.500065e6).epsilon(1e-6));
  const TbfDeviationTable flat({{100, 0.0}, {2000, 0.0}});
  CHECK(compensate_rate(flat, 7e6, 500) == 7e6);
  for (const auto& p : t.points()) CHECK(compensate_rate(t, 1e6, p.burst_bytes) >= 1e6);
  CHECK_THROWS_AS(compensate_rate(t, 0, 84), InvalidParameter);
}

TEST_CASE("profile registry and json") {
  ProfileRegistry reg;
  CHECK(reg.contains(ProfileRegistry::default_name()));
  CHECK_THROWS_AS(reg.get("nope"), InvalidParameter);

  auto p = SwitchProfile::fs_s2805s();
  p.name = "small";
  p.num_queues = 4;
  nlohmann::json j = p;
  CHECK(j.get<SwitchProfile>() == p);

  const auto loaded = profiles_from_json({{"profiles", {j}}});
  CHECK(loaded.get("small") == p);
  CHECK(loaded.contains(ProfileRegistry::default_name()));
  CHECK_THROWS_AS(profiles_from_json({{"profiles", {{{"name", "x"}}}}}), SchemaMismatch);
  CHECK_THROWS_AS(load_profiles("/nonexistent/profiles.json"), IoError);

  nlohmann::json tj = TbfDeviationTable::measured();
  CHECK(tj.get<TbfDeviationTable>() == TbfDeviationTable::measured());
}
