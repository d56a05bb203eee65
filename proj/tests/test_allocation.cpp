#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "plver/allocation.hpp"
#include "plver/errors.hpp"
#include "plver/rng.hpp"

using namespace plver;

TEST_CASE("bsearch_violation_start") {
  SUBCASE("worked prefixes") {
    const Kbps d1[] = {3, 5, 6, 6};
    CHECK(bsearch_violation_start(d1, 15, 3) == 2);  // 14 <= 15 < 20
    const Kbps d2[] = {3, 5, 6};
    CHECK(bsearch_violation_start(d2, 7, 1) == 0);
  }
  SUBCASE("proposer's own prefix can violate") {
    const Kbps d[] = {3, 9, 6};
    CHECK(bsearch_violation_start(d, 10, 1) == 0);
    const Kbps lone[] = {20};
    CHECK(bsearch_violation_start(lone, 10, 0) == -1);
  }
  SUBCASE("feasible roster is a caller bug") {
    const Kbps d[] = {1, 2};
    CHECK_THROWS_AS(bsearch_violation_start(d, 10, 0), std::invalid_argument);
  }
  SUBCASE("matches a linear scan on 1000 random rosters") {
    Rng rng(2024);
    for (int iter = 0; iter < 1000; ++iter) {
      const int n = static_cast<int>(rng.uniform_int(1, 20));
      std::vector<Kbps> demands(n);
      Kbps total = 0;
      for (auto& d : demands) {
        d = rng.uniform_int(1, 30);
        total += d;
      }
      const Kbps capacity = rng.uniform_int(0, total - 1);  // always violated
      // Any position whose preceding prefix is feasible is a valid proposer.
      std::size_t pos = 0;
      Kbps prefix = 0;
      for (int k = 0; k < n; ++k) {
        if (prefix <= capacity) pos = static_cast<std::size_t>(k);
        prefix += demands[static_cast<std::size_t>(k)];
      }
      CHECK(bsearch_violation_start(demands, capacity, pos) ==
            oracle::linear_violation_start(demands, capacity));
    }
  }
}

TEST_CASE("ISOA on the worked four-group instance") {
  const Topology t = testfx::fig4_topology();
  const Allocation a = isoa_allocate(t.groups, t.clusters, t.prefs);

  CHECK(a.rosters.at("c1") == std::vector<GroupId>{"g1", "g2", "g4"});
  CHECK(a.rosters.at("c2") == std::vector<GroupId>{"g3"});
  CHECK(a.assigned.at("g2") == "c1");  // lands at its second preference
  CHECK(a.unallocated(t.groups).empty());

  SUBCASE("result is stable (exhaustive pair check)") {
    CHECK(!oracle::find_blocking_pair(a, t.groups, t.clusters, t.prefs).has_value());
    CHECK(is_stable(a, t.groups, t.clusters, t.prefs).stable);
  }
}

TEST_CASE("ISOA trivial cases") {
  SUBCASE("single group, single cluster") {
    Topology t;
    UserGroup g;
    g.id = "g1";
    g.demand = 5;
    t.groups = {g};
    EdgeCluster c;
    c.id = "c1";
    c.servers = {EdgeServer{"c1-s1", 10, 100}};
    t.clusters = {c};
    t.prefs.uP = {{"g1", {"c1"}}};
    t.prefs.cP = {{"c1", {"g1"}}};
    const Allocation a = isoa_allocate(t.groups, t.clusters, t.prefs);
    CHECK(a.assigned.at("g1") == "c1");
  }
  SUBCASE("demand above every capacity stays unallocated") {
    Topology t = testfx::fig4_topology();
    t.groups[0].demand = 99;
    const Allocation a = isoa_allocate(t.groups, t.clusters, t.prefs);
    CHECK(!a.assigned.count("g1"));
    const auto un = a.unallocated(t.groups);
    CHECK(un == std::vector<GroupId>{"g1"});
  }
}

TEST_CASE("greedy baseline") {
  const Topology t = testfx::fig4_topology();

  SUBCASE("input order lets g2 grab c2 first") {
    const Allocation a = greedy_allocate(t.groups, t.clusters, t.prefs);
    CHECK(a.rosters.at("c1") == std::vector<GroupId>{"g1", "g3", "g4"});
    CHECK(a.rosters.at("c2") == std::vector<GroupId>{"g2"});
  }

  SUBCASE("group without preferences stays unallocated") {
    Topology t2 = t;
    t2.prefs.uP.erase("g1");
    const Allocation a = greedy_allocate(t2.groups, t2.clusters, t2.prefs);
    CHECK(!a.assigned.count("g1"));
  }

  SUBCASE("no contention: greedy equals ISOA at level 1") {
    Topology t2 = t;
    t2.clusters[0].servers[0].bandwidth = 100;  // everyone fits at c1
    for (auto& [gid, list] : t2.prefs.uP) list = {"c1", "c2"};
    const Allocation greedy = greedy_allocate(t2.groups, t2.clusters, t2.prefs);
    const Allocation isoa = isoa_allocate(t2.groups, t2.clusters, t2.prefs);
    CHECK(greedy.assigned == isoa.assigned);
    for (const auto& [gid, cid] : greedy.assigned) CHECK(cid == "c1");
  }
}

TEST_CASE("is_stable") {
  const Topology t = testfx::fig4_topology();

  SUBCASE("definitional blocking pair") {
    // g1 parked at its second choice while c1 has room and lists it.
    Allocation a;
    a.assigned = {{"g1", "c2"}};
    a.rosters = {{"c2", {"g1"}}};
    const auto result = is_stable(a, t.groups, t.clusters, t.prefs);
    CHECK(!result.stable);
    REQUIRE(result.blocking.has_value());
    CHECK(result.blocking->first == "g1");
    CHECK(result.blocking->second == "c1");
  }

  SUBCASE("vacuously stable when nothing is matchable") {
    Topology t2 = t;
    t2.prefs.uP.clear();
    Allocation empty;
    CHECK(is_stable(empty, t2.groups, t2.clusters, t2.prefs).stable);
  }

  SUBCASE("infeasible input rejected") {
    Allocation a;
    a.assigned = {{"g3", "c2"}, {"g2", "c2"}};
    a.rosters = {{"c2", {"g3", "g2"}}};  // 11 > 10
    CHECK_THROWS_AS(is_stable(a, t.groups, t.clusters, t.prefs),
                    std::invalid_argument);
  }
}

TEST_CASE("ISOA is stable across random instances") {
  // Both generator families; the acceptance suite runs the full 500.
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Topology t = seed % 2 == 0 ? testfx::random_allocation_instance(seed, 60, 12)
                                     : testfx::random_synth_topology(seed, 60, 12);
    const Allocation a = isoa_allocate(t.groups, t.clusters, t.prefs);

    std::map<ClusterId, Kbps> capacity;
    for (const auto& c : t.clusters) capacity[c.id] = c.capacity();
    std::map<GroupId, Kbps> demand;
    for (const auto& g : t.groups) demand[g.id] = g.demand;
    for (const auto& [cid, roster] : a.rosters) {
      Kbps used = 0;
      for (const auto& gid : roster) used += demand[gid];
      CHECK(used <= capacity[cid]);
    }

    const auto st = is_stable(a, t.groups, t.clusters, t.prefs);
    CHECK_MESSAGE(st.stable, "seed ", seed);
    CHECK(!oracle::find_blocking_pair(a, t.groups, t.clusters, t.prefs).has_value());
  }
}

TEST_CASE("ISOA dominates greedy at level 1 in aggregate") {
  // Statistical, not per instance: summed over a seeded batch.
  std::int64_t isoa_top = 0;
  std::int64_t greedy_top = 0;
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const Topology t = testfx::random_synth_topology(seed, 80, 16);
    const LevelFn level = make_label_level_fn(t);
    const Allocation isoa = isoa_allocate(t.groups, t.clusters, t.prefs);
    const Allocation greedy = greedy_allocate(t.groups, t.clusters, t.prefs);
    isoa_top += preference_rank_histogram(isoa, t.groups, level).counts[1];
    greedy_top += preference_rank_histogram(greedy, t.groups, level).counts[1];
  }
  CHECK(isoa_top >= greedy_top);
}

TEST_CASE("preference rank histogram") {
  const Topology t = testfx::fig4_topology();
  const Allocation a = isoa_allocate(t.groups, t.clusters, t.prefs);
  const LevelFn positional = make_positional_level_fn(t.prefs);

  SUBCASE("three groups at their head, one at its second") {
    const RankHistogram h = preference_rank_histogram(a, t.groups, positional);
    CHECK(h.counts[1] == 3);
    CHECK(h.counts[2] == 1);
    CHECK(h.unallocated == 0);
    CHECK(h.total() == 4);
  }

  SUBCASE("empty allocation lands everyone in unallocated") {
    const RankHistogram h = preference_rank_histogram(Allocation{}, t.groups, positional);
    CHECK(h.unallocated == 4);
    CHECK(h.total() == 4);
  }

  SUBCASE("histogram totals equal group count on random instances") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Topology rt = testfx::random_synth_topology(seed, 50, 10);
      const Allocation ra = isoa_allocate(rt.groups, rt.clusters, rt.prefs);
      const RankHistogram h =
          preference_rank_histogram(ra, rt.groups, make_label_level_fn(rt));
      CHECK(h.total() == static_cast<std::int64_t>(rt.groups.size()));
    }
  }

  SUBCASE("unknown level is a topology bug") {
    Allocation bogus;
    bogus.assigned = {{"g1", "c1"}};
    const LevelFn zero = [](const GroupId&, const ClusterId&) { return 0; };
    CHECK_THROWS_AS(preference_rank_histogram(bogus, t.groups, zero), DataError);
  }
}

TEST_CASE("allocation JSON round trip") {
  const Topology t = testfx::fig4_topology();
  const Allocation a = isoa_allocate(t.groups, t.clusters, t.prefs);
  const std::string json = allocation_to_json(a, t.groups);
  const Allocation back = allocation_from_json(json);
  CHECK(back.assigned == a.assigned);
  CHECK(back.rosters == a.rosters);
}
