#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "plver/errors.hpp"
#include "plver/rng.hpp"
#include "plver/rounding.hpp"
#include "plver/topology.hpp"
#include "plver/trace.hpp"
#include "plver/viewership.hpp"

using namespace plver;

TEST_CASE("largest remainder splits exactly") {
  SUBCASE("exact proportions") {
    const double w[] = {0.5, 0.3, 0.2};
    CHECK(largest_remainder_split(10, w) == std::vector<std::int64_t>{5, 3, 2});
  }
  SUBCASE("ties broken by index") {
    const double w[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(largest_remainder_split(10, w) == std::vector<std::int64_t>{4, 3, 3});
  }
  SUBCASE("zero total") {
    const double w[] = {0.7, 0.3};
    CHECK(largest_remainder_split(0, w) == std::vector<std::int64_t>{0, 0});
  }
  SUBCASE("conservation on random weights") {
    Rng rng(99);
    for (int iter = 0; iter < 200; ++iter) {
      const int n = static_cast<int>(rng.uniform_int(1, 12));
      std::vector<double> w(n);
      for (double& x : w) x = rng.uniform01();
      const std::int64_t total = rng.uniform_int(0, 5000);
      const auto parts = largest_remainder_split(total, w);
      std::int64_t sum = 0;
      for (auto p : parts) {
        CHECK(p >= 0);
        sum += p;
      }
      CHECK(sum == total);
    }
  }
}

TEST_CASE("bitrate ladder snapping") {
  CHECK(snap_to_ladder(2600) == 2500);
  CHECK(snap_to_ladder(2500) == 2500);
  CHECK(snap_to_ladder(999) == 750);
  CHECK(snap_to_ladder(100) == 400);  // below the lowest tier snaps up
}

TEST_CASE("synthesized topology is deterministic and well formed") {
  SynthTopologyParams params;
  params.group_count = 40;
  params.cluster_count = 10;
  params.seed = 7;
  params.target_demand = 100000;  // 100 Mbps

  const Topology a = synthesize_topology(params);
  const Topology b = synthesize_topology(params);
  CHECK(topology_to_json(a) == topology_to_json(b));

  SUBCASE("deployment bound: total bandwidth within one largest server") {
    Kbps deployed = 0;
    Kbps total_demand = 0;
    for (const auto& c : a.clusters) deployed += c.capacity();
    for (const auto& g : a.groups) total_demand += g.demand;
    CHECK(deployed >= total_demand);
    CHECK(deployed < total_demand + 80000 * static_cast<Kbps>(params.cluster_count));
    // The loop only overshoots by servers appended after the target was met
    // plus the per-cluster minimum; with enough demand the bound is one class
    // cycle. Check against the documented example-style bound too:
    CHECK(deployed < 180000 + 80000 * static_cast<Kbps>(params.cluster_count));
  }

  SUBCASE("cache range property") {
    for (const auto& c : a.clusters) {
      for (const auto& s : c.servers) {
        const Kb b_hat = s.bandwidth * params.window_length;
        CHECK(s.cache * 2 >= b_hat);
        CHECK(s.cache <= 2 * b_hat);
      }
    }
  }

  SUBCASE("weights normalized, preference lists well formed") {
    double sum = 0.0;
    for (const auto& g : a.groups) sum += g.population_weight;
    CHECK(std::abs(sum - 1.0) <= 1e-9);

    std::map<ClusterId, const EdgeCluster*> by_id;
    for (const auto& c : a.clusters) by_id[c.id] = &c;
    for (const auto& g : a.groups) {
      auto it = a.prefs.uP.find(g.id);
      if (it == a.prefs.uP.end()) continue;
      int last_level = 0;
      for (const auto& cid : it->second) {
        const int level = preference_level(g, *by_id[cid]);
        CHECK(level >= 1);
        CHECK(level >= last_level);  // bucketed best level first
        last_level = level;
      }
    }
  }
}

TEST_CASE("topology synth rejects bad parameters") {
  SynthTopologyParams params;
  params.group_count = 4;
  params.cluster_count = 2;
  params.target_demand = 0;
  CHECK_THROWS_AS(synthesize_topology(params), ConfigError);
  params.target_demand = 1000;
  params.bandwidth_classes.clear();
  CHECK_THROWS_AS(synthesize_topology(params), ConfigError);
}

TEST_CASE("deployment bound example: 100 Mbps target") {
  SynthTopologyParams params;
  params.group_count = 4;
  params.cluster_count = 1;  // single cluster isolates the generator loop bound
  params.seed = 3;
  params.target_demand = 100000;
  const Topology t = synthesize_topology(params);
  const Kbps deployed = t.clusters[0].capacity();
  CHECK(deployed >= 100000);
  CHECK(deployed < 180000);  // max overshoot is one largest (80 Mbps) server
}

TEST_CASE("cache example: 10 Mbps server, T = 300 s") {
  SynthTopologyParams params;
  params.group_count = 4;
  params.cluster_count = 1;
  params.seed = 11;
  params.bandwidth_classes = {10000};
  params.window_length = 300;
  params.target_demand = 10000;
  const Topology t = synthesize_topology(params);
  for (const auto& s : t.clusters[0].servers) {
    CHECK(s.cache > 1500000);  // 1 500 Mb
    CHECK(s.cache < 6000000);  // 6 000 Mb
  }
}

TEST_CASE("topology JSON round trip") {
  SynthTopologyParams params;
  params.group_count = 12;
  params.cluster_count = 4;
  params.seed = 21;
  params.target_demand = 50000;
  const Topology t = synthesize_topology(params);
  const std::string json = topology_to_json(t);
  const Topology back = topology_from_json(json);
  CHECK(topology_to_json(back) == json);
}

TEST_CASE("trace parsing") {
  SUBCASE("three valid lines land in windows") {
    const std::string text =
        R"({"channel_id":"a","t":0,"bitrate_kbps":2500,"viewers":10})" "\n"
        R"({"channel_id":"b","t":100,"bitrate_kbps":400,"viewers":3})" "\n"
        R"({"channel_id":"a","t":300,"bitrate_kbps":2500,"viewers":12})" "\n";
    const Trace trace = parse_trace(text, 300);
    CHECK(trace.record_count == 3);
    REQUIRE(trace.windows.size() == 2);
    CHECK(trace.windows[0].window.start == 0);
    CHECK(trace.windows[0].channels.size() == 2);
    CHECK(trace.windows[1].channels.at("a").viewers == 12);
  }

  SUBCASE("negative viewers rejected with the line number") {
    const std::string text =
        R"({"channel_id":"a","t":0,"bitrate_kbps":400,"viewers":1})" "\n"
        R"({"channel_id":"a","t":300,"bitrate_kbps":400,"viewers":-1})" "\n";
    CHECK_THROWS_WITH_AS(parse_trace(text, 300),
                         "trace: line 2: negative viewers", DataError);
  }

  SUBCASE("off-ladder bitrate snaps with a warning") {
    const std::string text =
        R"({"channel_id":"a","t":0,"bitrate_kbps":2600,"viewers":5})" "\n";
    std::vector<TraceWarning> warnings;
    const Trace trace = parse_trace(text, 300, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].line == 1);
    CHECK(trace.windows[0].channels.at("a").bitrate == 2500);
  }

  SUBCASE("malformed JSON names the line") {
    CHECK_THROWS_AS(parse_trace("{oops\n", 300), DataError);
  }

  SUBCASE("timestamps must be monotone per channel") {
    const std::string text =
        R"({"channel_id":"a","t":600,"bitrate_kbps":400,"viewers":1})" "\n"
        R"({"channel_id":"a","t":0,"bitrate_kbps":400,"viewers":1})" "\n";
    CHECK_THROWS_AS(parse_trace(text, 300), DataError);
  }
}

TEST_CASE("synthetic trace: deterministic, save/load round trip") {
  SynthTraceParams params;
  params.channels = 8;
  params.viewers = 200;
  params.windows = 4;
  params.seed = 5;
  const Trace a = synthesize_trace(params);
  const Trace b = synthesize_trace(params);
  REQUIRE(a.windows.size() == 4);
  CHECK(mean_window_demand(a) > 0);

  const std::string path =
      (std::filesystem::temp_directory_path() / "plver_trace_test.jsonl").string();
  save_trace(path, a);
  const Trace loaded = load_trace(path, params.window_length);
  REQUIRE(loaded.windows.size() == a.windows.size());
  for (std::size_t w = 0; w < a.windows.size(); ++w) {
    CHECK(loaded.windows[w].channels.size() == a.windows[w].channels.size());
    for (const auto& [id, rec] : a.windows[w].channels) {
      CHECK(loaded.windows[w].channels.at(id).viewers == rec.viewers);
      CHECK(loaded.windows[w].channels.at(id).bitrate == rec.bitrate);
    }
  }
  CHECK(mean_window_demand(b) == mean_window_demand(a));
  std::filesystem::remove(path);
}

namespace {

std::vector<UserGroup> weighted_groups(const std::vector<double>& weights) {
  std::vector<UserGroup> groups;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    UserGroup g;
    g.id = "g" + std::to_string(i + 1);
    g.population_weight = weights[i];
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

TEST_CASE("distribute_viewers") {
  TierMix single_tier{{400, 1.0}};

  SUBCASE("exact proportions") {
    const auto cells =
        distribute_viewers("ch", 400, 10, weighted_groups({0.5, 0.3, 0.2}), single_tier);
    CHECK(cells.at(DemandKey{"g1", {"ch", 400}}) == 5);
    CHECK(cells.at(DemandKey{"g2", {"ch", 400}}) == 3);
    CHECK(cells.at(DemandKey{"g3", {"ch", 400}}) == 2);
  }

  SUBCASE("largest remainder with index ties") {
    const auto cells = distribute_viewers(
        "ch", 400, 10, weighted_groups({1.0 / 3, 1.0 / 3, 1.0 / 3}), single_tier);
    CHECK(cells.at(DemandKey{"g1", {"ch", 400}}) == 4);
    CHECK(cells.at(DemandKey{"g2", {"ch", 400}}) == 3);
    CHECK(cells.at(DemandKey{"g3", {"ch", 400}}) == 3);
  }

  SUBCASE("zero viewers") {
    const auto cells =
        distribute_viewers("ch", 2500, 0, weighted_groups({0.5, 0.5}), single_tier);
    CHECK(cells.empty());
  }

  SUBCASE("empty group list rejected") {
    CHECK_THROWS_AS(distribute_viewers("ch", 400, 5, {}, single_tier), ConfigError);
  }

  SUBCASE("tier mix restricted to tiers at or below broadcast") {
    const auto cells = distribute_viewers("ch", 1000, 9, weighted_groups({1.0}),
                                          uniform_tier_mix());
    std::int64_t total = 0;
    for (const auto& [key, count] : cells) {
      CHECK(key.stream.bitrate <= 1000);
      total += count;
    }
    CHECK(total == 9);
  }
}

TEST_CASE("viewer-count conservation through snapshots") {
  SynthTraceParams tp;
  tp.channels = 10;
  tp.viewers = 313;
  tp.windows = 3;
  tp.seed = 17;
  const Trace trace = synthesize_trace(tp);

  SynthTopologyParams sp;
  sp.group_count = 9;
  sp.cluster_count = 3;
  sp.seed = 17;
  sp.target_demand = mean_window_demand(trace);
  const Topology topo = synthesize_topology(sp);

  for (const TraceWindow& tw : trace.windows) {
    const ViewershipSnapshot snap = build_snapshot(tw, topo.groups, uniform_tier_mix());
    for (const auto& [channel, record] : tw.channels) {
      CHECK(snap.channel_total(channel) == record.viewers);
    }
  }
}

TEST_CASE("apply_fluctuation") {
  ViewershipSnapshot snap;
  snap.window = {0, 300};
  snap.counts[{"g1", {"ch1", 400}}] = 60;
  snap.counts[{"g2", {"ch1", 400}}] = 40;
  snap.counts[{"g1", {"ch2", 2500}}] = 10;

  SUBCASE("identity at zero magnitude") {
    const auto out = apply_fluctuation(snap, 0.0, 42);
    CHECK(out.counts == snap.counts);
  }

  SUBCASE("scales each channel total by 1 +- f") {
    const auto out = apply_fluctuation(snap, 0.2, 42);
    const std::int64_t ch1 = out.channel_total("ch1");
    const std::int64_t ch2 = out.channel_total("ch2");
    CHECK((ch1 == 120 || ch1 == 80));
    CHECK((ch2 == 12 || ch2 == 8));
    CHECK(snap.channel_total("ch1") == 100);  // input untouched
  }

  SUBCASE("deterministic under the seed") {
    const auto a = apply_fluctuation(snap, 0.3, 9);
    const auto b = apply_fluctuation(snap, 0.3, 9);
    CHECK(a.counts == b.counts);
  }

  SUBCASE("sign pattern is stable across magnitudes") {
    const auto small = apply_fluctuation(snap, 0.1, 9);
    const auto large = apply_fluctuation(snap, 0.5, 9);
    const bool up_small = small.channel_total("ch1") > 100;
    const bool up_large = large.channel_total("ch1") > 100;
    CHECK(up_small == up_large);
  }

  SUBCASE("magnitude out of range rejected") {
    CHECK_THROWS_AS(apply_fluctuation(snap, 1.5, 1), ConfigError);
  }
}
