#pragma once

// Independent test oracles: deliberately naive re-implementations, kept apart
// from the library code paths they check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "plver/allocation.hpp"
#include "plver/model.hpp"

namespace plver::oracle {

/// Last roster index whose demand prefix fits, by scanning every prefix.
inline std::ptrdiff_t linear_violation_start(std::span<const Kbps> demands,
                                             Kbps capacity) {
  Kbps sum = 0;
  std::ptrdiff_t last_fit = -1;
  for (std::size_t k = 0; k < demands.size(); ++k) {
    sum += demands[k];
    if (sum > capacity) break;
    last_fit = static_cast<std::ptrdiff_t>(k);
  }
  return last_fit;
}

/// Exhaustive blocking-pair scan, written independently of is_stable.
inline std::optional<std::pair<GroupId, ClusterId>> find_blocking_pair(
    const Allocation& allocation, const std::vector<UserGroup>& groups,
    const std::vector<EdgeCluster>& clusters, const PreferenceTables& prefs) {
  std::map<GroupId, Kbps> demand;
  for (const auto& g : groups) demand[g.id] = g.demand;
  std::map<ClusterId, Kbps> capacity;
  for (const auto& c : clusters) capacity[c.id] = c.capacity();

  for (const auto& g : groups) {
    auto uit = prefs.uP.find(g.id);
    if (uit == prefs.uP.end()) continue;
    auto assigned = allocation.assigned.find(g.id);
    for (const ClusterId& cid : uit->second) {
      if (assigned != allocation.assigned.end() && assigned->second == cid) break;
      auto cit = prefs.cP.find(cid);
      if (cit == prefs.cP.end()) continue;
      const auto& ranking = cit->second;
      auto me = std::find(ranking.begin(), ranking.end(), g.id);
      if (me == ranking.end()) continue;

      Kbps better = 0;
      auto rit = allocation.rosters.find(cid);
      if (rit != allocation.rosters.end()) {
        for (const GroupId& member : rit->second) {
          auto pos = std::find(ranking.begin(), ranking.end(), member);
          if (pos != ranking.end() && pos < me) better += demand[member];
        }
      }
      if (demand[g.id] + better <= capacity[cid]) return std::make_pair(g.id, cid);
    }
  }
  return std::nullopt;
}

// --- brute-force replication oracle (micro instances) ---

struct MicroServer {
  ServerId id;
  Kbps bandwidth = 0;
  Kb usable_cache = 0;
};

struct MicroStream {
  StreamKey key;
  std::int64_t viewers = 0;
  Kb size = 0;  // segment-set size over the window
};

namespace detail {

inline void best_assignment(const std::vector<MicroServer>& servers,
                            const std::vector<MicroStream>& streams,
                            const std::vector<std::set<std::size_t>>& cached,
                            std::size_t stream_idx, std::vector<Kbps>& residual,
                            std::int64_t value, std::int64_t& best,
                            std::int64_t optimistic_suffix) {
  if (value + optimistic_suffix <= best) return;
  if (stream_idx == streams.size()) {
    best = std::max(best, value);
    return;
  }
  const MicroStream& s = streams[stream_idx];
  const std::int64_t suffix_rest =
      optimistic_suffix - s.viewers * s.key.bitrate;

  // Enumerate how many of this stream's viewers each caching server takes.
  std::vector<std::size_t> hosts;
  for (std::size_t j = 0; j < servers.size(); ++j) {
    if (cached[j].count(stream_idx)) hosts.push_back(j);
  }
  auto rec = [&](auto&& self, std::size_t host_idx, std::int64_t remaining,
                 std::int64_t gained) -> void {
    if (host_idx == hosts.size()) {
      best_assignment(servers, streams, cached, stream_idx + 1, residual,
                      value + gained, best, suffix_rest);
      return;
    }
    const std::size_t j = hosts[host_idx];
    const std::int64_t cap = residual[j] / s.key.bitrate;
    const std::int64_t max_take = std::min(remaining, cap);
    for (std::int64_t take = max_take; take >= 0; --take) {
      residual[j] -= take * s.key.bitrate;
      self(self, host_idx + 1, remaining - take, gained + take * s.key.bitrate);
      residual[j] += take * s.key.bitrate;
    }
  };
  rec(rec, 0, s.viewers, 0);
}

}  // namespace detail

/// Maximum edge-servable traffic rate (Kbps): exhaustive over maximal
/// cache-feasible stream subsets per server, then optimal integral viewer
/// placement per configuration.
inline std::int64_t best_served_traffic(const std::vector<MicroServer>& servers,
                                        const std::vector<MicroStream>& streams) {
  const std::size_t m = servers.size();
  const std::size_t n = streams.size();

  // Maximal cache-feasible subsets per server (supersets dominate: caching
  // more never reduces the best assignment).
  std::vector<std::vector<std::set<std::size_t>>> choices(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::set<std::size_t>> feasible;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      Kb used = 0;
      for (std::size_t s = 0; s < n; ++s) {
        if (mask & (1u << s)) used += streams[s].size;
      }
      if (used <= servers[j].usable_cache) {
        std::set<std::size_t> subset;
        for (std::size_t s = 0; s < n; ++s) {
          if (mask & (1u << s)) subset.insert(s);
        }
        feasible.push_back(std::move(subset));
      }
    }
    for (const auto& a : feasible) {
      bool maximal = true;
      for (const auto& b : feasible) {
        if (a != b && std::includes(b.begin(), b.end(), a.begin(), a.end())) {
          maximal = false;
          break;
        }
      }
      if (maximal) choices[j].push_back(a);
    }
  }

  std::int64_t total_demand_rate = 0;
  for (const MicroStream& s : streams) {
    total_demand_rate += s.viewers * s.key.bitrate;
  }

  std::int64_t best = 0;
  std::vector<std::set<std::size_t>> config(m);
  auto enumerate = [&](auto&& self, std::size_t j) -> void {
    if (j == m) {
      std::vector<Kbps> residual;
      for (const MicroServer& server : servers) residual.push_back(server.bandwidth);
      detail::best_assignment(servers, streams, config, 0, residual, 0, best,
                              total_demand_rate);
      return;
    }
    for (const auto& subset : choices[j]) {
      config[j] = subset;
      self(self, j + 1);
    }
  };
  enumerate(enumerate, 0);
  return best;
}

}  // namespace plver::oracle
