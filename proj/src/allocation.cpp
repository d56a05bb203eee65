#include "plver/allocation.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "plver/errors.hpp"

namespace plver {

namespace {

struct ClusterState {
  ClusterId id;
  Kbps capacity = 0;
  std::map<GroupId, std::size_t> rank;  // position in cP
  std::vector<std::size_t> roster;      // group indexes, ordered by rank
  Kbps roster_demand = 0;
};

}  // namespace

std::vector<GroupId> Allocation::unallocated(
    const std::vector<UserGroup>& groups) const {
  std::vector<GroupId> out;
  for (const UserGroup& g : groups) {
    if (!assigned.count(g.id)) out.push_back(g.id);
  }
  return out;
}

std::ptrdiff_t bsearch_violation_start(std::span<const Kbps> roster_demands,
                                       Kbps capacity, std::size_t proposer_pos) {
  const std::size_t n = roster_demands.size();
  if (proposer_pos >= n) {
    throw std::invalid_argument("bsearch_violation_start: proposer not in roster");
  }
  std::vector<Kbps> prefix(n);
  std::partial_sum(roster_demands.begin(), roster_demands.end(), prefix.begin());
  if (prefix[n - 1] <= capacity) {
    throw std::invalid_argument("bsearch_violation_start: roster already feasible");
  }
  // First prefix beyond the capacity, searched from the proposer's position:
  // earlier prefixes were feasible before the insertion, so the boundary is
  // never before proposer_pos - 1.
  auto it = std::upper_bound(prefix.begin() + static_cast<std::ptrdiff_t>(proposer_pos),
                             prefix.end(), capacity);
  return (it - prefix.begin()) - 1;
}

Allocation isoa_allocate(const std::vector<UserGroup>& groups,
                         const std::vector<EdgeCluster>& clusters,
                         const PreferenceTables& prefs) {
  std::map<GroupId, std::size_t> group_index;
  for (std::size_t i = 0; i < groups.size(); ++i) group_index[groups[i].id] = i;

  std::map<ClusterId, std::size_t> cluster_index;
  std::vector<ClusterState> state(clusters.size());
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    state[j].id = clusters[j].id;
    state[j].capacity = clusters[j].capacity();
    cluster_index[clusters[j].id] = j;
    auto it = prefs.cP.find(clusters[j].id);
    if (it != prefs.cP.end()) {
      for (std::size_t r = 0; r < it->second.size(); ++r) {
        state[j].rank[it->second[r]] = r;
      }
    }
  }

  // Remaining uP per group as (list, next index): the cursor advances only
  // when the group is rejected as proposer.
  std::vector<const std::vector<ClusterId>*> pref_list(groups.size(), nullptr);
  std::vector<std::size_t> cursor(groups.size(), 0);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto it = prefs.uP.find(groups[i].id);
    if (it != prefs.uP.end()) pref_list[i] = &it->second;
  }

  std::vector<std::optional<std::size_t>> assigned_cluster(groups.size());
  std::deque<std::size_t> free_queue(groups.size());
  std::iota(free_queue.begin(), free_queue.end(), std::size_t{0});

  auto demand_of = [&](std::size_t gi) { return groups[gi].demand; };

  while (!free_queue.empty()) {
    const std::size_t gi = free_queue.front();
    free_queue.pop_front();

    while (true) {
      if (pref_list[gi] == nullptr || cursor[gi] >= pref_list[gi]->size()) {
        break;  // list exhausted: stays unallocated
      }
      const ClusterId& cid = (*pref_list[gi])[cursor[gi]];
      auto cit = cluster_index.find(cid);
      if (cit == cluster_index.end()) {
        ++cursor[gi];
        continue;
      }
      ClusterState& cs = state[cit->second];
      auto rank_it = cs.rank.find(groups[gi].id);
      if (rank_it == cs.rank.end()) {
        ++cursor[gi];  // cluster does not list this group: mutually unmatchable
        continue;
      }

      // Insert at the cluster's preference rank.
      const std::size_t my_rank = rank_it->second;
      std::size_t pos = 0;
      while (pos < cs.roster.size() &&
             cs.rank[groups[cs.roster[pos]].id] < my_rank) {
        ++pos;
      }
      cs.roster.insert(cs.roster.begin() + static_cast<std::ptrdiff_t>(pos), gi);
      cs.roster_demand += demand_of(gi);
      assigned_cluster[gi] = cit->second;

      if (cs.roster_demand <= cs.capacity) break;  // accepted

      std::vector<Kbps> demands;
      demands.reserve(cs.roster.size());
      for (std::size_t member : cs.roster) demands.push_back(demand_of(member));
      const std::ptrdiff_t start = bsearch_violation_start(demands, cs.capacity, pos);

      // Sweep the suffix keeping a running feasible prefix. The proposer can
      // only be the first element examined (everything before its position was
      // feasible pre-insertion); evicting it restores the old roster.
      bool proposer_evicted = false;
      Kbps kept = 0;
      for (std::ptrdiff_t k = 0; k <= start; ++k) kept += demands[k];
      std::vector<std::size_t> new_roster(cs.roster.begin(),
                                          cs.roster.begin() + (start + 1));
      for (std::size_t k = static_cast<std::size_t>(start + 1); k < cs.roster.size();
           ++k) {
        const std::size_t member = cs.roster[k];
        if (kept + demand_of(member) <= cs.capacity) {
          kept += demand_of(member);
          new_roster.push_back(member);
          continue;
        }
        if (member == gi) {
          proposer_evicted = true;
          for (std::size_t rest = k + 1; rest < cs.roster.size(); ++rest) {
            new_roster.push_back(cs.roster[rest]);
          }
          break;
        }
        assigned_cluster[member].reset();
        free_queue.push_back(member);  // uP left intact for a second chance
      }
      cs.roster = std::move(new_roster);
      cs.roster_demand = 0;
      for (std::size_t member : cs.roster) cs.roster_demand += demand_of(member);
      if (cs.roster_demand > cs.capacity) {
        throw std::logic_error("isoa_allocate: roster infeasible after eviction sweep");
      }

      if (!proposer_evicted) break;  // accepted after displacing others
      assigned_cluster[gi].reset();
      ++cursor[gi];  // rejected as proposer: this cluster is off the list
    }
  }

  Allocation out;
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (state[j].roster.empty()) continue;
    std::vector<GroupId>& roster = out.rosters[state[j].id];
    for (std::size_t member : state[j].roster) {
      roster.push_back(groups[member].id);
      out.assigned[groups[member].id] = state[j].id;
    }
  }
  return out;
}

Allocation greedy_allocate(const std::vector<UserGroup>& groups,
                           const std::vector<EdgeCluster>& clusters,
                           const PreferenceTables& prefs) {
  std::map<ClusterId, std::size_t> cluster_index;
  std::vector<ClusterState> state(clusters.size());
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    state[j].id = clusters[j].id;
    state[j].capacity = clusters[j].capacity();
    cluster_index[clusters[j].id] = j;
    auto it = prefs.cP.find(clusters[j].id);
    if (it != prefs.cP.end()) {
      for (std::size_t r = 0; r < it->second.size(); ++r) {
        state[j].rank[it->second[r]] = r;
      }
    }
  }

  std::vector<std::vector<const UserGroup*>> rosters(clusters.size());
  Allocation out;
  for (const UserGroup& g : groups) {
    auto lit = prefs.uP.find(g.id);
    if (lit == prefs.uP.end()) continue;
    for (const ClusterId& cid : lit->second) {
      auto cit = cluster_index.find(cid);
      if (cit == cluster_index.end()) continue;
      ClusterState& cs = state[cit->second];
      if (!cs.rank.count(g.id)) continue;
      if (cs.roster_demand + g.demand > cs.capacity) continue;
      cs.roster_demand += g.demand;
      rosters[cit->second].push_back(&g);
      out.assigned[g.id] = cid;
      break;
    }
  }

  for (std::size_t j = 0; j < clusters.size(); ++j) {
    if (rosters[j].empty()) continue;
    std::sort(rosters[j].begin(), rosters[j].end(),
              [&](const UserGroup* a, const UserGroup* b) {
                return state[j].rank[a->id] < state[j].rank[b->id];
              });
    std::vector<GroupId>& roster = out.rosters[clusters[j].id];
    for (const UserGroup* g : rosters[j]) roster.push_back(g->id);
  }
  return out;
}

StabilityResult is_stable(const Allocation& allocation,
                          const std::vector<UserGroup>& groups,
                          const std::vector<EdgeCluster>& clusters,
                          const PreferenceTables& prefs) {
  std::map<GroupId, const UserGroup*> group_by_id;
  for (const UserGroup& g : groups) group_by_id[g.id] = &g;

  std::map<ClusterId, Kbps> capacity;
  for (const EdgeCluster& c : clusters) capacity[c.id] = c.capacity();

  std::map<ClusterId, std::map<GroupId, std::size_t>> rank;
  for (const auto& [cid, list] : prefs.cP) {
    for (std::size_t r = 0; r < list.size(); ++r) rank[cid][list[r]] = r;
  }

  // Feasibility precondition.
  std::map<ClusterId, Kbps> roster_demand;
  for (const auto& [cid, roster] : allocation.rosters) {
    Kbps total = 0;
    for (const GroupId& gid : roster) {
      auto git = group_by_id.find(gid);
      if (git == group_by_id.end()) {
        throw std::invalid_argument("is_stable: roster names unknown group " + gid);
      }
      total += git->second->demand;
    }
    if (!capacity.count(cid) || total > capacity[cid]) {
      throw std::invalid_argument("is_stable: allocation infeasible at cluster " + cid);
    }
    roster_demand[cid] = total;
  }

  for (const UserGroup& g : groups) {
    auto uit = prefs.uP.find(g.id);
    if (uit == prefs.uP.end()) continue;
    auto ait = allocation.assigned.find(g.id);

    for (const ClusterId& cid : uit->second) {
      if (ait != allocation.assigned.end() && cid == ait->second) break;
      auto rit = rank.find(cid);
      if (rit == rank.end()) continue;
      auto my_rank_it = rit->second.find(g.id);
      if (my_rank_it == rit->second.end()) continue;

      Kbps better_demand = 0;
      auto roster_it = allocation.rosters.find(cid);
      if (roster_it != allocation.rosters.end()) {
        for (const GroupId& member : roster_it->second) {
          if (rit->second[member] < my_rank_it->second) {
            better_demand += group_by_id[member]->demand;
          }
        }
      }
      if (g.demand <= capacity[cid] - better_demand) {
        return StabilityResult{false, std::make_pair(g.id, cid)};
      }
    }
  }
  return StabilityResult{true, std::nullopt};
}

std::int64_t RankHistogram::total() const {
  std::int64_t sum = unallocated;
  for (int level = 1; level <= 6; ++level) sum += counts[level];
  return sum;
}

RankHistogram preference_rank_histogram(const Allocation& allocation,
                                        const std::vector<UserGroup>& groups,
                                        const LevelFn& level_of) {
  RankHistogram hist;
  for (const UserGroup& g : groups) {
    auto it = allocation.assigned.find(g.id);
    if (it == allocation.assigned.end()) {
      ++hist.unallocated;
      continue;
    }
    const int level = level_of(g.id, it->second);
    if (level < 1 || level > 6) {
      throw DataError("preference_rank_histogram: pair (" + g.id + ", " +
                      it->second + ") matches no preference level");
    }
    ++hist.counts[level];
  }
  return hist;
}

std::string allocation_to_json(const Allocation& allocation,
                               const std::vector<UserGroup>& groups) {
  nlohmann::json doc;
  doc["assigned"] = nlohmann::json::object();
  for (const auto& [gid, cid] : allocation.assigned) doc["assigned"][gid] = cid;
  doc["rosters"] = nlohmann::json::object();
  for (const auto& [cid, roster] : allocation.rosters) doc["rosters"][cid] = roster;
  doc["unallocated"] = allocation.unallocated(groups);
  return doc.dump(2) + "\n";
}

Allocation allocation_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("allocation: invalid JSON: ") + e.what());
  }
  Allocation out;
  try {
    for (const auto& [gid, cid] : doc.at("assigned").items()) {
      out.assigned[gid] = cid.get<std::string>();
    }
    for (const auto& [cid, roster] : doc.at("rosters").items()) {
      out.rosters[cid] = roster.get<std::vector<GroupId>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("allocation: bad document structure: ") + e.what());
  }
  return out;
}

std::string histogram_to_csv(const RankHistogram& histogram) {
  std::ostringstream out;
  out << "level,count\n";
  for (int level = 1; level <= 6; ++level) {
    out << "Lv." << level << "," << histogram.counts[level] << "\n";
  }
  out << "unallocated," << histogram.unallocated << "\n";
  return out.str();
}

}  // namespace plver
