#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plver/model.hpp"
#include "plver/topology.hpp"

namespace plver {

/// One-to-multiple allocation: each group serves from at most one cluster.
/// Rosters hold each cluster's groups ordered by that cluster's preference.
struct Allocation {
  std::map<GroupId, ClusterId> assigned;
  std::map<ClusterId, std::vector<GroupId>> rosters;

  std::vector<GroupId> unallocated(const std::vector<UserGroup>& groups) const;
};

/// Index of the last roster position whose demand prefix still fits the
/// capacity (the violation starts right after it). Returns -1 when even the
/// first element overflows. Binary search from the proposer's position;
/// equals a linear scan over all prefixes because every prefix before the
/// proposer was feasible pre-insertion.
/// Precondition: the roster's total demand exceeds the capacity.
std::ptrdiff_t bsearch_violation_start(std::span<const Kbps> roster_demands,
                                       Kbps capacity, std::size_t proposer_pos);

/// Integral stable one-to-multiple allocation: deferred-acceptance proposal
/// rounds with capacity-driven eviction. Free groups are processed FIFO; a
/// rejected proposer immediately retries down its list. Groups that exhaust
/// their lists stay unallocated.
Allocation isoa_allocate(const std::vector<UserGroup>& groups,
                         const std::vector<EdgeCluster>& clusters,
                         const PreferenceTables& prefs);

/// Baseline: groups in input order each take the most-preferred cluster with
/// enough remaining capacity; no evictions.
Allocation greedy_allocate(const std::vector<UserGroup>& groups,
                           const std::vector<EdgeCluster>& clusters,
                           const PreferenceTables& prefs);

struct StabilityResult {
  bool stable = false;
  std::optional<std::pair<GroupId, ClusterId>> blocking;
};

/// Blocking pair check: (i, j) blocks when i strictly prefers j to its current
/// match (or is unallocated with j listed), j lists i, and i fits beside the
/// incumbents j ranks above i. Throws on a capacity-infeasible allocation.
StabilityResult is_stable(const Allocation& allocation,
                          const std::vector<UserGroup>& groups,
                          const std::vector<EdgeCluster>& clusters,
                          const PreferenceTables& prefs);

struct RankHistogram {
  // counts[1..6] index preference levels; counts[0] is unused.
  std::array<std::int64_t, 7> counts{};
  std::int64_t unallocated = 0;

  std::int64_t total() const;
};

/// Buckets groups by the preference level of their assigned cluster.
/// Throws when an assigned pair matches no level (topology bug).
RankHistogram preference_rank_histogram(const Allocation& allocation,
                                        const std::vector<UserGroup>& groups,
                                        const LevelFn& level_of);

std::string allocation_to_json(const Allocation& allocation,
                               const std::vector<UserGroup>& groups);
Allocation allocation_from_json(const std::string& text);

/// CSV with rows Lv.1..Lv.6 plus unallocated: "level,count".
std::string histogram_to_csv(const RankHistogram& histogram);

}  // namespace plver
