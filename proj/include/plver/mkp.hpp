#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "plver/model.hpp"

namespace plver {

/// One viewer-unit: profit equals weight equals the viewer's bitrate.
struct MkpItem {
  StreamKey stream;
  GroupId group;
  Kbps weight = 0;
};

struct MkpBin {
  ServerId id;
  Kbps capacity = 0;
};

struct MkpResult {
  std::vector<int> assignment;  // item index -> bin index, -1 unassigned
  Kbps packed_total = 0;
  std::vector<Kbps> bin_load;
};

/// First-fit-decreasing: items by weight descending (ties by stream id, then
/// group id, then input order), each into the first bin with room.
MkpResult solve_mkp_greedy(std::span<const MkpItem> items,
                           std::span<const MkpBin> bins);

/// Exhaustive branch-and-bound, exact for small instances (items <= 16,
/// bins <= 4; throws beyond that). Among optimal packings returns the
/// lexicographically smallest assignment vector (bins before "unassigned").
MkpResult solve_mkp_exact(std::span<const MkpItem> items,
                          std::span<const MkpBin> bins);

}  // namespace plver
