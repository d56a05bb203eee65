#include "plver/mkp.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace plver {

MkpResult solve_mkp_greedy(std::span<const MkpItem> items,
                           std::span<const MkpBin> bins) {
  MkpResult result;
  result.assignment.assign(items.size(), -1);
  result.bin_load.assign(bins.size(), 0);

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].weight != items[b].weight) return items[a].weight > items[b].weight;
    if (items[a].stream != items[b].stream) return items[a].stream < items[b].stream;
    return items[a].group < items[b].group;
  });

  for (std::size_t idx : order) {
    for (std::size_t j = 0; j < bins.size(); ++j) {
      if (result.bin_load[j] + items[idx].weight <= bins[j].capacity) {
        result.bin_load[j] += items[idx].weight;
        result.assignment[idx] = static_cast<int>(j);
        result.packed_total += items[idx].weight;
        break;
      }
    }
  }
  return result;
}

namespace {

struct ExactSearch {
  std::span<const MkpItem> items;
  std::span<const MkpBin> bins;
  std::vector<Kbps> suffix_total;
  std::vector<Kbps> residual;
  std::vector<int> current;
  std::vector<int> best;
  Kbps best_value = -1;

  void dfs(std::size_t idx, Kbps value) {
    if (idx == items.size()) {
      if (value > best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    if (value + suffix_total[idx] <= best_value) return;  // cannot strictly improve

    const Kbps w = items[idx].weight;
    for (std::size_t j = 0; j < bins.size(); ++j) {
      if (residual[j] < w) continue;
      // Equal residuals are interchangeable; the earlier bin already covers
      // this branch with a lexicographically smaller assignment.
      bool duplicate = false;
      for (std::size_t k = 0; k < j; ++k) {
        if (residual[k] == residual[j]) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      residual[j] -= w;
      current[idx] = static_cast<int>(j);
      dfs(idx + 1, value + w);
      residual[j] += w;
    }
    current[idx] = -1;
    dfs(idx + 1, value);
  }
};

}  // namespace

MkpResult solve_mkp_exact(std::span<const MkpItem> items,
                          std::span<const MkpBin> bins) {
  if (items.size() > 16 || bins.size() > 4) {
    throw std::invalid_argument(
        "solve_mkp_exact: instance exceeds the exact-search bound");
  }

  ExactSearch search;
  search.items = items;
  search.bins = bins;
  search.suffix_total.assign(items.size() + 1, 0);
  for (std::size_t i = items.size(); i-- > 0;) {
    search.suffix_total[i] = search.suffix_total[i + 1] + items[i].weight;
  }
  search.residual.reserve(bins.size());
  for (const MkpBin& bin : bins) search.residual.push_back(bin.capacity);
  search.current.assign(items.size(), -1);
  search.best.assign(items.size(), -1);
  search.best_value = -1;
  search.dfs(0, 0);

  MkpResult result;
  result.assignment = search.best;
  result.packed_total = std::max<Kbps>(search.best_value, 0);
  result.bin_load.assign(bins.size(), 0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (result.assignment[i] >= 0) {
      result.bin_load[static_cast<std::size_t>(result.assignment[i])] +=
          items[i].weight;
    }
  }
  return result;
}

}  // namespace plver
