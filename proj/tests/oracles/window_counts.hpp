#pragma once

// Contingency cells by direct per-ad counting, and a sort-based rank.

#include <algorithm>
#include <string>
#include <vector>

#include "adsurge/date.hpp"
#include "adsurge/fisher.hpp"
#include "adsurge/ingest.hpp"

namespace oracle {

/// Table for `location` with the analysis window ending at `end`: counts
/// ads (and, with `keep`, only those whose flag is set) one by one.
inline adsurge::ContingencyTable table_for(const std::vector<adsurge::AdRecord>& ads,
                                           const std::vector<bool>* keep,
                                           const std::string& location, adsurge::Date end,
                                           int analysis_days = 7, int reference_days = 91) {
  adsurge::ContingencyTable t;
  std::string region;
  for (const auto& a : ads)
    if (a.location_id == location) region = a.region_id;
  for (std::size_t i = 0; i < ads.size(); ++i) {
    if (keep && !(*keep)[i]) continue;
    const auto& a = ads[i];
    if (a.region_id != region) continue;
    const int back = end - a.posted_date;  // 0 on the end date
    if (back < 0 || back >= analysis_days + reference_days) continue;
    const bool analysis = back < analysis_days;
    const bool here = a.location_id == location;
    if (analysis && here) ++t.a;
    else if (here) ++t.b;
    else if (analysis) ++t.c;
    else ++t.d;
  }
  return t;
}

/// For each value, the fraction of the pool strictly smaller, via one sort.
inline std::vector<double> strict_rank(const std::vector<double>& pool) {
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pool[x] < pool[y]; });
  std::vector<double> out(pool.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && pool[order[j]] == pool[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k)
      out[order[k]] = static_cast<double>(i) / static_cast<double>(pool.size());
    i = j;
  }
  return out;
}

}  // namespace oracle
