#pragma once

// Per-ad classification straight from the definitions, quadratic per group.

#include <vector>

#include "adsurge/activity.hpp"
#include "adsurge/ingest.hpp"
#include "oracles/components.hpp"

namespace oracle {

inline std::vector<adsurge::ActivityClass> classify(const std::vector<adsurge::AdRecord>& ads) {
  using adsurge::ActivityClass;
  const auto comp = component_index(ads);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < ads.size(); ++i) {
    if (comp[i] < 0) continue;
    if (members.size() <= static_cast<std::size_t>(comp[i])) members.resize(static_cast<std::size_t>(comp[i]) + 1);
    members[static_cast<std::size_t>(comp[i])].push_back(i);
  }
  std::vector<ActivityClass> out(ads.size(), ActivityClass::Unlinked);
  for (std::size_t i = 0; i < ads.size(); ++i) {
    if (comp[i] < 0) continue;
    const auto& ad = ads[i];
    const auto& group = members[static_cast<std::size_t>(comp[i])];
    bool has_prior = false;
    bool within_week = false;
    adsurge::Date latest;
    for (std::size_t j : group) {
      const auto d = ads[j].posted_date;
      if (!(d < ad.posted_date)) continue;
      if (!has_prior || latest < d) latest = d;
      has_prior = true;
      const int gap = ad.posted_date - d;
      if (gap >= 1 && gap <= 7 && ads[j].location_id == ad.location_id) within_week = true;
    }
    if (!has_prior) {
      out[i] = ActivityClass::First;
      continue;
    }
    bool at_latest = false;
    for (std::size_t j : group)
      if (ads[j].posted_date == latest && ads[j].location_id == ad.location_id) at_latest = true;
    out[i] = (within_week || at_latest) ? ActivityClass::Local : ActivityClass::NewToTown;
  }
  return out;
}

}  // namespace oracle
