#pragma once

// Connected components of the ad-phone bipartite graph by breadth-first search.

#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "adsurge/ingest.hpp"

namespace oracle {

/// Set of member-id sets, one per component of ads that carry phones.
inline std::set<std::set<std::string>> components(const std::vector<adsurge::AdRecord>& ads) {
  std::map<std::uint64_t, std::vector<std::size_t>> ads_of_phone;
  for (std::size_t i = 0; i < ads.size(); ++i)
    for (const auto& p : ads[i].phones) ads_of_phone[p.value()].push_back(i);
  std::vector<bool> seen(ads.size(), false);
  std::set<std::uint64_t> phone_seen;
  std::set<std::set<std::string>> out;
  for (std::size_t s = 0; s < ads.size(); ++s) {
    if (seen[s] || ads[s].phones.empty()) continue;
    std::set<std::string> comp;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      comp.insert(ads[i].ad_id);
      for (const auto& p : ads[i].phones) {
        if (!phone_seen.insert(p.value()).second) continue;
        for (std::size_t j : ads_of_phone[p.value()])
          if (!seen[j]) {
            seen[j] = true;
            q.push(j);
          }
      }
    }
    out.insert(std::move(comp));
  }
  return out;
}

/// Component index per ad (-1 without phones), in ad order.
inline std::vector<long> component_index(const std::vector<adsurge::AdRecord>& ads) {
  std::vector<long> idx(ads.size(), -1);
  long next = 0;
  std::map<std::uint64_t, std::vector<std::size_t>> ads_of_phone;
  for (std::size_t i = 0; i < ads.size(); ++i)
    for (const auto& p : ads[i].phones) ads_of_phone[p.value()].push_back(i);
  for (std::size_t s = 0; s < ads.size(); ++s) {
    if (idx[s] >= 0 || ads[s].phones.empty()) continue;
    std::queue<std::size_t> q;
    q.push(s);
    idx[s] = next;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      for (const auto& p : ads[i].phones)
        for (std::size_t j : ads_of_phone[p.value()])
          if (idx[j] < 0) {
            idx[j] = next;
            q.push(j);
          }
    }
    ++next;
  }
  return idx;
}

}  // namespace oracle
