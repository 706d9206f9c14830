#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "adsurge/csv.hpp"
#include "adsurge/ingest.hpp"

namespace adsurge {

/// Union-find with path compression and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  [[nodiscard]] std::size_t size_of(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct HistoryEntry {
  Date posted_date;
  std::string location_id;
  std::string ad_id;
  std::size_t ad_index;  // position in the input sequence
};

/// Ads connected through chains of shared phone numbers.
struct AdGroup {
  std::string group_id;                 // smallest member ad_id
  std::vector<std::string> member_ad_ids;  // sorted
  std::vector<PhoneKey> phone_keys;     // sorted
  std::vector<HistoryEntry> history;    // by (posted_date, ad_id)
};

struct Linkage {
  std::vector<AdGroup> groups;          // sorted by group_id
  std::vector<std::string> unlinked;    // phone-less ads, input order
  std::vector<std::int64_t> group_of;   // per input ad: index into groups, -1 if unlinked
};

namespace detail {

inline Linkage assemble_groups(std::span<const AdRecord> ads, DisjointSet& dsu) {
  Linkage out;
  out.group_of.assign(ads.size(), -1);
  std::unordered_map<std::size_t, std::size_t> slot_of_root;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < ads.size(); ++i) {
    if (ads[i].phones.empty()) {
      out.unlinked.push_back(ads[i].ad_id);
      continue;
    }
    const auto root = dsu.find(i);
    auto [it, inserted] = slot_of_root.emplace(root, members.size());
    if (inserted) members.emplace_back();
    members[it->second].push_back(i);
  }
  std::vector<AdGroup> groups(members.size());
  for (std::size_t g = 0; g < members.size(); ++g) {
    AdGroup& grp = groups[g];
    auto& idx = members[g];
    grp.history.reserve(idx.size());
    for (std::size_t i : idx) {
      grp.history.push_back({ads[i].posted_date, ads[i].location_id, ads[i].ad_id, i});
      grp.phone_keys.insert(grp.phone_keys.end(), ads[i].phones.begin(), ads[i].phones.end());
    }
    std::sort(grp.history.begin(), grp.history.end(),
              [](const HistoryEntry& a, const HistoryEntry& b) {
                if (a.posted_date != b.posted_date) return a.posted_date < b.posted_date;
                return a.ad_id < b.ad_id;
              });
    std::sort(grp.phone_keys.begin(), grp.phone_keys.end());
    grp.phone_keys.erase(std::unique(grp.phone_keys.begin(), grp.phone_keys.end()),
                         grp.phone_keys.end());
    grp.member_ad_ids.reserve(idx.size());
    for (const auto& h : grp.history) grp.member_ad_ids.push_back(h.ad_id);
    std::sort(grp.member_ad_ids.begin(), grp.member_ad_ids.end());
    grp.group_id = grp.member_ad_ids.front();
  }
  std::sort(groups.begin(), groups.end(),
            [](const AdGroup& a, const AdGroup& b) { return a.group_id < b.group_id; });
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (const auto& h : groups[g].history) out.group_of[h.ad_index] = static_cast<std::int64_t>(g);
  out.groups = std::move(groups);
  return out;
}

}  // namespace detail

/// Partitions ads carrying at least one phone into connected components of
/// the ad-phone graph. Phone-less ads come back as unlinked.
inline Linkage build_groups(std::span<const AdRecord> ads) {
  DisjointSet dsu(ads.size());
  std::unordered_map<std::uint64_t, std::size_t> first_ad_with;
  first_ad_with.reserve(ads.size());
  for (std::size_t i = 0; i < ads.size(); ++i) {
    for (const auto& p : ads[i].phones) {
      auto [it, inserted] = first_ad_with.emplace(p.value(), i);
      if (!inserted) dsu.unite(it->second, i);
    }
  }
  return detail::assemble_groups(ads, dsu);
}

/// (ad_id, group_id) in input order; group_id is empty for unlinked ads.
inline void write_link_csv(std::ostream& out, std::span<const AdRecord> ads, const Linkage& link) {
  out << "ad_id,group_id\n";
  for (std::size_t i = 0; i < ads.size(); ++i) {
    const auto g = link.group_of[i];
    csv::write_row(out, {ads[i].ad_id, g < 0 ? std::string{} : link.groups[static_cast<std::size_t>(g)].group_id});
  }
}

/// Rebuilds a Linkage from a link CSV written for the same ads. Every ad
/// must appear exactly once and assignments must agree with phone presence.
inline Linkage read_link_csv(std::istream& in, std::span<const AdRecord> ads) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw std::runtime_error("link file is empty");
  const csv::Header header(row);
  const auto id_col = header.require("ad_id");
  const auto group_col = header.require("group_id");
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(ads.size());
  for (std::size_t i = 0; i < ads.size(); ++i) index.emplace(ads[i].ad_id, i);
  std::unordered_map<std::string, std::size_t> group_anchor;
  DisjointSet dsu(ads.size());
  std::vector<bool> seen(ads.size(), false);
  while (reader.next(row)) {
    const auto line = std::to_string(reader.line());
    if (row.size() <= std::max(id_col, group_col))
      throw std::runtime_error("link file line " + line + ": too few columns");
    auto it = index.find(row[id_col]);
    if (it == index.end())
      throw std::runtime_error("link file line " + line + ": unknown ad_id '" + row[id_col] + "'");
    const std::size_t i = it->second;
    if (seen[i]) throw std::runtime_error("link file line " + line + ": duplicate ad_id");
    seen[i] = true;
    const std::string& gid = row[group_col];
    if (gid.empty() != ads[i].phones.empty())
      throw std::runtime_error("link file line " + line + ": group assignment of '" +
                               ads[i].ad_id + "' disagrees with its phones");
    if (gid.empty()) continue;
    auto [anchor, inserted] = group_anchor.emplace(gid, i);
    if (!inserted) dsu.unite(anchor->second, i);
  }
  for (std::size_t i = 0; i < ads.size(); ++i)
    if (!seen[i]) throw std::runtime_error("link file is missing ad '" + ads[i].ad_id + "'");
  return detail::assemble_groups(ads, dsu);
}

}  // namespace adsurge
