#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adsurge/activity.hpp"
#include "adsurge/csv.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/linkage.hpp"
#include "adsurge/parallel.hpp"

namespace adsurge {

/// Same-location related ads within this many prior days make an ad Local.
inline constexpr std::int32_t kLocalLookbackDays = 7;

struct LabeledAd {
  std::string ad_id;
  ActivityClass activity_class = ActivityClass::Unlinked;
  std::optional<std::string> group_id;  // absent iff Unlinked

  friend bool operator==(const LabeledAd&, const LabeledAd&) = default;
};

/// Labels one member of `group` from the group's history strictly before the
/// ad's posting date.
inline ActivityClass classify_ad(const AdRecord& ad, const AdGroup& group) {
  if (!std::binary_search(group.member_ad_ids.begin(), group.member_ad_ids.end(), ad.ad_id))
    throw std::invalid_argument("ad '" + ad.ad_id + "' is not a member of group '" +
                                group.group_id + "'");
  const Date t = ad.posted_date;
  std::optional<Date> latest_prior;
  bool recent_same_location = false;
  for (const auto& h : group.history) {
    if (h.posted_date >= t) break;
    latest_prior = h.posted_date;
    if (h.location_id == ad.location_id && h.posted_date >= t - kLocalLookbackDays)
      recent_same_location = true;
  }
  if (!latest_prior) return ActivityClass::First;
  if (recent_same_location) return ActivityClass::Local;
  for (const auto& h : group.history) {
    if (h.posted_date > *latest_prior) break;
    if (h.posted_date == *latest_prior && h.location_id == ad.location_id)
      return ActivityClass::Local;
  }
  return ActivityClass::NewToTown;
}

namespace detail {

// Replays one group day by day. Labels for a day are decided from state
// built only from earlier days, then that day's ads are folded in.
inline void replay_group(const AdGroup& group, std::span<ActivityClass> labels) {
  std::unordered_map<std::string_view, Date> last_seen;
  std::vector<std::string_view> most_recent;
  bool any_prior = false;
  const auto& h = group.history;
  std::size_t i = 0;
  while (i < h.size()) {
    const Date day = h[i].posted_date;
    std::size_t j = i;
    while (j < h.size() && h[j].posted_date == day) ++j;
    for (std::size_t k = i; k < j; ++k) {
      ActivityClass c = ActivityClass::First;
      if (any_prior) {
        const std::string_view loc = h[k].location_id;
        auto it = last_seen.find(loc);
        if (it != last_seen.end() && it->second >= day - kLocalLookbackDays)
          c = ActivityClass::Local;
        else if (std::find(most_recent.begin(), most_recent.end(), loc) != most_recent.end())
          c = ActivityClass::Local;
        else
          c = ActivityClass::NewToTown;
      }
      labels[h[k].ad_index] = c;
    }
    most_recent.clear();
    for (std::size_t k = i; k < j; ++k) {
      const std::string_view loc = h[k].location_id;
      last_seen[loc] = day;
      if (std::find(most_recent.begin(), most_recent.end(), loc) == most_recent.end())
        most_recent.push_back(loc);
    }
    any_prior = true;
    i = j;
  }
}

}  // namespace detail

/// Per-ad labels in input order. Ads without phones are Unlinked.
inline std::vector<ActivityClass> classify_labels(std::span<const AdRecord> ads,
                                                  const Linkage& link, unsigned threads = 1) {
  if (link.group_of.size() != ads.size())
    throw std::invalid_argument("linkage was built from a different ad sequence");
  std::vector<ActivityClass> labels(ads.size(), ActivityClass::Unlinked);
  // Groups write disjoint label slots, so they can be replayed concurrently.
  parallel_for(link.groups.size(), threads,
               [&](std::size_t g) { detail::replay_group(link.groups[g], labels); });
  return labels;
}

inline std::vector<LabeledAd> classify_stream(std::span<const AdRecord> ads, const Linkage& link,
                                              unsigned threads = 1) {
  const auto labels = classify_labels(ads, link, threads);
  std::vector<LabeledAd> out;
  out.reserve(ads.size());
  for (std::size_t i = 0; i < ads.size(); ++i) {
    LabeledAd l{ads[i].ad_id, labels[i], std::nullopt};
    if (link.group_of[i] >= 0)
      l.group_id = link.groups[static_cast<std::size_t>(link.group_of[i])].group_id;
    out.push_back(std::move(l));
  }
  return out;
}

/// Label shares over all ads, plus the share of ads with at least one phone.
struct ClassShares {
  std::size_t total = 0;
  double first = 0, local = 0, new_to_town = 0, unlinked = 0;
  double phone_coverage = 0;
};

inline ClassShares measure_shares(std::span<const ActivityClass> labels) {
  ClassShares s;
  s.total = labels.size();
  if (labels.empty()) return s;
  std::size_t n[4] = {0, 0, 0, 0};
  for (auto c : labels) ++n[static_cast<int>(c)];
  const double total = static_cast<double>(labels.size());
  s.first = static_cast<double>(n[0]) / total;
  s.local = static_cast<double>(n[1]) / total;
  s.new_to_town = static_cast<double>(n[2]) / total;
  s.unlinked = static_cast<double>(n[3]) / total;
  s.phone_coverage = 1.0 - s.unlinked;
  return s;
}

inline const std::vector<std::string>& classify_csv_columns() {
  static const std::vector<std::string> cols{"ad_id", "date", "location", "region", "class",
                                             "group_id"};
  return cols;
}

inline void write_classify_csv(std::ostream& out, std::span<const AdRecord> ads,
                               std::span<const LabeledAd> labeled) {
  csv::write_row(out, classify_csv_columns());
  for (std::size_t i = 0; i < ads.size(); ++i) {
    csv::write_row(out, {ads[i].ad_id, ads[i].posted_date.str(), ads[i].location_id,
                         ads[i].region_id, std::string(to_string(labeled[i].activity_class)),
                         labeled[i].group_id.value_or("")});
  }
}

/// Ads (without text or phones) and their labels, as read back from a
/// classify CSV.
struct LabeledCorpus {
  std::vector<AdRecord> ads;
  std::vector<ActivityClass> labels;
};

inline LabeledCorpus read_classify_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw std::runtime_error("classified file is empty");
  const csv::Header header(row);
  const auto id = header.require("ad_id");
  const auto date = header.require("date");
  const auto loc = header.require("location");
  const auto reg = header.require("region");
  const auto cls = header.require("class");
  LabeledCorpus out;
  while (reader.next(row)) {
    const auto where = "classified file line " + std::to_string(reader.line()) + ": ";
    if (row.size() != header.names().size()) throw std::runtime_error(where + "wrong field count");
    AdRecord ad;
    ad.ad_id = row[id];
    const auto d = Date::parse(row[date]);
    if (!d) throw std::runtime_error(where + "invalid date '" + row[date] + "'");
    ad.posted_date = *d;
    ad.location_id = row[loc];
    ad.region_id = row[reg];
    const auto c = parse_activity_class(row[cls]);
    if (!c) throw std::runtime_error(where + "unknown class '" + row[cls] + "'");
    out.ads.push_back(std::move(ad));
    out.labels.push_back(*c);
  }
  return out;
}

}  // namespace adsurge
