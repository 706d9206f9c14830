#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "adsurge/activity.hpp"
#include "adsurge/csv.hpp"
#include "adsurge/date.hpp"
#include "adsurge/io.hpp"
#include "adsurge/parallel.hpp"
#include "adsurge/phonex.hpp"

namespace adsurge {

/// One published ad.
struct AdRecord {
  std::string ad_id;
  Date posted_date;
  std::string location_id;
  std::string region_id;
  std::optional<std::string> text;
  std::vector<PhoneKey> phones;  // sorted, unique

  friend bool operator==(const AdRecord&, const AdRecord&) = default;
};

/// Many-to-one location -> region mapping.
class RegionMap {
 public:
  RegionMap() = default;

  /// Adds a mapping. Returns false if the location is already mapped to a
  /// different region.
  bool add(const std::string& location, const std::string& region) {
    auto [it, inserted] = entries_.emplace(location, region);
    return inserted || it->second == region;
  }

  [[nodiscard]] const std::string* region_of(const std::string& location) const {
    auto it = entries_.find(location);
    return it == entries_.end() ? nullptr : &it->second;
  }

  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] const std::map<std::string, std::string>& entries() const { return entries_; }

  [[nodiscard]] std::vector<std::string> locations_in(const std::string& region) const {
    std::vector<std::string> out;
    for (const auto& [loc, reg] : entries_)
      if (reg == region) out.push_back(loc);
    return out;
  }

  friend bool operator==(const RegionMap&, const RegionMap&) = default;

 private:
  std::map<std::string, std::string> entries_;
};

/// CSV with columns location,region.
inline RegionMap load_region_map(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw std::runtime_error("region map is empty");
  const csv::Header header(row);
  const auto loc = header.require("location");
  const auto reg = header.require("region");
  RegionMap map;
  while (reader.next(row)) {
    if (row.size() <= std::max(loc, reg))
      throw std::runtime_error("region map line " + std::to_string(reader.line()) +
                               ": too few columns");
    if (!map.add(row[loc], row[reg]))
      throw std::runtime_error("region map line " + std::to_string(reader.line()) +
                               ": location '" + row[loc] + "' mapped to two regions");
  }
  return map;
}

inline RegionMap load_region_map(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return load_region_map(in);
}

inline void write_region_map(std::ostream& out, const RegionMap& map) {
  out << "location,region\n";
  for (const auto& [loc, reg] : map.entries()) csv::write_row(out, {loc, reg});
}

enum class AdFormat { Jsonl, Csv };

inline AdFormat guess_format(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? AdFormat::Csv : AdFormat::Jsonl;
}

struct LoadError {
  std::size_t line;
  std::string reason;
};

struct LoadResult {
  std::vector<AdRecord> records;
  std::vector<LoadError> errors;
  RegionMap region_map;  // supplied map plus mappings learned from records
};

namespace detail {

struct RawAd {
  std::optional<std::string> ad_id, date, location, region, text;
  std::vector<std::string> phones;
};

class AdValidator {
 public:
  explicit AdValidator(const RegionMap& supplied) : map_(supplied), use_map_(!supplied.empty()) {}

  void accept(RawAd raw, std::size_t line, LoadResult& out) {
    auto reject = [&](std::string why) { out.errors.push_back({line, std::move(why)}); };
    if (!raw.ad_id || raw.ad_id->empty()) return reject("missing ad_id");
    if (!raw.date) return reject("missing date");
    const auto date = Date::parse(*raw.date);
    if (!date) return reject("invalid date '" + *raw.date + "'");
    if (!raw.location || raw.location->empty()) return reject("missing location");

    std::string region;
    if (const std::string* mapped = map_.region_of(*raw.location)) {
      if (raw.region && !raw.region->empty() && *raw.region != *mapped)
        return reject("region '" + *raw.region + "' conflicts with region map entry '" + *mapped +
                      "' for location '" + *raw.location + "'");
      region = *mapped;
    } else if (use_map_ || !raw.region || raw.region->empty()) {
      return reject("unknown location '" + *raw.location + "'");
    } else {
      region = *raw.region;
    }

    AdRecord rec;
    rec.ad_id = std::move(*raw.ad_id);
    rec.posted_date = *date;
    rec.location_id = std::move(*raw.location);
    rec.region_id = std::move(region);
    rec.text = std::move(raw.text);
    for (const auto& p : raw.phones) {
      auto n = normalize_phone(p);
      if (!n.accepted()) return reject("invalid phone '" + p + "': " + n.reason);
      rec.phones.push_back(*n.key);
    }
    std::sort(rec.phones.begin(), rec.phones.end());
    rec.phones.erase(std::unique(rec.phones.begin(), rec.phones.end()), rec.phones.end());

    if (!ids_.insert(rec.ad_id).second) return reject("duplicate ad_id '" + rec.ad_id + "'");
    map_.add(rec.location_id, rec.region_id);
    out.records.push_back(std::move(rec));
  }

  RegionMap take_map() { return std::move(map_); }

 private:
  RegionMap map_;
  bool use_map_;
  std::unordered_set<std::string> ids_;
};

inline std::vector<std::string> split_phones(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find(';', start);
    auto piece = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!piece.empty()) out.push_back(std::move(piece));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace detail

/// Loads ads in file order. Invalid rows are reported in `errors` with their
/// line number and skipped; valid rows still load. With an empty region map
/// each record must carry its own region.
inline LoadResult load_ads(std::istream& in, AdFormat format, const RegionMap& region_map = {}) {
  LoadResult out;
  detail::AdValidator validator(region_map);
  if (format == AdFormat::Jsonl) {
    std::string line;
    std::size_t line_no = 0;
    auto str_field = [](const nlohmann::json& j, const char* key) -> std::optional<std::string> {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) return std::nullopt;
      if (!it->is_string()) throw std::runtime_error(std::string("field '") + key + "' is not a string");
      return it->get<std::string>();
    };
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      detail::RawAd raw;
      try {
        const auto j = nlohmann::json::parse(line);
        if (!j.is_object()) throw std::runtime_error("not a JSON object");
        raw.ad_id = str_field(j, "ad_id");
        raw.date = str_field(j, "date");
        raw.location = str_field(j, "location");
        raw.region = str_field(j, "region");
        raw.text = str_field(j, "text");
        if (auto it = j.find("phones"); it != j.end() && !it->is_null()) {
          if (!it->is_array()) throw std::runtime_error("field 'phones' is not an array");
          for (const auto& p : *it) {
            if (!p.is_string()) throw std::runtime_error("phone entries must be strings");
            raw.phones.push_back(p.get<std::string>());
          }
        }
      } catch (const std::exception& e) {
        out.errors.push_back({line_no, std::string("malformed row: ") + e.what()});
        continue;
      }
      validator.accept(std::move(raw), line_no, out);
    }
  } else {
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (reader.next(row)) {
      const csv::Header header(row);
      const auto id = header.find("ad_id");
      const auto date = header.find("date");
      const auto loc = header.find("location");
      const auto reg = header.find("region");
      const auto text = header.find("text");
      const auto phones = header.find("phones");
      while (reader.next(row)) {
        if (row.size() != header.names().size()) {
          out.errors.push_back({reader.line(), "malformed row: expected " +
                                                   std::to_string(header.names().size()) +
                                                   " fields, got " + std::to_string(row.size())});
          continue;
        }
        detail::RawAd raw;
        auto get = [&](const std::optional<std::size_t>& col) -> std::optional<std::string> {
          if (!col) return std::nullopt;
          return row[*col];
        };
        raw.ad_id = get(id);
        raw.date = get(date);
        raw.location = get(loc);
        raw.region = get(reg);
        if (text && !row[*text].empty()) raw.text = row[*text];
        if (phones) raw.phones = detail::split_phones(row[*phones]);
        validator.accept(std::move(raw), reader.line(), out);
      }
    }
  }
  out.region_map = validator.take_map();
  return out;
}

inline LoadResult load_ads(const std::filesystem::path& path, AdFormat format,
                           const RegionMap& region_map = {}) {
  auto in = io::open_input(path);
  return load_ads(in, format, region_map);
}

/// One JSONL line in the ingest schema.
inline void write_ad_jsonl(std::ostream& out, const AdRecord& ad) {
  nlohmann::json j;
  j["ad_id"] = ad.ad_id;
  j["date"] = ad.posted_date.str();
  j["location"] = ad.location_id;
  j["region"] = ad.region_id;
  if (ad.text) j["text"] = *ad.text;
  auto phones = nlohmann::json::array();
  for (const auto& p : ad.phones) phones.push_back(p.digits());
  j["phones"] = std::move(phones);
  out << j.dump() << '\n';
}

/// Unions phones extracted from each record's text into its phone set.
inline void populate_phones(std::span<AdRecord> ads, const PhoneExtractor& extractor,
                            unsigned threads = 1) {
  parallel_for(ads.size(), threads, [&](std::size_t i) {
    auto& ad = ads[i];
    if (!ad.text) return;
    auto found = extractor.extract(*ad.text);
    if (found.empty()) return;
    found.insert(found.end(), ad.phones.begin(), ad.phones.end());
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    ad.phones = std::move(found);
  });
}


/// Day-indexed counts for one location or region.
struct DailyCountSeries {
  std::string scope_id;
  Date start;
  std::vector<std::int64_t> counts;
  bool empty_input = false;

  [[nodiscard]] bool empty() const { return counts.empty(); }
  [[nodiscard]] Date last() const { return start + static_cast<std::int32_t>(counts.size()) - 1; }
  [[nodiscard]] bool covers(Date first, Date last_day) const {
    return !counts.empty() && start <= first && last_day <= last();
  }
  [[nodiscard]] std::int64_t at(Date d) const {
    return counts.at(static_cast<std::size_t>(d - start));
  }
  /// Sum over [first, last_day]; both ends must be covered.
  [[nodiscard]] std::int64_t sum(Date first, Date last_day) const {
    std::int64_t s = 0;
    for (Date d = first; d <= last_day; ++d) s += at(d);
    return s;
  }

  friend bool operator==(const DailyCountSeries&, const DailyCountSeries&) = default;
};

enum class ScopeKind { Location, Region };

struct Scope {
  ScopeKind kind;
  std::string id;
};

/// Keeps ads whose label equals `keep`. labels[i] belongs to ads[i].
struct ClassFilter {
  std::span<const ActivityClass> labels;
  ActivityClass keep;
};

/// Earliest and latest posting date. Requires non-empty input.
inline DateSpan dataset_span(std::span<const AdRecord> ads) {
  if (ads.empty()) throw std::invalid_argument("dataset_span of empty input");
  DateSpan s{ads.front().posted_date, ads.front().posted_date};
  for (const auto& a : ads) {
    s.first = std::min(s.first, a.posted_date);
    s.last = std::max(s.last, a.posted_date);
  }
  return s;
}

/// Per-day tally of ads in scope (optionally filtered) over the dataset's
/// min..max posting date. Empty input yields an empty, flagged series.
inline DailyCountSeries daily_counts(std::span<const AdRecord> ads, const Scope& scope,
                                     const std::optional<ClassFilter>& filter = std::nullopt) {
  DailyCountSeries out;
  out.scope_id = scope.id;
  if (ads.empty()) {
    out.empty_input = true;
    return out;
  }
  if (filter && filter->labels.size() != ads.size())
    throw std::invalid_argument("label count does not match ad count");
  const DateSpan span = dataset_span(ads);
  out.start = span.first;
  out.counts.assign(static_cast<std::size_t>(span.length()), 0);
  for (std::size_t i = 0; i < ads.size(); ++i) {
    const auto& a = ads[i];
    const std::string& key = scope.kind == ScopeKind::Location ? a.location_id : a.region_id;
    if (key != scope.id) continue;
    if (filter && filter->labels[i] != filter->keep) continue;
    ++out.counts[static_cast<std::size_t>(a.posted_date - span.first)];
  }
  return out;
}

/// All location and region series of a dataset in one pass, aligned to the
/// dataset span.
struct CountTable {
  DateSpan span;
  std::map<std::string, DailyCountSeries> by_location;
  std::map<std::string, DailyCountSeries> by_region;
  std::map<std::string, std::string> region_of;
};

inline CountTable count_all(std::span<const AdRecord> ads,
                            const std::optional<ClassFilter>& filter = std::nullopt) {
  CountTable t;
  if (ads.empty()) return t;
  if (filter && filter->labels.size() != ads.size())
    throw std::invalid_argument("label count does not match ad count");
  t.span = dataset_span(ads);
  const auto days = static_cast<std::size_t>(t.span.length());
  auto series_for = [&](std::map<std::string, DailyCountSeries>& m,
                        const std::string& id) -> DailyCountSeries& {
    auto it = m.find(id);
    if (it == m.end()) {
      DailyCountSeries s;
      s.scope_id = id;
      s.start = t.span.first;
      s.counts.assign(days, 0);
      it = m.emplace(id, std::move(s)).first;
    }
    return it->second;
  };
  // Two lookups per ad against a cache of the previous ad's location keeps
  // this linear for sorted input.
  const std::string* last_loc = nullptr;
  DailyCountSeries* loc_series = nullptr;
  DailyCountSeries* reg_series = nullptr;
  for (std::size_t i = 0; i < ads.size(); ++i) {
    const auto& a = ads[i];
    if (!last_loc || *last_loc != a.location_id) {
      loc_series = &series_for(t.by_location, a.location_id);
      reg_series = &series_for(t.by_region, a.region_id);
      t.region_of.emplace(a.location_id, a.region_id);
      last_loc = &a.location_id;
    }
    if (filter && filter->labels[i] != filter->keep) continue;
    const auto d = static_cast<std::size_t>(a.posted_date - t.span.first);
    ++loc_series->counts[d];
    ++reg_series->counts[d];
  }
  return t;
}

}  // namespace adsurge
