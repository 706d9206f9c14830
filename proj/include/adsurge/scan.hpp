#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adsurge/activity.hpp"
#include "adsurge/csv.hpp"
#include "adsurge/date.hpp"
#include "adsurge/fisher.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/parallel.hpp"

namespace adsurge {

struct ScanConfig {
  std::int32_t analysis_days = 7;
  std::int32_t reference_days = 91;
  std::int32_t stride_days = 1;
  Sidedness sidedness = Sidedness::Greater;

  /// Days of history a window needs, including its own end date.
  [[nodiscard]] std::int32_t span_days() const { return analysis_days + reference_days; }

  void validate() const {
    if (analysis_days < 1) throw std::invalid_argument("analysis_days must be >= 1");
    if (reference_days < analysis_days)
      throw std::invalid_argument("reference_days must be >= analysis_days");
    if (stride_days < 1) throw std::invalid_argument("stride_days must be >= 1");
  }

  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

enum class EmpiricalPool { PerLocation, Global };

inline std::string to_string(EmpiricalPool p) {
  return p == EmpiricalPool::PerLocation ? "per-location" : "global";
}

inline EmpiricalPool parse_pool(const std::string& s) {
  if (s == "per-location") return EmpiricalPool::PerLocation;
  if (s == "global") return EmpiricalPool::Global;
  throw std::invalid_argument("unknown pool '" + s + "' (expected per-location|global)");
}

namespace window_flags {
inline constexpr std::uint8_t kWarmUp = 1;
inline constexpr std::uint8_t kNoBaseline = 2;
}  // namespace window_flags

struct TableBuild {
  ContingencyTable table;
  std::uint8_t flags = 0;
};

/// Cells for the analysis window ending at end_date and the reference window
/// right before it. The baseline is region minus location.
inline TableBuild build_table(const DailyCountSeries& loc, const DailyCountSeries& region,
                              Date end_date, const ScanConfig& config) {
  config.validate();
  TableBuild out;
  const Date first = end_date - (config.span_days() - 1);
  if (!loc.covers(first, end_date) || !region.covers(first, end_date)) {
    out.flags |= window_flags::kWarmUp;
    return out;
  }
  const Date ref_last = end_date - config.analysis_days;
  for (Date d = first; d <= end_date; ++d) {
    const std::int64_t l = loc.at(d);
    const std::int64_t r = region.at(d);
    if (l < 0 || r < l)
      throw std::invalid_argument("location count exceeds region count on " + d.str());
    if (d <= ref_last) {
      out.table.b += l;
      out.table.d += r - l;
    } else {
      out.table.a += l;
      out.table.c += r - l;
    }
  }
  if (out.table.c + out.table.d == 0) out.flags |= window_flags::kNoBaseline;
  return out;
}

/// One (location, end date) scan result.
struct ScanWindow {
  std::string location_id;
  Stream stream = Stream::All;
  Date end_date;
  std::int64_t observed = 0;
  double expected = 0;
  double fisher_p = 1;
  double log_p = 0;  // ranking key; stays finite where fisher_p underflows
  double exceedance = 0;
  std::optional<double> ratio;  // absent when expected == 0
  std::optional<double> empirical_p;
  std::uint8_t flags = 0;

  [[nodiscard]] bool no_baseline() const { return flags & window_flags::kNoBaseline; }

  friend bool operator==(const ScanWindow&, const ScanWindow&) = default;
};

/// Fills the derived columns from the observed count and its expectation.
inline ScanWindow make_window(std::string location, Stream stream, Date end_date,
                              std::int64_t observed, double expected, double fisher_p,
                              double log_p, std::uint8_t flags = 0) {
  ScanWindow w;
  w.location_id = std::move(location);
  w.stream = stream;
  w.end_date = end_date;
  w.observed = observed;
  w.expected = expected;
  w.fisher_p = fisher_p;
  w.log_p = log_p;
  w.exceedance = static_cast<double>(observed) - expected;
  if (expected != 0) w.ratio = static_cast<double>(observed) / expected;
  w.flags = flags;
  return w;
}

/// True when x is strictly more significant than y.
inline bool more_significant(const ScanWindow& x, const ScanWindow& y) { return x.log_p < y.log_p; }

/// Sliding scan of one location against its region, one window per valid
/// end date at the configured stride. Warm-up end dates emit nothing.
inline std::vector<ScanWindow> scan_location(const DailyCountSeries& loc,
                                             const DailyCountSeries& region,
                                             const ScanConfig& config, Stream stream = Stream::All) {
  config.validate();
  std::vector<ScanWindow> out;
  if (loc.empty() || region.empty()) return out;
  const Date first = std::max(loc.start, region.start);
  const Date last = std::min(loc.last(), region.last());
  const Date first_end = first + (config.span_days() - 1);
  if (first_end > last) return out;

  // Prefix sums over the shared span make each window O(1).
  const auto days = static_cast<std::size_t>(last - first + 1);
  std::vector<std::int64_t> pl(days + 1, 0), pr(days + 1, 0);
  for (std::size_t i = 0; i < days; ++i) {
    const Date d = first + static_cast<std::int32_t>(i);
    const std::int64_t l = loc.at(d);
    const std::int64_t r = region.at(d);
    if (l < 0 || r < l)
      throw std::invalid_argument("location count exceeds region count on " + d.str());
    pl[i + 1] = pl[i] + l;
    pr[i + 1] = pr[i] + r;
  }
  auto range = [&](const std::vector<std::int64_t>& p, Date lo, Date hi) {
    return p[static_cast<std::size_t>(hi - first) + 1] - p[static_cast<std::size_t>(lo - first)];
  };
  out.reserve(static_cast<std::size_t>((last - first_end) / config.stride_days + 1));
  for (Date end = first_end; end <= last; end += config.stride_days) {
    const Date ana_first = end - (config.analysis_days - 1);
    const Date ref_first = end - (config.span_days() - 1);
    const Date ref_last = ana_first - 1;
    ContingencyTable t;
    t.a = range(pl, ana_first, end);
    t.b = range(pl, ref_first, ref_last);
    t.c = range(pr, ana_first, end) - t.a;
    t.d = range(pr, ref_first, ref_last) - t.b;
    std::uint8_t flags = 0;
    FisherResult f = fisher_test(t, config.sidedness);
    if (t.c + t.d == 0) {
      flags |= window_flags::kNoBaseline;
      f.p_value = 1;
      f.log_p = 0;
    }
    out.push_back(make_window(loc.scope_id, stream, end, t.a, f.expected_a, f.p_value, f.log_p, flags));
  }
  return out;
}

/// Empirical p of each window: the fraction of its pool with strictly
/// smaller Fisher p. Pools never mix streams.
inline void assign_empirical_p(std::span<ScanWindow> windows, EmpiricalPool pool) {
  if (windows.empty()) throw std::invalid_argument("empirical p over an empty pool");
  std::map<std::pair<int, std::string>, std::vector<double>> pools;
  auto key = [&](const ScanWindow& w) {
    return std::make_pair(static_cast<int>(w.stream),
                          pool == EmpiricalPool::PerLocation ? w.location_id : std::string{});
  };
  for (const auto& w : windows) pools[key(w)].push_back(w.log_p);
  for (auto& [k, v] : pools) std::sort(v.begin(), v.end());
  for (auto& w : windows) {
    const auto& v = pools.at(key(w));
    const auto smaller = std::lower_bound(v.begin(), v.end(), w.log_p) - v.begin();
    w.empirical_p = static_cast<double>(smaller) / static_cast<double>(v.size());
  }
}

/// Scans every location for each requested stream, then assigns empirical p.
/// Output is ordered by stream, location, end date.
inline std::vector<ScanWindow> scan_dataset(std::span<const AdRecord> ads,
                                            std::span<const ActivityClass> labels,
                                            std::span<const Stream> streams,
                                            const ScanConfig& config, EmpiricalPool pool,
                                            unsigned threads = 1) {
  config.validate();
  std::vector<ScanWindow> all;
  for (Stream stream : streams) {
    std::optional<ClassFilter> filter;
    if (stream == Stream::NewToTown) {
      if (labels.size() != ads.size())
        throw std::invalid_argument("the ntt stream needs one label per ad");
      filter = ClassFilter{labels, ActivityClass::NewToTown};
    }
    const CountTable counts = count_all(ads, filter);
    std::vector<const DailyCountSeries*> locs;
    for (const auto& [id, s] : counts.by_location) locs.push_back(&s);
    std::vector<std::vector<ScanWindow>> per(locs.size());
    parallel_for(locs.size(), threads, [&](std::size_t i) {
      const auto& region = counts.by_region.at(counts.region_of.at(locs[i]->scope_id));
      per[i] = scan_location(*locs[i], region, config, stream);
    });
    for (auto& v : per) all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  if (!all.empty()) assign_empirical_p(all, pool);
  return all;
}

// ---- scan CSV -------------------------------------------------------------

inline const std::vector<std::string>& scan_csv_columns() {
  static const std::vector<std::string> cols{"location", "end_date", "stream",     "observed",
                                             "expected", "fisher_p", "exceedance", "ratio",
                                             "empirical_p", "flags"};
  return cols;
}

/// Decimal p-value. Values below the normal double range are rendered from
/// the log so they keep their ordering on the way back in.
inline std::string format_p(double p, double log_p) {
  if (p >= DBL_MIN) return csv::format_double(p);
  const double l10 = log_p / std::log(10.0);
  auto e = static_cast<long>(std::floor(l10));
  double m = std::pow(10.0, l10 - static_cast<double>(e));
  if (m >= 10) {
    m /= 10;
    ++e;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15fe%ld", m, e);
  return buf;
}

/// Inverse of format_p: returns (p, log p).
inline std::optional<std::pair<double, double>> parse_p(const std::string& s) {
  if (auto v = csv::parse_double(s); v && *v >= DBL_MIN && *v <= 1) return std::make_pair(*v, std::log(*v));
  const auto e = s.find_first_of("eE");
  if (e == std::string::npos) return std::nullopt;
  const auto m = csv::parse_double(s.substr(0, e));
  const auto x = csv::parse_int(s.substr(e + 1 + (s[e + 1] == '+' ? 1 : 0)));
  if (!m || !x || *m <= 0) return std::nullopt;
  const double lp = std::log(*m) + static_cast<double>(*x) * std::log(10.0);
  return std::make_pair(std::exp(lp), lp);
}

inline std::string format_flags(std::uint8_t flags) {
  std::string s;
  if (flags & window_flags::kWarmUp) s += "warm_up";
  if (flags & window_flags::kNoBaseline) s += s.empty() ? "no_baseline" : "|no_baseline";
  return s;
}

inline std::vector<std::string> scan_row_fields(const ScanWindow& w) {
  return {w.location_id,
          w.end_date.str(),
          std::string(to_string(w.stream)),
          std::to_string(w.observed),
          csv::format_double(w.expected),
          format_p(w.fisher_p, w.log_p),
          csv::format_double(w.exceedance),
          w.ratio ? csv::format_double(*w.ratio) : std::string{},
          w.empirical_p ? csv::format_double(*w.empirical_p) : std::string{},
          format_flags(w.flags)};
}

inline void write_scan_csv(std::ostream& out, std::span<const ScanWindow> windows) {
  csv::write_row(out, scan_csv_columns());
  for (const auto& w : windows) csv::write_row(out, scan_row_fields(w));
}

inline std::vector<ScanWindow> read_scan_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw std::runtime_error("scan file is empty");
  const csv::Header h(row);
  const auto c_loc = h.require("location"), c_end = h.require("end_date"),
             c_stream = h.require("stream"), c_obs = h.require("observed"),
             c_exp = h.require("expected"), c_p = h.require("fisher_p"),
             c_ratio = h.require("ratio"), c_emp = h.require("empirical_p"),
             c_flags = h.require("flags");
  std::vector<ScanWindow> out;
  while (reader.next(row)) {
    const auto where = "scan file line " + std::to_string(reader.line()) + ": ";
    if (row.size() != h.names().size()) throw std::runtime_error(where + "wrong field count");
    const auto end = Date::parse(row[c_end]);
    const auto obs = csv::parse_int(row[c_obs]);
    const auto expd = csv::parse_double(row[c_exp]);
    const auto p = parse_p(row[c_p]);
    if (!end || !obs || !expd || !p) throw std::runtime_error(where + "malformed numeric field");
    std::uint8_t flags = 0;
    if (row[c_flags].find("warm_up") != std::string::npos) flags |= window_flags::kWarmUp;
    if (row[c_flags].find("no_baseline") != std::string::npos) flags |= window_flags::kNoBaseline;
    auto w = make_window(row[c_loc], parse_stream(row[c_stream]), *end, *obs, *expd, p->first,
                         p->second, flags);
    if (row[c_ratio].empty()) w.ratio.reset();
    if (!row[c_emp].empty()) {
      const auto e = csv::parse_double(row[c_emp]);
      if (!e) throw std::runtime_error(where + "malformed empirical_p");
      w.empirical_p = *e;
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace adsurge
