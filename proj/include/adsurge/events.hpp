#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adsurge/activity.hpp"
#include "adsurge/csv.hpp"
#include "adsurge/date.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/scan.hpp"

namespace adsurge {

/// Days added before an event's start and after its end when searching for
/// its best window. Also the half-width of plot highlights.
inline constexpr std::int32_t kEventEnvelopeDays = 7;

struct EventSpec {
  std::string name;
  std::string location_id;
  Date start_date;
  Date end_date;

  [[nodiscard]] DateSpan envelope() const {
    return {start_date - kEventEnvelopeDays, end_date + kEventEnvelopeDays};
  }
  friend bool operator==(const EventSpec&, const EventSpec&) = default;
};

/// Locations and date span a scan output speaks for.
struct ScanCoverage {
  DateSpan span;
  std::set<std::string> locations;

  /// Reconstructs coverage from emitted windows: the earliest window needs
  /// span_days() of history before its end date.
  static ScanCoverage from_windows(std::span<const ScanWindow> windows, const ScanConfig& config) {
    if (windows.empty()) throw std::invalid_argument("no scan windows");
    ScanCoverage c{{windows.front().end_date, windows.front().end_date}, {}};
    for (const auto& w : windows) {
      c.span.first = std::min(c.span.first, w.end_date);
      c.span.last = std::max(c.span.last, w.end_date);
      c.locations.insert(w.location_id);
    }
    c.span.first = c.span.first - (config.span_days() - 1);
    return c;
  }
};

/// Full deterministic order: more significant first, then larger
/// exceedance, then location, then earlier end date, then stream.
inline bool screening_order(const ScanWindow& x, const ScanWindow& y) {
  if (x.log_p != y.log_p) return x.log_p < y.log_p;
  if (x.exceedance != y.exceedance) return x.exceedance > y.exceedance;
  if (x.location_id != y.location_id) return x.location_id < y.location_id;
  if (x.end_date != y.end_date) return x.end_date < y.end_date;
  return x.stream < y.stream;
}

struct EventReport {
  EventSpec event;
  std::optional<ScanWindow> all;  // best window of the all-ads stream
  std::optional<ScanWindow> ntt;  // best window of the new-to-town stream
  std::vector<std::string> notes;

  [[nodiscard]] const std::optional<ScanWindow>& best(Stream s) const {
    return s == Stream::All ? all : ntt;
  }
};

/// Picks, per stream, the most significant window of the event's location
/// whose end date lies in the event envelope. Windows are copied unchanged.
inline EventReport analyze_event(const EventSpec& event, std::span<const ScanWindow> windows,
                                 const ScanCoverage& coverage) {
  if (event.start_date > event.end_date)
    throw std::invalid_argument("event '" + event.name + "' ends before it starts");
  if (!coverage.locations.count(event.location_id))
    throw std::invalid_argument("event '" + event.name + "': unknown location '" +
                                event.location_id + "'");
  const DateSpan env = event.envelope();
  if (!env.intersects(coverage.span))
    throw std::invalid_argument("event '" + event.name + "': envelope " + env.first.str() +
                                ".." + env.last.str() + " lies outside the dataset span " +
                                coverage.span.first.str() + ".." + coverage.span.last.str());
  EventReport r{event, std::nullopt, std::nullopt, {}};
  for (const auto& w : windows) {
    if (w.location_id != event.location_id || !env.contains(w.end_date)) continue;
    auto& slot = w.stream == Stream::All ? r.all : r.ntt;
    if (!slot || screening_order(w, *slot)) slot = w;
  }
  for (Stream s : {Stream::All, Stream::NewToTown})
    if (!r.best(s)) r.notes.push_back("no data for stream " + std::string(to_string(s)));
  return r;
}

struct ScreeningResult {
  std::vector<ScanWindow> ranked;
  std::size_t k = 0;
};

/// Top-k windows of one stream whose end date falls in `range`.
inline ScreeningResult screen(std::span<const ScanWindow> windows, const DateSpan& range,
                              Stream stream, std::int64_t k) {
  if (k <= 0) throw std::invalid_argument("screen: k must be positive");
  ScreeningResult r;
  r.k = static_cast<std::size_t>(k);
  for (const auto& w : windows)
    if (w.stream == stream && range.contains(w.end_date)) r.ranked.push_back(w);
  const auto keep = std::min(r.ranked.size(), r.k);
  std::partial_sort(r.ranked.begin(), r.ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    r.ranked.end(), screening_order);
  r.ranked.resize(keep);
  return r;
}

struct YearlyBest {
  std::vector<ScanWindow> best;  // one per year that has windows, in year order
  std::vector<std::string> notes;
};

/// Most significant window per calendar year (by end date) for one location.
inline YearlyBest best_window_per_year(const std::string& location_id, Stream stream,
                                       std::span<const ScanWindow> windows,
                                       std::span<const int> years) {
  std::map<int, ScanWindow> best;
  for (const auto& w : windows) {
    if (w.location_id != location_id || w.stream != stream) continue;
    const int y = w.end_date.year();
    auto it = best.find(y);
    if (it == best.end())
      best.emplace(y, w);
    else if (screening_order(w, it->second))
      it->second = w;
  }
  YearlyBest out;
  std::vector<int> sorted(years.begin(), years.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int y : sorted) {
    auto it = best.find(y);
    if (it == best.end())
      out.notes.push_back("no valid windows for " + location_id + " in " + std::to_string(y));
    else
      out.best.push_back(it->second);
  }
  return out;
}

struct PlotRow {
  Date date;
  std::optional<std::int64_t> observed;  // trailing analysis-window sum
  std::optional<double> expected;        // from the window ending on this date
  bool highlight = false;

  friend bool operator==(const PlotRow&, const PlotRow&) = default;
};

/// Per-day plot series: trailing sum of `series`, expected count from the
/// matching scan window, and highlight flags within +/- radius days of each
/// highlighted end date.
inline std::vector<PlotRow> emit_plot_data(const std::string& location_id, Stream stream,
                                           std::span<const ScanWindow> windows,
                                           const DailyCountSeries& series,
                                           std::span<const Date> highlight_ends,
                                           std::int32_t analysis_days = 7,
                                           std::int32_t radius = kEventEnvelopeDays) {
  std::map<Date, double> expected;
  for (const auto& w : windows)
    if (w.location_id == location_id && w.stream == stream) expected.emplace(w.end_date, w.expected);
  std::vector<PlotRow> rows;
  rows.reserve(series.counts.size());
  std::int64_t running = 0;
  for (std::size_t i = 0; i < series.counts.size(); ++i) {
    running += series.counts[i];
    if (i >= static_cast<std::size_t>(analysis_days))
      running -= series.counts[i - static_cast<std::size_t>(analysis_days)];
    PlotRow row;
    row.date = series.start + static_cast<std::int32_t>(i);
    if (i + 1 >= static_cast<std::size_t>(analysis_days)) row.observed = running;
    if (auto it = expected.find(row.date); it != expected.end()) row.expected = it->second;
    for (Date h : highlight_ends)
      if (row.date >= h - radius && row.date <= h + radius) row.highlight = true;
    rows.push_back(row);
  }
  return rows;
}

// ---- file formats ---------------------------------------------------------

/// Events CSV with columns name,location,start,end. Errors name the row;
/// `lines`, when given, receives the line each event started on.
inline std::vector<EventSpec> read_events_csv(std::istream& in,
                                               std::vector<std::size_t>* lines = nullptr) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw std::runtime_error("events file is empty");
  const csv::Header h(row);
  const auto c_name = h.require("name"), c_loc = h.require("location"),
             c_start = h.require("start"), c_end = h.require("end");
  std::vector<EventSpec> out;
  while (reader.next(row)) {
    const auto where = "events file line " + std::to_string(reader.line()) + ": ";
    if (row.size() != h.names().size()) throw std::runtime_error(where + "wrong field count");
    const auto s = Date::parse(row[c_start]);
    const auto e = Date::parse(row[c_end]);
    if (!s) throw std::runtime_error(where + "invalid start date '" + row[c_start] + "'");
    if (!e) throw std::runtime_error(where + "invalid end date '" + row[c_end] + "'");
    if (*e < *s) throw std::runtime_error(where + "end precedes start");
    out.push_back({row[c_name], row[c_loc], *s, *e});
    if (lines) lines->push_back(reader.line());
  }
  return out;
}

inline std::string format_event_dates(const EventSpec& e) {
  return e.start_date == e.end_date ? e.start_date.str()
                                    : e.start_date.str() + " to " + e.end_date.str();
}

inline const std::vector<std::string>& event_report_columns() {
  static const std::vector<std::string> cols{
      "event",        "location",     "dates",          "ntt_end_date",
      "ntt_expected", "ntt_observed", "ntt_empirical_p", "all_end_date",
      "all_expected", "all_observed", "all_empirical_p", "note"};
  return cols;
}

/// Orders reports by significance of their new-to-town window; reports
/// without one go last. Stable.
inline void sort_by_ntt_significance(std::vector<EventReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const EventReport& x, const EventReport& y) {
    if (!x.ntt || !y.ntt) return x.ntt.has_value() && !y.ntt.has_value();
    return x.ntt->log_p < y.ntt->log_p;
  });
}

inline void write_event_report_csv(std::ostream& out, std::span<const EventReport> reports) {
  csv::write_row(out, event_report_columns());
  for (const auto& r : reports) {
    std::vector<std::string> row{r.event.name, r.event.location_id, format_event_dates(r.event)};
    for (Stream s : {Stream::NewToTown, Stream::All}) {
      const auto& w = r.best(s);
      if (w) {
        row.push_back(w->end_date.str());
        row.push_back(csv::format_double(w->expected));
        row.push_back(std::to_string(w->observed));
        row.push_back(w->empirical_p ? csv::format_double(*w->empirical_p) : std::string{});
      } else {
        row.insert(row.end(), 4, std::string{});
      }
    }
    std::string note;
    for (const auto& n : r.notes) note += note.empty() ? n : "; " + n;
    row.push_back(note);
    csv::write_row(out, row);
  }
}

inline void write_screen_csv(std::ostream& out, const ScreeningResult& result) {
  std::vector<std::string> header{"rank"};
  header.insert(header.end(), scan_csv_columns().begin(), scan_csv_columns().end());
  csv::write_row(out, header);
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    auto fields = scan_row_fields(result.ranked[i]);
    fields.insert(fields.begin(), std::to_string(i + 1));
    csv::write_row(out, fields);
  }
}

inline void write_plot_csv(std::ostream& out, std::span<const PlotRow> rows) {
  out << "date,observed_7d,expected,highlight\n";
  for (const auto& r : rows) {
    csv::write_row(out, {r.date.str(), r.observed ? std::to_string(*r.observed) : std::string{},
                         r.expected ? csv::format_double(*r.expected) : std::string{},
                         r.highlight ? "1" : "0"});
  }
}

}  // namespace adsurge
