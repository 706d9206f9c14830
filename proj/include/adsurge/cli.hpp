#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adsurge/classify.hpp"
#include "adsurge/events.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/io.hpp"
#include "adsurge/linkage.hpp"
#include "adsurge/phonex.hpp"
#include "adsurge/pipeline.hpp"
#include "adsurge/scan.hpp"
#include "adsurge/synth.hpp"

namespace adsurge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;   // unreadable input, schema violation, bad values
inline constexpr int kExitUsage = 2;  // unknown flag, missing argument

/// Error carrying structured detail for the JSON error summary.
struct DataError : std::runtime_error {
  nlohmann::json details;
  DataError(const std::string& what, nlohmann::json d = nlohmann::json::array())
      : std::runtime_error(what), details(std::move(d)) {}
};

/// One JSON object per line on the log stream.
class Logger {
 public:
  Logger(std::ostream& out, bool quiet) : out_(&out), quiet_(quiet) {}

  void info(const std::string& stage, nlohmann::json fields) {
    if (quiet_) return;
    fields["level"] = "info";
    fields["stage"] = stage;
    *out_ << fields.dump() << '\n';
  }

  void warn(const std::string& stage, const std::string& message) {
    if (quiet_) return;
    *out_ << nlohmann::json{{"level", "warn"}, {"stage", stage}, {"message", message}}.dump() << '\n';
  }

  /// Always written, even when quiet.
  void error(const std::string& stage, const std::string& category, const std::string& message,
             const nlohmann::json& details, int exit_code) {
    nlohmann::json j{{"level", "error"}, {"stage", stage},     {"category", category},
                     {"message", message}, {"exit_code", exit_code}};
    if (!details.empty()) j["details"] = details;
    *out_ << j.dump() << '\n';
  }

 private:
  std::ostream* out_;
  bool quiet_;
};

namespace detail {

struct Globals {
  std::optional<std::string> config_path;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

template <class T>
T pick(const std::optional<T>& flag, const T& fallback) {
  return flag ? *flag : fallback;
}

inline std::string require_path(const std::optional<std::string>& flag, const std::string& cfg,
                                const char* what) {
  auto v = pick(flag, cfg);
  if (v.empty()) throw DataError(std::string("missing ") + what);
  return v;
}

inline std::vector<AdRecord> load_checked(const std::string& path, std::optional<AdFormat> format,
                                          const std::string& region_map_path, bool skip_invalid,
                                          Logger& log, const std::string& stage) {
  RegionMap map;
  if (!region_map_path.empty()) map = load_region_map(region_map_path);
  const AdFormat fmt = format ? *format : guess_format(path);
  LoadResult r = [&] {
    if (path == "-") return load_ads(std::cin, fmt, map);
    return load_ads(std::filesystem::path(path), fmt, map);
  }();
  if (!r.errors.empty()) {
    nlohmann::json details = nlohmann::json::array();
    for (std::size_t i = 0; i < r.errors.size() && i < 20; ++i)
      details.push_back({{"line", r.errors[i].line}, {"reason", r.errors[i].reason}});
    if (!skip_invalid)
      throw DataError(std::to_string(r.errors.size()) + " invalid ad row(s) in '" + path +
                          "'; first at line " + std::to_string(r.errors.front().line) + ": " +
                          r.errors.front().reason,
                      details);
    for (const auto& e : details)
      log.warn(stage, "skipped line " + std::to_string(e["line"].get<std::size_t>()) + ": " +
                          e["reason"].get<std::string>());
  }
  log.info(stage, {{"event", "ads_read"}, {"path", path}, {"ads_read", r.records.size()},
                   {"rows_rejected", r.errors.size()}});
  return std::move(r.records);
}

inline PhoneExtractor make_extractor(const std::string& rules_path) {
  if (rules_path.empty()) return PhoneExtractor{};
  auto in = io::open_input(rules_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("rules file '" + rules_path + "': " + e.what());
  }
  return PhoneExtractor(j.get<ExtractorConfig>());
}

inline nlohmann::json shares_json(const ClassShares& s) {
  return {{"ads", s.total},           {"first_share", s.first},
          {"local_share", s.local},   {"new_to_town_share", s.new_to_town},
          {"unlinked_share", s.unlinked}, {"phone_coverage", s.phone_coverage}};
}

template <class Write>
void write_output(const std::string& path, Write&& write) {
  io::AtomicOutput out(path);
  write(out.stream());
  out.commit();
}

inline std::vector<ScanWindow> load_scan(const std::string& path) {
  if (path == "-") return read_scan_csv(std::cin);
  auto in = io::open_input(path);
  return read_scan_csv(in);
}

/// Labeled ads for scanning or plotting: a classify CSV is taken as is, ad
/// files go through extraction, linkage and classification first.
inline LabeledCorpus load_labeled(const std::string& path, const std::string& kind,
                                  std::optional<AdFormat> format, const std::string& region_map,
                                  const std::string& rules, bool skip_invalid, unsigned threads,
                                  Logger& log, const std::string& stage) {
  const bool classified =
      kind == "classified" || (kind == "auto" && !format && std::filesystem::path(path).extension() == ".csv");
  if (kind != "auto" && kind != "classified" && kind != "ads")
    throw DataError("unknown input kind '" + kind + "' (expected auto|classified|ads)");
  LabeledCorpus c;
  if (classified) {
    if (path == "-") {
      c = read_classify_csv(std::cin);
    } else {
      auto in = io::open_input(path);
      c = read_classify_csv(in);
    }
    log.info(stage, {{"event", "labels_read"}, {"path", path}, {"ads_read", c.ads.size()}});
    return c;
  }
  c.ads = load_checked(path, format, region_map, skip_invalid, log, stage);
  populate_phones(c.ads, make_extractor(rules), threads);
  const auto link = build_groups(c.ads);
  c.labels = classify_labels(c.ads, link, threads);
  log.info(stage, [&] {
    auto j = shares_json(measure_shares(c.labels));
    j["event"] = "classified";
    j["groups_formed"] = link.groups.size();
    return j;
  }());
  return c;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace detail

/// Runs one subcommand. Logs and the error summary go to `log_stream`.
inline int run(int argc, const char* const* argv, std::ostream& log_stream = std::cerr) {
  CLI::App app{"Detects localized surges in classified-ad activity.", "adsurge"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  detail::Globals g;
  app.add_option("--config", g.config_path, "JSON pipeline config; flags override its values");
  app.add_option("--threads", g.threads, "Worker thread cap for every stage (0: all cores)");
  app.add_option("--seed", g.seed, "Random seed (synth)");
  app.add_flag("--quiet", g.quiet, "Suppress info logs; errors are still reported");

  // Flags shared by several subcommands. Unset flags fall back to the config.
  std::optional<std::string> input, output, format, regions, rules;
  bool skip_invalid = false;
  auto add_io = [&](CLI::App* sub, const char* input_help) {
    sub->add_option("-i,--input", input, input_help);
    sub->add_option("-o,--output", output, "Output path ('-' for stdout)");
  };
  auto add_ads_opts = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Ad file format: jsonl|csv (default from extension)");
    sub->add_option("--regions", regions, "location,region CSV; ads at unmapped locations are rejected");
    sub->add_flag("--skip-invalid", skip_invalid, "Skip invalid ad rows instead of failing");
  };

  auto* extract = app.add_subcommand("extract-phones", "Fill each ad's phones from its text");
  add_io(extract, "Ads (JSONL or CSV)");
  add_ads_opts(extract);
  extract->add_option("--rules", rules, "Extractor config JSON (rules, digit words, separators)");

  auto* link = app.add_subcommand("link", "Group ads that share phone numbers; writes ad_id,group_id");
  add_io(link, "Ads with phones");
  add_ads_opts(link);

  std::optional<std::string> groups;
  auto* classify = app.add_subcommand("classify", "Label ads first/local/new_to_town/unlinked");
  add_io(classify, "Ads with phones");
  add_ads_opts(classify);
  classify->add_option("--groups", groups, "Link CSV from `link`; linkage is recomputed when absent");

  std::optional<std::string> stream_sel, pool, sidedness, input_kind;
  std::optional<std::int32_t> analysis_days, reference_days, stride_days;
  auto add_scan_shape = [&](CLI::App* sub) {
    sub->add_option("--analysis-days", analysis_days, "Analysis window length in days (default 7)");
    sub->add_option("--reference-days", reference_days, "Reference window length in days (default 91)");
  };
  auto* scan = app.add_subcommand("scan", "Sliding-window Fisher scan of every location");
  add_io(scan, "Classify CSV, or ads to extract, link and classify first");
  add_ads_opts(scan);
  scan->add_option("--input-kind", input_kind, "auto|classified|ads (auto: .csv means classified)");
  scan->add_option("--rules", rules, "Extractor config JSON, used when the input is ads");
  scan->add_option("--stream", stream_sel, "all|ntt|both (default both)");
  scan->add_option("--pool", pool, "Empirical p pool: per-location|global");
  add_scan_shape(scan);
  scan->add_option("--stride-days", stride_days, "Days between window end dates (default 1)");
  scan->add_option("--sidedness", sidedness, "greater|two-sided (default greater)");

  std::optional<std::string> scan_path, events_path;
  bool keep_order = false;
  auto* event = app.add_subcommand("event", "Best window per stream around each named event");
  event->add_option("--scan", scan_path, "Scan CSV")->required();
  event->add_option("--events", events_path, "Events CSV: name,location,start,end")->required();
  event->add_option("-o,--output", output, "Report CSV ('-' for stdout)");
  event->add_flag("--keep-order", keep_order, "Keep input order instead of sorting by new-to-town significance");
  add_scan_shape(event);

  std::optional<std::string> from, to;
  std::optional<std::int64_t> top;
  auto* screen = app.add_subcommand("screen", "Top-k most significant windows over a date range");
  screen->add_option("--scan", scan_path, "Scan CSV")->required();
  screen->add_option("--from", from, "First end date (YYYY-MM-DD; default earliest)");
  screen->add_option("--to", to, "Last end date (YYYY-MM-DD; default latest)");
  screen->add_option("--stream", stream_sel, "all|ntt (default ntt)");
  screen->add_option("--top", top, "Number of windows to return (default 10)");
  screen->add_option("-o,--output", output, "Ranked CSV ('-' for stdout)");

  std::optional<std::string> location;
  std::vector<std::string> highlights;
  auto* plot = app.add_subcommand("plot-data", "Per-day observed/expected series for one location");
  add_io(plot, "Classify CSV (or ads, as for scan) supplying daily counts");
  add_ads_opts(plot);
  plot->add_option("--input-kind", input_kind, "auto|classified|ads");
  plot->add_option("--scan", scan_path, "Scan CSV supplying expected counts")->required();
  plot->add_option("--location", location, "Location to plot")->required();
  plot->add_option("--stream", stream_sel, "all|ntt (default all)");
  plot->add_option("--highlight", highlights, "End date to highlight with a +/-7 day band (repeatable)");
  plot->add_option("--events", events_path, "Events CSV; highlights the best window of each event here");
  add_scan_shape(plot);

  std::optional<std::string> market_path, truth_path, regions_out;
  bool calibrate_first = false;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth_cmd->add_option("--market", market_path,
                        "Market JSON (MarketConfig keys plus optional \"injections\")");
  synth_cmd->add_option("-o,--output", output, "Corpus JSONL");
  synth_cmd->add_option("--truth", truth_path, "Ground-truth CSV (injections and trips)");
  synth_cmd->add_option("--regions-out", regions_out, "Also write the location,region map");
  synth_cmd->add_flag("--calibrate", calibrate_first,
                      "Tune churn, travel and phone fraction to 8% / 6.5% / 95% before generating");

  std::string stage = "cli";
  Logger log(log_stream, false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, std::cout, std::cerr);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, std::cout, std::cerr);
  } catch (const CLI::ParseError& e) {
    log.error(stage, "usage", e.what(), nlohmann::json::array(), kExitUsage);
    return kExitUsage;
  }
  stage = app.get_subcommands().front()->get_name();
  log = Logger(log_stream, g.quiet);

  try {
    PipelineConfig cfg;
    if (g.config_path) cfg = load_pipeline_config(*g.config_path);
    if (g.threads) cfg.threads = *g.threads;
    if (g.seed) cfg.seed = *g.seed;
    if (input) cfg.input = *input;
    if (output) cfg.output = *output;
    if (format) cfg.format = parse_ad_format(*format);
    if (regions) cfg.region_map = *regions;
    if (rules) cfg.rules = *rules;
    if (analysis_days) cfg.scan.analysis_days = *analysis_days;
    if (reference_days) cfg.scan.reference_days = *reference_days;
    if (stride_days) cfg.scan.stride_days = *stride_days;
    if (sidedness) cfg.scan.sidedness = parse_sidedness(*sidedness);
    if (pool) cfg.pool = parse_pool(*pool);
    cfg.check_paths();
    cfg.scan.validate();
    const unsigned threads = cfg.threads;
    const std::string out_path = cfg.output.empty() ? "-" : cfg.output;
    detail::Timer timer;

    if (stage == "extract-phones") {
      auto ads = detail::load_checked(detail::require_path(input, cfg.input, "--input"), cfg.format,
                                      cfg.region_map, skip_invalid, log, stage);
      const auto extractor = detail::make_extractor(cfg.rules);
      populate_phones(ads, extractor, threads);
      std::size_t with_phone = 0, phones = 0;
      for (const auto& a : ads) {
        with_phone += !a.phones.empty();
        phones += a.phones.size();
      }
      detail::write_output(out_path, [&](std::ostream& os) {
        for (const auto& a : ads) write_ad_jsonl(os, a);
      });
      log.info(stage, {{"event", "done"}, {"ads", ads.size()}, {"phones_extracted", phones},
                       {"ads_with_phone", with_phone},
                       {"phone_coverage", ads.empty() ? 0.0 : double(with_phone) / double(ads.size())},
                       {"seconds", timer.seconds()}});
    } else if (stage == "link") {
      const auto ads = detail::load_checked(detail::require_path(input, cfg.input, "--input"),
                                            cfg.format, cfg.region_map, skip_invalid, log, stage);
      const auto l = build_groups(ads);
      std::size_t largest = 0;
      for (const auto& grp : l.groups) largest = std::max(largest, grp.member_ad_ids.size());
      detail::write_output(out_path, [&](std::ostream& os) { write_link_csv(os, ads, l); });
      log.info(stage, {{"event", "done"}, {"ads", ads.size()}, {"groups_formed", l.groups.size()},
                       {"unlinked_ads", l.unlinked.size()}, {"largest_group", largest},
                       {"seconds", timer.seconds()}});
    } else if (stage == "classify") {
      const auto ads = detail::load_checked(detail::require_path(input, cfg.input, "--input"),
                                            cfg.format, cfg.region_map, skip_invalid, log, stage);
      Linkage l;
      if (groups) {
        auto in = io::open_input(*groups);
        l = read_link_csv(in, ads);
      } else {
        l = build_groups(ads);
      }
      const auto labeled = classify_stream(ads, l, threads);
      std::vector<ActivityClass> labels;
      labels.reserve(labeled.size());
      for (const auto& x : labeled) labels.push_back(x.activity_class);
      detail::write_output(out_path, [&](std::ostream& os) { write_classify_csv(os, ads, labeled); });
      auto j = detail::shares_json(measure_shares(labels));
      j["event"] = "done";
      j["groups_formed"] = l.groups.size();
      j["seconds"] = timer.seconds();
      log.info(stage, j);
    } else if (stage == "scan") {
      if (stream_sel) cfg.streams = parse_stream_selection(*stream_sel);
      const auto corpus = detail::load_labeled(detail::require_path(input, cfg.input, "--input"),
                                               input_kind.value_or("auto"), cfg.format,
                                               cfg.region_map, cfg.rules, skip_invalid, threads, log, stage);
      const auto windows = scan_dataset(corpus.ads, corpus.labels, cfg.streams, cfg.scan, cfg.pool, threads);
      std::size_t no_baseline = 0;
      std::map<std::string, std::size_t> per_stream;
      for (const auto& w : windows) {
        no_baseline += w.no_baseline();
        ++per_stream[std::string(to_string(w.stream))];
      }
      if (no_baseline) log.warn(stage, std::to_string(no_baseline) + " window(s) have no baseline (single-location region)");
      detail::write_output(out_path, [&](std::ostream& os) { write_scan_csv(os, windows); });
      log.info(stage, {{"event", "done"}, {"windows_emitted", windows.size()},
                       {"windows_by_stream", per_stream}, {"no_baseline_windows", no_baseline},
                       {"pool", to_string(cfg.pool)}, {"seconds", timer.seconds()}});
    } else if (stage == "event") {
      const auto windows = detail::load_scan(*scan_path);
      auto in = io::open_input(*events_path);
      std::vector<std::size_t> lines;
      const auto events = read_events_csv(in, &lines);
      const auto coverage = ScanCoverage::from_windows(windows, cfg.scan);
      std::vector<EventReport> reports;
      for (std::size_t i = 0; i < events.size(); ++i) {
        try {
          reports.push_back(analyze_event(events[i], windows, coverage));
        } catch (const std::invalid_argument& e) {
          throw DataError("events file line " + std::to_string(lines[i]) + ": " + e.what(),
                          nlohmann::json::array({{{"line", lines[i]}, {"event", events[i].name},
                                                  {"location", events[i].location_id}}}));
        }
      }
      if (!keep_order) sort_by_ntt_significance(reports);
      detail::write_output(out_path, [&](std::ostream& os) { write_event_report_csv(os, reports); });
      log.info(stage, {{"event", "done"}, {"events", reports.size()}, {"seconds", timer.seconds()}});
    } else if (stage == "screen") {
      const auto windows = detail::load_scan(*scan_path);
      if (windows.empty()) throw DataError("scan file has no windows");
      DateSpan range{windows.front().end_date, windows.front().end_date};
      for (const auto& w : windows) {
        range.first = std::min(range.first, w.end_date);
        range.last = std::max(range.last, w.end_date);
      }
      if (from) range.first = parse_date_or_throw(*from);
      if (to) range.last = parse_date_or_throw(*to);
      if (range.last < range.first) throw DataError("--to precedes --from");
      const Stream s = parse_stream(stream_sel.value_or("ntt"));
      const auto result = adsurge::screen(windows, range, s, top.value_or(10));
      detail::write_output(out_path, [&](std::ostream& os) { write_screen_csv(os, result); });
      log.info(stage, {{"event", "done"}, {"candidates", windows.size()},
                       {"returned", result.ranked.size()}, {"seconds", timer.seconds()}});
    } else if (stage == "plot-data") {
      const auto windows = detail::load_scan(*scan_path);
      const auto corpus = detail::load_labeled(detail::require_path(input, cfg.input, "--input"),
                                               input_kind.value_or("auto"), cfg.format,
                                               cfg.region_map, cfg.rules, skip_invalid, threads, log, stage);
      const Stream s = parse_stream(stream_sel.value_or("all"));
      std::optional<ClassFilter> filter;
      if (s == Stream::NewToTown) filter = ClassFilter{corpus.labels, ActivityClass::NewToTown};
      const auto series = daily_counts(corpus.ads, {ScopeKind::Location, *location}, filter);
      std::vector<Date> marks;
      for (const auto& h : highlights) marks.push_back(parse_date_or_throw(h));
      if (events_path) {
        auto in = io::open_input(*events_path);
        const auto coverage = ScanCoverage::from_windows(windows, cfg.scan);
        for (const auto& ev : read_events_csv(in)) {
          if (ev.location_id != *location) continue;
          const auto r = analyze_event(ev, windows, coverage);
          if (const auto& w = r.best(s)) marks.push_back(w->end_date);
        }
      }
      const auto rows = emit_plot_data(*location, s, windows, series, marks, cfg.scan.analysis_days);
      detail::write_output(out_path, [&](std::ostream& os) { write_plot_csv(os, rows); });
      log.info(stage, {{"event", "done"}, {"days", rows.size()}, {"highlights", marks.size()},
                       {"seconds", timer.seconds()}});
    } else if (stage == "synth") {
      synth::MarketConfig market = cfg.market.value_or(synth::MarketConfig::defaults());
      std::vector<synth::Injection> injections = cfg.injections;
      if (market_path) {
        auto in = io::open_input(*market_path);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw DataError("market file '" + *market_path + "': " + e.what());
        }
        if (j.contains("injections")) {
          injections = j.at("injections").get<std::vector<synth::Injection>>();
          j.erase("injections");
        }
        market = j.get<synth::MarketConfig>();
      }
      if (cfg.seed) market.seed = *cfg.seed;
      if (calibrate_first) {
        const auto cal = synth::calibrate({}, market);
        market = cal.config;
        auto j = detail::shares_json(cal.measured);
        j["event"] = "calibrated";
        j["iterations"] = cal.iterations;
        j["converged"] = cal.converged;
        j["churn_prob"] = market.churn_prob;
        j["travel_prob"] = market.travel_prob;
        j["phone_fraction"] = market.phone_fraction;
        log.info(stage, j);
      }
      const auto corpus = synth::generate(market, injections);
      detail::write_output(out_path, [&](std::ostream& os) {
        for (const auto& a : corpus.ads) write_ad_jsonl(os, a);
      });
      if (truth_path)
        detail::write_output(*truth_path, [&](std::ostream& os) { synth::write_truth_csv(os, corpus.truth); });
      if (regions_out)
        detail::write_output(*regions_out, [&](std::ostream& os) { write_region_map(os, corpus.regions); });
      std::size_t planted = 0;
      for (const auto& p : corpus.planted) planted += p.has_value();
      log.info(stage, {{"event", "done"}, {"ads", corpus.ads.size()}, {"ads_with_planted_phone", planted},
                       {"trips", corpus.truth.trips.size()}, {"injections", corpus.truth.injections.size()},
                       {"seed", market.seed}, {"seconds", timer.seconds()}});
    }
    return kExitOk;
  } catch (const DataError& e) {
    log.error(stage, "data", e.what(), e.details, kExitData);
  } catch (const nlohmann::json::exception& e) {
    log.error(stage, "schema", e.what(), nlohmann::json::array(), kExitData);
  } catch (const std::exception& e) {
    log.error(stage, "data", e.what(), nlohmann::json::array(), kExitData);
  }
  return kExitData;
}

}  // namespace adsurge::cli
