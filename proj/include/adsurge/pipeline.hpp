#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "adsurge/activity.hpp"
#include "adsurge/fisher.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/io.hpp"
#include "adsurge/scan.hpp"
#include "adsurge/synth.hpp"

namespace adsurge {

/// Settings shared by every CLI stage. Command-line flags override values
/// loaded from a config file.
struct PipelineConfig {
  std::string input;
  std::string output;
  std::optional<AdFormat> format;  // absent: guess from the input extension
  std::string region_map;          // location,region CSV; empty for none
  std::string rules;               // extractor config JSON; empty for built-in rules
  ScanConfig scan;
  std::vector<Stream> streams{Stream::All, Stream::NewToTown};
  EmpiricalPool pool = EmpiricalPool::PerLocation;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0: one per hardware thread
  std::optional<synth::MarketConfig> market;
  std::vector<synth::Injection> injections;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;

  /// Referenced input files must exist before any stage starts.
  void check_paths() const {
    for (const auto* p : {&input, &region_map, &rules})
      if (!p->empty() && *p != "-" && !std::filesystem::exists(*p))
        throw std::runtime_error("path '" + *p + "' does not exist");
  }
};

inline std::string to_string(AdFormat f) { return f == AdFormat::Csv ? "csv" : "jsonl"; }

inline AdFormat parse_ad_format(const std::string& s) {
  if (s == "csv") return AdFormat::Csv;
  if (s == "jsonl") return AdFormat::Jsonl;
  throw std::invalid_argument("unknown format '" + s + "' (expected jsonl|csv)");
}

inline std::vector<Stream> parse_stream_selection(const std::string& s) {
  if (s == "both") return {Stream::All, Stream::NewToTown};
  return {parse_stream(s)};
}

inline void to_json(nlohmann::json& j, const ScanConfig& c) {
  j = {{"analysis_days", c.analysis_days},
       {"reference_days", c.reference_days},
       {"stride_days", c.stride_days},
       {"sidedness", to_string(c.sidedness)}};
}

inline void from_json(const nlohmann::json& j, ScanConfig& c) {
  c = ScanConfig{};
  c.analysis_days = j.value("analysis_days", c.analysis_days);
  c.reference_days = j.value("reference_days", c.reference_days);
  c.stride_days = j.value("stride_days", c.stride_days);
  if (j.contains("sidedness")) c.sidedness = parse_sidedness(j.at("sidedness").get<std::string>());
}

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json::object();
  j["input"] = c.input;
  j["output"] = c.output;
  if (c.format) j["format"] = to_string(*c.format);
  j["region_map"] = c.region_map;
  j["rules"] = c.rules;
  j["scan"] = c.scan;
  auto streams = nlohmann::json::array();
  for (Stream s : c.streams) streams.push_back(std::string(to_string(s)));
  j["streams"] = streams;
  j["pool"] = to_string(c.pool);
  if (c.seed) j["seed"] = *c.seed;
  j["threads"] = c.threads;
  if (c.market) j["market"] = *c.market;
  if (!c.injections.empty()) j["injections"] = c.injections;
}

inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
  static const char* known[] = {"input",   "output", "format", "region_map", "rules",  "scan",
                                "streams", "pool",   "seed",   "threads",    "market", "injections"};
  for (const auto& [k, v] : j.items())
    if (std::find(std::begin(known), std::end(known), k) == std::end(known))
      throw std::invalid_argument("unknown config key '" + k + "'");
  c = PipelineConfig{};
  c.input = j.value("input", c.input);
  c.output = j.value("output", c.output);
  if (j.contains("format")) c.format = parse_ad_format(j.at("format").get<std::string>());
  c.region_map = j.value("region_map", c.region_map);
  c.rules = j.value("rules", c.rules);
  if (j.contains("scan")) c.scan = j.at("scan").get<ScanConfig>();
  if (j.contains("streams")) {
    c.streams.clear();
    for (const auto& s : j.at("streams")) c.streams.push_back(parse_stream(s.get<std::string>()));
  }
  if (j.contains("pool")) c.pool = parse_pool(j.at("pool").get<std::string>());
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.threads = j.value("threads", c.threads);
  if (j.contains("market")) c.market = j.at("market").get<synth::MarketConfig>();
  if (j.contains("injections")) c.injections = j.at("injections").get<std::vector<synth::Injection>>();
}

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config '" + path.string() + "': " + e.what());
  }
  return j.get<PipelineConfig>();
}

}  // namespace adsurge
