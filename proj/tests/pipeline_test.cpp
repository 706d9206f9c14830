#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "adsurge/pipeline.hpp"

using namespace adsurge;

TEST(PipelineConfig, JsonRoundTripIsLossless) {
  PipelineConfig c;
  c.input = "ads.jsonl";
  c.output = "out.csv";
  c.format = AdFormat::Csv;
  c.region_map = "regions.csv";
  c.rules = "rules.json";
  c.scan = {14, 120, 2, Sidedness::TwoSided};
  c.streams = {Stream::NewToTown};
  c.pool = EmpiricalPool::Global;
  c.seed = 42;
  c.threads = 3;
  auto m = synth::MarketConfig::defaults();
  m.days = 100;
  c.market = m;
  c.injections = {{"r00-c0", *Date::from_ymd(2014, 2, 1), 7, 5, synth::InjectionMode::All}};
  const nlohmann::json j = c;
  EXPECT_EQ(j.get<PipelineConfig>(), c);
  EXPECT_EQ(nlohmann::json::parse(j.dump()).get<PipelineConfig>(), c);
  const PipelineConfig empty;
  EXPECT_EQ(nlohmann::json(empty).get<PipelineConfig>(), empty);
}

TEST(PipelineConfig, RejectsUnknownKeysAndValues) {
  EXPECT_THROW(nlohmann::json::parse(R"({"inptu": "x"})").get<PipelineConfig>(), std::invalid_argument);
  EXPECT_THROW(nlohmann::json::parse(R"({"pool": "regional"})").get<PipelineConfig>(), std::invalid_argument);
  EXPECT_THROW(nlohmann::json::parse(R"({"streams": ["some"]})").get<PipelineConfig>(), std::invalid_argument);
  EXPECT_THROW(nlohmann::json::parse(R"({"format": "xml"})").get<PipelineConfig>(), std::invalid_argument);
  EXPECT_THROW(nlohmann::json::parse(R"({"threads": "many"})").get<PipelineConfig>(), nlohmann::json::exception);
}

TEST(PipelineConfig, PartialScanKeepsDefaults) {
  const auto c = nlohmann::json::parse(R"({"scan": {"reference_days": 60}})").get<PipelineConfig>();
  EXPECT_EQ(c.scan.analysis_days, 7);
  EXPECT_EQ(c.scan.reference_days, 60);
  EXPECT_EQ(c.scan.sidedness, Sidedness::Greater);
  EXPECT_EQ(c.streams.size(), 2u);
}

TEST(PipelineConfig, PathsMustExist) {
  PipelineConfig c;
  c.input = "-";
  EXPECT_NO_THROW(c.check_paths());
  c.region_map = "/nonexistent/regions.csv";
  EXPECT_THROW(c.check_paths(), std::runtime_error);
  const auto dir = std::filesystem::temp_directory_path() / "adsurge_pipeline_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "cfg.json";
  std::ofstream(path) << R"({"input": "-", "pool": "global", "seed": 7})";
  const auto loaded = load_pipeline_config(path);
  EXPECT_EQ(loaded.pool, EmpiricalPool::Global);
  EXPECT_EQ(*loaded.seed, 7u);
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_pipeline_config(path), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(PipelineConfig, StreamSelection) {
  EXPECT_EQ(parse_stream_selection("both").size(), 2u);
  EXPECT_EQ(parse_stream_selection("ntt"), std::vector<Stream>{Stream::NewToTown});
  EXPECT_THROW(parse_stream_selection("none"), std::invalid_argument);
  EXPECT_EQ(parse_ad_format(to_string(AdFormat::Jsonl)), AdFormat::Jsonl);
}
