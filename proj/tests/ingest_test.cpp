#include <gtest/gtest.h>

#include <sstream>

#include "adsurge/classify.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/linkage.hpp"
#include "adsurge/synth.hpp"
#include "gen.hpp"
#include "oracles/classify_replay.hpp"

using namespace adsurge;

namespace {

LoadResult load_jsonl(const std::string& s, const RegionMap& map = {}) {
  std::istringstream in(s);
  return load_ads(in, AdFormat::Jsonl, map);
}

Date day(int y, unsigned m, unsigned d) { return *Date::from_ymd(y, m, d); }

AdRecord ad(std::string id, Date d, std::string loc, std::string reg) {
  AdRecord a;
  a.ad_id = std::move(id);
  a.posted_date = d;
  a.location_id = std::move(loc);
  a.region_id = std::move(reg);
  return a;
}

}  // namespace

TEST(LoadAds, ThreeLinesInFileOrder) {
  const auto r = load_jsonl(
      R"({"ad_id":"z","date":"2015-01-02","location":"phx","region":"AZ","text":"hi"})"
      "\n"
      R"({"ad_id":"a","date":"2015-01-01","location":"tus","region":"AZ","phones":["(412) 555-0142"]})"
      "\n"
      R"({"ad_id":"m","date":"2015-01-03","location":"phx","region":"AZ"})"
      "\n");
  ASSERT_TRUE(r.errors.empty());
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[0].ad_id, "z");
  EXPECT_EQ(r.records[1].ad_id, "a");
  EXPECT_EQ(r.records[2].ad_id, "m");
  EXPECT_EQ(r.records[0].text, "hi");
  EXPECT_FALSE(r.records[2].text);
  ASSERT_EQ(r.records[1].phones.size(), 1u);
  EXPECT_EQ(r.records[1].phones[0].digits(), "4125550142");
  EXPECT_EQ(r.region_map.size(), 2u);
}

TEST(LoadAds, InvalidDateIsReportedAndOtherRowsLoad) {
  const auto r = load_jsonl(
      R"({"ad_id":"1","date":"2015-01-01","location":"phx","region":"AZ"})"
      "\n"
      R"({"ad_id":"2","date":"2015-13-40","location":"phx","region":"AZ"})"
      "\n"
      R"({"ad_id":"3","date":"2015-01-03","location":"phx","region":"AZ"})"
      "\n");
  ASSERT_EQ(r.records.size(), 2u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].line, 2u);
  EXPECT_NE(r.errors[0].reason.find("invalid date"), std::string::npos);
}

TEST(LoadAds, ValidationErrorsCarryLineAndReason) {
  RegionMap map;
  map.add("phx", "AZ");
  const auto r = load_jsonl(
      R"({"ad_id":"1","date":"2015-01-01","location":"phx"})"
      "\n"
      R"({"ad_id":"2","date":"2015-01-01","location":"lv"})"
      "\n"
      R"({"ad_id":"1","date":"2015-01-01","location":"phx"})"
      "\n"
      R"({"ad_id":"4","date":"2015-01-01","location":"phx","region":"NV"})"
      "\n"
      R"(not json)"
      "\n"
      R"({"ad_id":"6","date":"2015-01-01","location":"phx","phones":["555-0142"]})"
      "\n"
      R"({"date":"2015-01-01","location":"phx"})"
      "\n",
      map);
  ASSERT_EQ(r.records.size(), 1u);
  ASSERT_EQ(r.errors.size(), 6u);
  const std::vector<std::pair<std::size_t, std::string>> want{{2, "unknown location 'lv'"},
                                                              {3, "duplicate ad_id"},
                                                              {4, "conflicts with region map"},
                                                              {5, "malformed row"},
                                                              {6, "invalid phone"},
                                                              {7, "missing ad_id"}};
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(r.errors[i].line, want[i].first);
    EXPECT_NE(r.errors[i].reason.find(want[i].second), std::string::npos) << r.errors[i].reason;
  }
}

TEST(LoadAds, RegionRequiredWithoutMap) {
  const auto r = load_jsonl(R"({"ad_id":"1","date":"2015-01-01","location":"phx"})"
                            "\n");
  EXPECT_TRUE(r.records.empty());
  ASSERT_EQ(r.errors.size(), 1u);
}

TEST(LoadAds, CsvWithSemicolonPhones) {
  std::istringstream in(
      "ad_id,date,location,region,text,phones\n"
      "a,2015-01-01,phx,AZ,\"hello, world\",412-555-0142;2125550199\n"
      "b,2015-01-02,phx,AZ,,\n"
      "c,2015-01-02,phx\n");
  const auto r = load_ads(in, AdFormat::Csv);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].text, "hello, world");
  EXPECT_EQ(r.records[0].phones.size(), 2u);
  EXPECT_FALSE(r.records[1].text);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].line, 4u);
}

TEST(LoadAds, JsonlRoundTripAndDeterminism) {
  gen::Rng r(3);
  auto ads = gen::corpus(r, {});
  for (auto& a : ads)
    if (gen::chance(r, 0.5)) a.text = "text with \"quotes\" and\nnewline " + a.ad_id;
  std::ostringstream out;
  for (const auto& a : ads) write_ad_jsonl(out, a);
  const auto once = load_jsonl(out.str());
  const auto twice = load_jsonl(out.str());
  ASSERT_TRUE(once.errors.empty());
  EXPECT_EQ(once.records, ads);
  EXPECT_EQ(once.records, twice.records);
}

TEST(RegionMap, ManyToOneAndConflicts) {
  RegionMap m;
  EXPECT_TRUE(m.add("phx", "AZ"));
  EXPECT_TRUE(m.add("tus", "AZ"));
  EXPECT_TRUE(m.add("phx", "AZ"));
  EXPECT_FALSE(m.add("phx", "NV"));
  EXPECT_EQ(m.locations_in("AZ"), (std::vector<std::string>{"phx", "tus"}));
  std::ostringstream out;
  write_region_map(out, m);
  std::istringstream in(out.str());
  EXPECT_EQ(load_region_map(in), m);
  std::istringstream bad("location,region\nphx,AZ\nphx,NV\n");
  EXPECT_THROW(load_region_map(bad), std::runtime_error);
}

TEST(PopulatePhones, UnionsTextAndSuppliedPhones) {
  std::vector<AdRecord> ads(2);
  ads[0].text = "call 412 555 0142";
  ads[0].phones = {*PhoneKey::from_digits("2125550199")};
  ads[1].text = "nothing here";
  populate_phones(ads, default_extractor(), 2);
  EXPECT_EQ(ads[0].phones, (std::vector<PhoneKey>{*PhoneKey::from_digits("2125550199"),
                                                   *PhoneKey::from_digits("4125550142")}));
  EXPECT_TRUE(ads[1].phones.empty());
}

TEST(DailyCounts, DirectTally) {
  const Date d = day(2015, 3, 1);
  std::vector<AdRecord> ads{ad("1", d, "A", "R"), ad("2", d, "A", "R"), ad("3", d, "A", "R"),
                            ad("4", d + 2, "A", "R")};
  const auto s = daily_counts(ads, {ScopeKind::Location, "A"});
  EXPECT_EQ(s.start, d);
  EXPECT_EQ(s.counts, (std::vector<std::int64_t>{3, 0, 1}));
  EXPECT_EQ(s.sum(d, d + 2), 4);
}

TEST(DailyCounts, EmptyInputIsFlagged) {
  const auto s = daily_counts({}, {ScopeKind::Location, "A"});
  EXPECT_TRUE(s.empty());
  EXPECT_TRUE(s.empty_input);
}

TEST(DailyCounts, SpanIsTheWholeDataset) {
  const Date d = day(2015, 3, 1);
  std::vector<AdRecord> ads{ad("1", d, "A", "R"), ad("2", d + 9, "B", "R")};
  const auto s = daily_counts(ads, {ScopeKind::Location, "A"});
  EXPECT_EQ(s.counts.size(), 10u);
  EXPECT_EQ(s.counts[0], 1);
  EXPECT_EQ(s.counts[9], 0);
}

TEST(DailyCounts, RegionIsSumOfItsLocationsAndFiltersOnlyRemove) {
  gen::Rng r(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ads = gen::corpus(r, {.ads = 800, .regions = 3, .locations_per_region = 4});
    const auto labels = classify_labels(ads, build_groups(ads));
    const auto table = count_all(ads);
    const auto ntt = count_all(ads, ClassFilter{labels, ActivityClass::NewToTown});
    for (const auto& [reg, series] : table.by_region) {
      std::vector<std::int64_t> sum(series.counts.size(), 0);
      for (const auto& [loc, ls] : table.by_location)
        if (table.region_of.at(loc) == reg)
          for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += ls.counts[i];
      EXPECT_EQ(sum, series.counts);
      EXPECT_EQ(daily_counts(ads, {ScopeKind::Region, reg}), series);
    }
    for (const auto& [loc, ls] : table.by_location) {
      const auto& f = ntt.by_location.at(loc);
      for (std::size_t i = 0; i < ls.counts.size(); ++i) EXPECT_LE(f.counts[i], ls.counts[i]);
    }
  }
}

TEST(DailyCounts, NewToTownFilterMatchesLinearRecount) {
  gen::Rng r(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ads = gen::corpus(r, {.ads = 1500, .phones = 200, .days = 90});
    const auto truth = oracle::classify(ads);
    const auto labels = classify_labels(ads, build_groups(ads));
    const auto span = dataset_span(ads);
    for (const std::string loc : {"R0L0", "R1L2"}) {
      const auto s = daily_counts(ads, {ScopeKind::Location, loc}, ClassFilter{labels, ActivityClass::NewToTown});
      for (Date d = span.first; d <= span.last; ++d) {
        std::int64_t n = 0;
        for (std::size_t i = 0; i < ads.size(); ++i)
          n += ads[i].location_id == loc && ads[i].posted_date == d && truth[i] == ActivityClass::NewToTown;
        EXPECT_EQ(s.at(d), n);
      }
    }
  }
}

TEST(LoadAds, MillionRowSyntheticFileLoadsCompletely) {
  const auto corpus = synth::generate(synth::MarketConfig::defaults());
  ASSERT_GE(corpus.ads.size(), 1'000'000u);
  std::stringstream buf;
  for (const auto& a : corpus.ads) write_ad_jsonl(buf, a);
  const auto r = load_ads(buf, AdFormat::Jsonl);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.records.size(), corpus.ads.size());
  EXPECT_EQ(r.records.front(), corpus.ads.front());
  EXPECT_EQ(r.records.back(), corpus.ads.back());
}
