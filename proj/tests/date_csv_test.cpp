#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adsurge/csv.hpp"
#include "adsurge/date.hpp"
#include "adsurge/io.hpp"
#include "gen.hpp"

using adsurge::Date;

TEST(Date, ParsesAndPrintsIsoDates) {
  const auto d = Date::parse("2015-02-01");
  ASSERT_TRUE(d);
  EXPECT_EQ(d->str(), "2015-02-01");
  EXPECT_EQ(d->year(), 2015);
  EXPECT_EQ(d->weekday(), 0);  // a Sunday
  EXPECT_FALSE(Date::parse("2015-02-30"));
  EXPECT_FALSE(Date::parse("2015-2-01"));
  EXPECT_FALSE(Date::parse("2015-02-01x"));
  EXPECT_FALSE(Date::parse(""));
}

TEST(Date, ArithmeticRoundTripsOverManyYears) {
  const Date start = *Date::from_ymd(1999, 12, 25);
  for (int k = 0; k < 5000; k += 7) {
    const Date d = start + k;
    EXPECT_EQ(d - start, k);
    EXPECT_EQ(Date::parse(d.str()), d);
  }
  EXPECT_EQ((*Date::from_ymd(2016, 3, 1) - *Date::from_ymd(2016, 2, 28)), 2);  // leap year
}

TEST(DateSpan, ContainsAndIntersects) {
  const adsurge::DateSpan s{*Date::from_ymd(2015, 1, 1), *Date::from_ymd(2015, 1, 10)};
  EXPECT_EQ(s.length(), 10);
  EXPECT_TRUE(s.contains(*Date::from_ymd(2015, 1, 10)));
  EXPECT_FALSE(s.contains(*Date::from_ymd(2015, 1, 11)));
  EXPECT_TRUE(s.intersects({*Date::from_ymd(2015, 1, 10), *Date::from_ymd(2015, 2, 1)}));
  EXPECT_FALSE(s.intersects({*Date::from_ymd(2015, 1, 11), *Date::from_ymd(2015, 2, 1)}));
}

TEST(Csv, QuotedFieldsRoundTrip) {
  std::ostringstream out;
  const std::vector<std::string> row{"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
  adsurge::csv::write_row(out, row);
  adsurge::csv::write_row(out, {"second"});
  std::istringstream in(out.str());
  adsurge::csv::Reader reader(in);
  std::vector<std::string> got;
  ASSERT_TRUE(reader.next(got));
  EXPECT_EQ(got, row);
  EXPECT_EQ(reader.line(), 1u);
  ASSERT_TRUE(reader.next(got));
  EXPECT_EQ(got, std::vector<std::string>{"second"});
  EXPECT_EQ(reader.line(), 3u);
  EXPECT_FALSE(reader.next(got));
}

TEST(Csv, UnterminatedQuoteIsAnError) {
  std::istringstream in("\"open\n");
  adsurge::csv::Reader reader(in);
  std::vector<std::string> got;
  EXPECT_THROW(reader.next(got), std::runtime_error);
}

TEST(Csv, DoublesRoundTripExactly) {
  gen::Rng r(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(r) / (i + 1);
    EXPECT_EQ(adsurge::csv::parse_double(adsurge::csv::format_double(v)), v);
  }
  EXPECT_FALSE(adsurge::csv::parse_double("1.5x"));
  EXPECT_FALSE(adsurge::csv::parse_int("12 "));
}

TEST(AtomicOutput, AppearsOnlyAfterCommit) {
  const auto dir = std::filesystem::temp_directory_path() / "adsurge_atomic_test";
  std::filesystem::create_directories(dir);
  const auto target = dir / "out.txt";
  std::filesystem::remove(target);
  {
    adsurge::io::AtomicOutput out(target);
    out.stream() << "partial";
    EXPECT_FALSE(std::filesystem::exists(target));
  }
  EXPECT_FALSE(std::filesystem::exists(target));
  EXPECT_TRUE(std::filesystem::is_empty(dir));
  {
    adsurge::io::AtomicOutput out(target);
    out.stream() << "done";
    out.commit();
  }
  std::ifstream in(target);
  std::string s;
  in >> s;
  EXPECT_EQ(s, "done");
  std::filesystem::remove_all(dir);
}
