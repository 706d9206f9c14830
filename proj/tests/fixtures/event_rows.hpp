#pragma once

// Expected and observed counts of the 39 published event rows, both streams.

#include <array>
#include <cstdint>

namespace fixtures {

struct EventRow {
  const char* event;
  const char* location;
  const char* dates;
  std::int64_t ntt_expected, ntt_observed;
  const char* ntt_p;
  std::int64_t all_expected, all_observed;
  const char* all_p;
};

inline constexpr std::array<EventRow, 39> kEventRows{{
    {"Top screening result", "Vancouver, British Columbia", "2015-05-23", 24, 143, "6.3E-4", 1409, 1229, "8.4E-1"},
    {"2nd screening result", "Myrtle Beach, South Carolina", "2014-05-25", 15, 107, "6.7E-4", 395, 747, "1.8E-2"},
    {"2nd screening result", "Myrtle Beach, South Carolina", "2013-05-24", 37, 150, "7.9E-4", 386, 1252, "1.8E-3"},
    {"2nd screening result", "Myrtle Beach, South Carolina", "2015-05-27", 33, 105, "1.5E-3", 587, 999, "1.9E-2"},
    {"3rd screening result", "Charlotte, North Carolina", "2015-03-02", 51, 119, "2.1E-3", 1548, 1729, "2.7E-1"},
    {"Super Bowl XLIX", "Phoenix, Arizona", "2015-02-01", 124, 215, "3.5E-3", 2334, 2554, "3.1E-1"},
    {"Consumer Electronics Show (CES)", "Las Vegas, Nevada", "2015-01-06 to 2015-01-09", 48, 101, "5.5E-3", 3636, 3860, "3.9E-1"},
    {"Super Bowl 50", "San Jose, California", "2016-02-07", 106, 169, "6.8E-3", 624, 1111, "9.9E-3"},
    {"Super Bowl XLVII", "New Orleans, Louisiana", "2013-02-03", 61, 104, "1.6E-2", 325, 454, "1.4E-1"},
    {"3rd screening result", "Charlotte, North Carolina", "2013-03-04", 75, 118, "2.6E-2", 1387, 1454, "5.3E-1"},
    {"CosmoProf", "Las Vegas, Nevada", "2015-07-12 to 2015-07-14", 105, 156, "3.0E-2", 2213, 2589, "1.5E-1"},
    {"Kentucky Derby", "Louisville, Kentucky", "2013-05-04", 20, 43, "3.0E-2", 1103, 1147, "6.0E-1"},
    {"Dreamforce", "San Francisco, California", "2015-09-15 to 2015-09-18", 137, 183, "3.9E-2", 1030, 1490, "2.4E-2"},
    {"Kentucky Derby", "Louisville, Kentucky", "2014-05-03", 20, 41, "4.1E-2", 619, 759, "2.4E-1"},
    {"NAB", "Las Vegas, Nevada", "2015-04-11 to 2015-04-16", 45, 74, "4.4E-2", 2751, 2812, "6.1E-1"},
    {"Daytona 500", "Daytona, Florida", "2013-02-24", 12, 27, "4.7E-2", 90, 234, "3.0E-2"},
    {"Oracle OpenWorld Convention", "San Francisco, California", "2015-10-25 to 2015-10-29", 135, 179, "4.8E-2", 1029, 1592, "1.3E-2"},
    {"South by Southwest", "Austin, Texas", "2015-03-13 to 2015-03-22", 86, 120, "6.1E-2", 1578, 1725, "3.2E-1"},
    {"Daytona 500", "Daytona, Florida", "2014-02-23", 2, 8, "6.8E-2", 8, 74, "1.8E-2"},
    {"Oracle OpenWorld Convention", "San Francisco, California", "2014-09-28 to 2014-10-02", 141, 178, "1.0E-1", 1736, 2377, "2.0E-2"},
    {"South by Southwest", "Austin, Texas", "2014-03-07 to 2014-03-16", 61, 86, "1.1E-1", 429, 297, "9.6E-1"},
    {"Kentucky Derby", "Louisville, Kentucky", "2015-05-02", 31, 49, "1.2E-1", 1315, 1486, "2.9E-1"},
    {"Rock n Roll Marathon", "Phoenix, Arizona", "2015-01-16 to 2015-01-18", 86, 114, "1.3E-1", 2399, 2561, "4.0E-1"},
    {"Arizona State Fair", "Phoenix, Arizona", "2015-10-16 to 2015-11-08", 83, 112, "1.3E-1", 1344, 1878, "3.7E-2"},
    {"Sturgis Motorcycle Rally", "Rapid City, South Dakota", "2015-08-03 to 2015-08-09", 11, 22, "1.5E-1", 31, 90, "9.7E-2"},
    {"Indy 500", "Indianapolis, Indiana", "2015-05-24", 37, 54, "1.5E-1", 1957, 2323, "1.3E-1"},
    {"Formula One United States Grand Prix", "Austin, Texas", "2015-10-25", 40, 57, "1.6E-1", 1212, 1934, "7.9E-3"},
    {"Formula One United States Grand Prix", "Austin, Texas", "2013-11-17", 61, 81, "1.7E-1", 1522, 1669, "3.2E-1"},
    {"Consumer Electronics Show (CES)", "Las Vegas, Nevada", "2014-01-07 to 2014-01-10", 42, 61, "2.2E-1", 2896, 2957, "6.2E-1"},
    {"Daytona 500", "Daytona, Florida", "2015-02-22", 14, 23, "2.2E-1", 437, 495, "4.0E-1"},
    {"Pro Beauty Conference (ISSE)", "Long Beach, California", "2015-01-24 to 2015-01-26", 58, 74, "2.4E-1", 979, 1130, "2.2E-1"},
    {"Rose Bowl", "Los Angeles, California", "2014-01-06", 103, 125, "2.4E-1", 1470, 1552, "4.8E-1"},
    {"Indy 500", "Indianapolis, Indiana", "2014-05-25", 35, 47, "3.1E-1", 1111, 1181, "5.1E-1"},
    {"Super Bowl XLVIII", "Manhattan, New York", "2014-02-02", 84, 100, "3.4E-1", 1663, 2236, "3.0E-2"},
    {"Arizona International Auto Show", "Phoenix, Arizona", "2015-11-26 to 2015-11-29", 74, 89, "3.6E-1", 1250, 1622, "7.9E-2"},
    {"Formula One United States Grand Prix", "Austin, Texas", "2014-11-02", 51, 62, "3.8E-1", 1539, 1618, "4.9E-1"},
    {"South by Southwest", "Austin, Texas", "2013-03-08 to 2013-03-17", 38, 48, "4.0E-1", 299, 237, "8.3E-1"},
    {"Indy 500", "Indianapolis, Indiana", "2013-05-26", 23, 30, "4.8E-1", 289, 261, "7.9E-1"},
    {"Consumer Electronics Show (CES)", "Las Vegas, Nevada", "2013-01-08 to 2013-01-11", 59, 61, "7.2E-1", 2101, 2089, "7.2E-1"},
}};

}  // namespace fixtures
