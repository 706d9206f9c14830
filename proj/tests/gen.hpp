#pragma once

// Hand-rolled random generators shared by the property tests.

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "adsurge/date.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/phonex.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline int uniform(Rng& r, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); }
inline bool chance(Rng& r, double p) { return std::uniform_real_distribution<double>(0, 1)(r) < p; }

inline adsurge::PhoneKey phone(Rng& r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%d%09d", uniform(r, 2, 9), uniform(r, 0, 999'999'999));
  return *adsurge::PhoneKey::from_digits(buf);
}

struct CorpusShape {
  int ads = 500;
  int regions = 2;
  int locations_per_region = 3;
  int phones = 120;  // size of the shared phone pool
  int days = 60;
  double no_phone = 0.1;
  double second_phone = 0.15;
};

/// Ads sorted by nothing in particular; ids are unique. Phones come from a
/// small pool so groups span several ads, days and locations.
inline std::vector<adsurge::AdRecord> corpus(Rng& r, const CorpusShape& s) {
  const adsurge::Date start = *adsurge::Date::from_ymd(2015, 1, 1);
  std::vector<adsurge::PhoneKey> pool;
  for (int i = 0; i < s.phones; ++i) pool.push_back(phone(r));
  std::vector<adsurge::AdRecord> ads;
  for (int i = 0; i < s.ads; ++i) {
    adsurge::AdRecord a;
    a.ad_id = "a" + std::to_string(i);
    a.posted_date = start + uniform(r, 0, s.days - 1);
    const int reg = uniform(r, 0, s.regions - 1);
    a.region_id = "R" + std::to_string(reg);
    a.location_id = a.region_id + "L" + std::to_string(uniform(r, 0, s.locations_per_region - 1));
    if (!chance(r, s.no_phone)) {
      a.phones.push_back(pool[static_cast<std::size_t>(uniform(r, 0, s.phones - 1))]);
      if (chance(r, s.second_phone)) {
        const auto p2 = pool[static_cast<std::size_t>(uniform(r, 0, s.phones - 1))];
        if (p2 != a.phones[0]) a.phones.push_back(p2);
      }
      std::sort(a.phones.begin(), a.phones.end());
    }
    ads.push_back(std::move(a));
  }
  return ads;
}

inline const char* const kWords[] = {"hey", "new", "in", "town", "call", "text", "me", "now",
                                     "sweet", "for", "x", "a", "real", "pics", "no", "ok"};
inline const char* const kSpelled[] = {"zero", "one", "two",   "three", "four",
                                       "five", "six", "seven", "eight", "nine"};

/// A phone written with random separators and random spelled-out digits.
inline std::string obfuscated(Rng& r, const std::string& digits) {
  static const char* const seps[] = {"", " ", "-", ".", ") ", "  "};
  std::string out;
  if (chance(r, 0.15)) out += chance(r, 0.5) ? "1-" : "1 ";
  if (chance(r, 0.2)) out += "(";
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i == 3 || i == 6) out += seps[uniform(r, 0, 5)];
    const char d = digits[i];
    out += chance(r, 0.3) ? std::string(kSpelled[d - '0']) : std::string(1, d);
  }
  return out;
}

/// Filler words around phones; never a digit word, always word-bounded.
inline std::string ad_text(Rng& r, const std::vector<std::string>& phones) {
  std::string s = kWords[uniform(r, 0, 15)];
  for (const auto& p : phones) {
    const int n = uniform(r, 0, 4);
    for (int i = 0; i < n; ++i) s += std::string(" ") + kWords[uniform(r, 0, 15)];
    s += " " + p;
  }
  s += std::string(" ") + kWords[uniform(r, 0, 15)];
  return s;
}

/// Arbitrary bytes biased toward digits, separators and digit words.
inline std::string noise(Rng& r, int len) {
  static const char* const atoms[] = {"0", "1", "2", "5", "9", " ", "-", ".", "(", ")", "o", "O",
                                      "oh", "one", "two", "five", "nine", "zero", "x", "$", "/", "\n", "+"};
  std::string s;
  for (int i = 0; i < len; ++i) s += atoms[uniform(r, 0, 22)];
  return s;
}

}  // namespace gen
