#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "adsurge/classify.hpp"
#include "adsurge/csv.hpp"
#include "adsurge/date.hpp"
#include "adsurge/ingest.hpp"
#include "adsurge/linkage.hpp"
#include "adsurge/phonex.hpp"

namespace adsurge::synth {

// Span before a new-to-town-only injection used to estimate the rate it scales.
inline constexpr std::int32_t kReferenceSpanDays = 91;

struct LocationSpec {
  std::string id;
  double weight = 1;  // share of the advertiser population homed here
};

struct RegionSpec {
  std::string id;
  std::vector<LocationSpec> locations;
};

/// Parameters of the simulated advertising market. Advertisers are homed at
/// locations in proportion to location weight, post a Poisson number of ads
/// per day, swap phones ("burner" churn) at week boundaries and take short
/// trips to other locations.
struct MarketConfig {
  std::vector<RegionSpec> regions;
  Date start_date = *Date::from_ymd(2014, 1, 1);
  std::int32_t days = 730;
  std::int64_t advertisers = 1920;
  double ads_per_week_mean = 5.0;
  double ads_per_week_shape = 2.0;  // gamma shape across advertisers; <= 0 means constant
  double churn_prob = 0.2347;       // per advertiser-week: replace phone
  double travel_prob = 0.3208;      // per advertiser-week: start a trip
  std::int32_t trip_min_days = 2;
  std::int32_t trip_max_days = 6;
  double phone_fraction = 0.95;  // share of ads whose text carries the phone
  std::array<double, 7> weekday_multipliers{1.0, 0.9, 0.95, 1.0, 1.0, 1.1, 1.15};  // Sun..Sat
  bool cross_region_travel = false;
  std::uint64_t seed = 20151231;

  /// n_regions x locations_per_region grid with weights cycling 3,2,1.5,1,0.5.
  static std::vector<RegionSpec> grid(int n_regions, int locations_per_region) {
    static constexpr double weights[] = {3.0, 2.0, 1.5, 1.0, 0.5};
    std::vector<RegionSpec> out;
    for (int r = 0; r < n_regions; ++r) {
      char rid[16];
      std::snprintf(rid, sizeof rid, "r%02d", r);
      RegionSpec reg{rid, {}};
      for (int l = 0; l < locations_per_region; ++l) {
        char lid[24];
        std::snprintf(lid, sizeof lid, "r%02d-c%d", r, l);
        reg.locations.push_back({lid, weights[l % 5]});
      }
      out.push_back(std::move(reg));
    }
    return out;
  }

  /// 50 locations over two years, roughly one million ads. Churn and travel
  /// were tuned with calibrate() toward 6.5% first-appearance and 8%
  /// new-to-town shares at 95% phone coverage.
  static MarketConfig defaults() {
    MarketConfig c;
    c.regions = grid(10, 5);
    return c;
  }

  void validate() const {
    auto prob = [](double p, const char* name) {
      if (!(p >= 0 && p <= 1)) throw std::invalid_argument(std::string(name) + " must be in [0,1]");
    };
    prob(churn_prob, "churn_prob");
    prob(travel_prob, "travel_prob");
    prob(phone_fraction, "phone_fraction");
    if (days < 0) throw std::invalid_argument("days must be >= 0");
    if (advertisers < 0) throw std::invalid_argument("advertisers must be >= 0");
    if (!(ads_per_week_mean >= 0)) throw std::invalid_argument("ads_per_week_mean must be >= 0");
    if (trip_min_days < 1 || trip_max_days < trip_min_days)
      throw std::invalid_argument("trip length bounds invalid");
    for (double m : weekday_multipliers)
      if (!(m >= 0)) throw std::invalid_argument("weekday multipliers must be >= 0");
    std::unordered_set<std::string> seen;
    for (const auto& r : regions)
      for (const auto& l : r.locations) {
        if (!(l.weight >= 0)) throw std::invalid_argument("location weight must be >= 0");
        if (!seen.insert(l.id).second) throw std::invalid_argument("duplicate location '" + l.id + "'");
      }
    if (advertisers > 0 && seen.empty()) throw std::invalid_argument("no locations configured");
  }

  friend bool operator==(const MarketConfig& a, const MarketConfig& b) {
    auto regions_eq = [&] {
      if (a.regions.size() != b.regions.size()) return false;
      for (std::size_t i = 0; i < a.regions.size(); ++i) {
        const auto &x = a.regions[i], &y = b.regions[i];
        if (x.id != y.id || x.locations.size() != y.locations.size()) return false;
        for (std::size_t j = 0; j < x.locations.size(); ++j)
          if (x.locations[j].id != y.locations[j].id || x.locations[j].weight != y.locations[j].weight)
            return false;
      }
      return true;
    };
    return regions_eq() && a.start_date == b.start_date && a.days == b.days &&
           a.advertisers == b.advertisers && a.ads_per_week_mean == b.ads_per_week_mean &&
           a.ads_per_week_shape == b.ads_per_week_shape && a.churn_prob == b.churn_prob &&
           a.travel_prob == b.travel_prob && a.trip_min_days == b.trip_min_days &&
           a.trip_max_days == b.trip_max_days && a.phone_fraction == b.phone_fraction &&
           a.weekday_multipliers == b.weekday_multipliers &&
           a.cross_region_travel == b.cross_region_travel && a.seed == b.seed;
  }
};

enum class InjectionMode { All, NewToTownOnly };

inline std::string to_string(InjectionMode m) {
  return m == InjectionMode::All ? "all" : "new-to-town-only";
}

inline InjectionMode parse_injection_mode(const std::string& s) {
  if (s == "all") return InjectionMode::All;
  if (s == "new-to-town-only" || s == "ntt") return InjectionMode::NewToTownOnly;
  throw std::invalid_argument("unknown injection mode '" + s + "'");
}

/// A surge planted at one location. All mode multiplies the posting rate of
/// everyone there; new-to-town-only mode adds visiting advertisers so the
/// new-to-town count in the window is multiplied.
struct Injection {
  std::string location_id;
  Date start_date;
  std::int32_t duration_days = 7;
  double multiplier = 5;
  InjectionMode mode = InjectionMode::NewToTownOnly;

  [[nodiscard]] Date end_date() const { return start_date + (duration_days - 1); }
  friend bool operator==(const Injection&, const Injection&) = default;
};

struct Trip {
  std::string advertiser;
  std::string from_location;
  std::string to_location;
  Date start;
  Date end;  // return date
};

struct InjectionOutcome {
  Injection injection;
  std::int64_t extra_ads = 0;
  std::int64_t baseline_ntt = 0;  // new-to-town-only mode: window count before visitors
  double expected_ntt = 0;        // new-to-town-only mode: rate the multiplier applies to
};

struct GroundTruth {
  std::vector<InjectionOutcome> injections;
  std::vector<Trip> trips;
};

struct Corpus {
  std::vector<AdRecord> ads;  // sorted by date; phones left for extraction
  std::vector<std::optional<PhoneKey>> planted;  // per ad: phone written into its text
  GroundTruth truth;
  RegionMap regions;
};

namespace detail {

inline constexpr const char* kFiller[] = {
    "new",     "sweet",  "available", "in",      "town",     "upscale", "discreet",
    "visiting", "today", "friendly",  "classy",  "fun",      "relaxing", "incall",
    "outcall", "hey",    "gentlemen", "ask",     "for",      "details", "real",
    "pics",    "private", "safe",     "clean",   "special",  "weekend", "sexy"};

inline constexpr const char* kDigitWords[] = {"zero", "one", "two",   "three", "four",
                                              "five", "six", "seven", "eight", "nine"};

/// Writes a 10-digit key in one of several human formats, some obfuscated.
template <class Rng>
std::string render_phone(const PhoneKey& key, Rng& rng) {
  const std::string d = key.digits();
  const std::string a = d.substr(0, 3), e = d.substr(3, 3), l = d.substr(6, 4);
  std::uniform_int_distribution<int> pick(0, 9);
  switch (pick(rng)) {
    case 0: return d;
    case 1: return a + "-" + e + "-" + l;
    case 2: return "(" + a + ") " + e + "-" + l;
    case 3: return a + "." + e + "." + l;
    case 4: return a + " " + e + " " + l;
    case 5: return "1-" + a + "-" + e + "-" + l;
    case 6: return "+1 " + a + " " + e + " " + l;
    default: {
      // Spell out a few digits. A zero flanked by plain digits may become a
      // lone letter o instead.
      std::string out;
      std::bernoulli_distribution spell(0.35);
      const std::string groups[] = {a, e, l};
      for (int g = 0; g < 3; ++g) {
        if (g) out += '-';
        const std::string& grp = groups[g];
        std::vector<bool> spelled(grp.size());
        for (std::size_t i = 0; i < grp.size(); ++i) spelled[i] = spell(rng);
        for (std::size_t i = 0; i < grp.size(); ++i) {
          const char ch = grp[i];
          if (!spelled[i]) {
            out += ch;
            continue;
          }
          const bool flanked = i > 0 && i + 1 < grp.size() && !spelled[i - 1] && !spelled[i + 1];
          out += (ch == '0' && flanked) ? std::string("O") : std::string(kDigitWords[ch - '0']);
        }
      }
      return out;
    }
  }
}

template <class Rng>
std::string render_text(const std::optional<PhoneKey>& phone, Rng& rng) {
  std::uniform_int_distribution<std::size_t> word(0, std::size(kFiller) - 1);
  std::uniform_int_distribution<int> count(3, 8);
  std::uniform_int_distribution<int> age(19, 35);
  std::string s;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kFiller[word(rng)];
  }
  s += " age " + std::to_string(age(rng));
  if (phone) s += ". call " + render_phone(*phone, rng) + " now";
  s += " 24/7";
  return s;
}

struct Advertiser {
  std::size_t home;
  std::size_t at;
  std::int32_t trip_end = -1;  // day index of return; -1 when home
  double daily_rate;
  PhoneKey phone;
};

struct Location {
  std::string id;
  std::size_t region;
};

struct Draft {
  std::int32_t day;
  std::size_t location;
  std::size_t advertiser;
  std::optional<PhoneKey> phone;
  std::string text;
};

template <class Rng>
PhoneKey fresh_phone(Rng& rng, std::unordered_set<std::uint64_t>& used) {
  std::uniform_int_distribution<std::uint64_t> area(200, 999), rest(0, 9'999'999);
  while (true) {
    const std::uint64_t v = area(rng) * 10'000'000ULL + rest(rng);
    if (!used.insert(v).second) continue;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%010llu", static_cast<unsigned long long>(v));
    return *PhoneKey::from_digits(buf);
  }
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

inline std::string advertiser_name(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "adv%06zu", i);
  return buf;
}

/// Simulates the market. Fixed seed gives identical output. Injections draw
/// from their own random streams, so the corpus without them is a subset
/// of the corpus with them.
inline Corpus generate(const MarketConfig& config, std::span<const Injection> injections = {}) {
  config.validate();
  Corpus out;
  std::vector<detail::Location> locs;
  std::vector<std::vector<std::size_t>> region_locs;
  std::unordered_map<std::string, std::size_t> loc_index;
  std::vector<double> weights;
  for (std::size_t r = 0; r < config.regions.size(); ++r) {
    region_locs.emplace_back();
    for (const auto& l : config.regions[r].locations) {
      loc_index.emplace(l.id, locs.size());
      region_locs[r].push_back(locs.size());
      locs.push_back({l.id, r});
      weights.push_back(l.weight);
      out.regions.add(l.id, config.regions[r].id);
    }
  }
  const Date last_day = config.start_date + (config.days - 1);
  for (const auto& inj : injections) {
    if (!loc_index.count(inj.location_id))
      throw std::invalid_argument("injection at unknown location '" + inj.location_id + "'");
    if (inj.duration_days < 1) throw std::invalid_argument("injection duration must be >= 1");
    if (!(inj.multiplier > 1)) throw std::invalid_argument("injection multiplier must be > 1");
    if (inj.start_date < config.start_date || inj.end_date() > last_day)
      throw std::invalid_argument("injection window " + inj.start_date.str() + ".." +
                                  inj.end_date().str() + " lies outside the corpus span");
  }
  if (config.advertisers == 0 || config.days == 0) {
    for (const auto& inj : injections) out.truth.injections.push_back({inj, 0, 0, 0});
    return out;
  }

  std::mt19937_64 rng(config.seed);
  std::unordered_set<std::uint64_t> used_phones;

  // Home assignment by cumulative weight keeps location sizes deterministic.
  std::vector<detail::Advertiser> advs;
  advs.reserve(static_cast<std::size_t>(config.advertisers));
  {
    double total_w = 0;
    for (double w : weights) total_w += w;
    std::vector<std::size_t> home_of;
    double acc = 0;
    std::size_t assigned = 0;
    for (std::size_t l = 0; l < locs.size(); ++l) {
      acc += total_w > 0 ? weights[l] / total_w : 1.0 / static_cast<double>(locs.size());
      const auto upto = static_cast<std::size_t>(std::llround(acc * static_cast<double>(config.advertisers)));
      for (; assigned < upto && assigned < static_cast<std::size_t>(config.advertisers); ++assigned)
        home_of.push_back(l);
    }
    while (home_of.size() < static_cast<std::size_t>(config.advertisers)) home_of.push_back(locs.size() - 1);
    for (std::size_t i = 0; i < home_of.size(); ++i) {
      double weekly = config.ads_per_week_mean;
      if (config.ads_per_week_shape > 0 && weekly > 0) {
        std::gamma_distribution<double> g(config.ads_per_week_shape,
                                          config.ads_per_week_mean / config.ads_per_week_shape);
        weekly = g(rng);
      }
      advs.push_back({home_of[i], home_of[i], -1, weekly / 7.0, detail::fresh_phone(rng, used_phones)});
    }
  }

  std::vector<std::mt19937_64> inj_rng;
  for (std::size_t k = 0; k < injections.size(); ++k)
    inj_rng.emplace_back(detail::mix_seed(config.seed, k));
  std::vector<std::int64_t> extra(injections.size(), 0);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int32_t> trip_len(config.trip_min_days, config.trip_max_days);
  const double daily_travel = config.travel_prob / 7.0;

  std::vector<detail::Draft> drafts;
  // phone -> (day, location) of phone-bearing ads, in day order
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::int32_t, std::size_t>>> phone_history;
  // advertiser -> (first day held, phone)
  std::vector<std::vector<std::pair<std::int32_t, PhoneKey>>> phone_timeline(advs.size());
  for (std::size_t i = 0; i < advs.size(); ++i) phone_timeline[i].push_back({0, advs[i].phone});

  auto emit = [&](std::int32_t day, std::size_t a, std::size_t loc, bool with_phone, auto& r) {
    std::optional<PhoneKey> phone;
    if (with_phone) phone = advs[a].phone;
    drafts.push_back({day, loc, a, phone, detail::render_text(phone, r)});
    if (phone) phone_history[phone->value()].push_back({day, loc});
  };

  for (std::int32_t day = 0; day < config.days; ++day) {
    const Date date = config.start_date + day;
    const double season = config.weekday_multipliers[date.weekday()];
    for (std::size_t a = 0; a < advs.size(); ++a) {
      auto& adv = advs[a];
      if (day > 0 && day % 7 == 0 && unit(rng) < config.churn_prob) {
        adv.phone = detail::fresh_phone(rng, used_phones);
        phone_timeline[a].push_back({day, adv.phone});
      }
      if (adv.trip_end >= 0 && day >= adv.trip_end) {
        adv.at = adv.home;
        adv.trip_end = -1;
      }
      if (adv.trip_end < 0 && unit(rng) < daily_travel) {
        const auto& pool = config.cross_region_travel ? std::vector<std::size_t>{} : region_locs[locs[adv.home].region];
        std::size_t dest = adv.home;
        if (config.cross_region_travel) {
          if (locs.size() > 1) {
            std::uniform_int_distribution<std::size_t> pick(0, locs.size() - 2);
            dest = pick(rng);
            if (dest >= adv.home) ++dest;
          }
        } else if (pool.size() > 1) {
          std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 2);
          std::size_t k = pick(rng);
          const auto home_pos = static_cast<std::size_t>(
              std::find(pool.begin(), pool.end(), adv.home) - pool.begin());
          if (k >= home_pos) ++k;
          dest = pool[k];
        }
        if (dest != adv.home) {
          const std::int32_t len = trip_len(rng);
          adv.at = dest;
          adv.trip_end = day + len;
          out.truth.trips.push_back({advertiser_name(a), locs[adv.home].id, locs[dest].id, date,
                                     date + len});
        }
      }
      const double lambda = adv.daily_rate * season;
      if (lambda <= 0) continue;
      std::poisson_distribution<int> posts(lambda);
      const int n = posts(rng);
      for (int k = 0; k < n; ++k) emit(day, a, adv.at, unit(rng) < config.phone_fraction, rng);
      for (std::size_t j = 0; j < injections.size(); ++j) {
        const auto& inj = injections[j];
        if (inj.mode != InjectionMode::All || loc_index.at(inj.location_id) != adv.at) continue;
        if (date < inj.start_date || date > inj.end_date()) continue;
        std::poisson_distribution<int> more(lambda * (inj.multiplier - 1));
        const int m = more(inj_rng[j]);
        for (int k = 0; k < m; ++k) emit(day, a, adv.at, unit(inj_rng[j]) < config.phone_fraction, inj_rng[j]);
        extra[j] += m;
      }
    }
  }

  auto to_records = [&](std::vector<detail::Draft>& ds) {
    std::stable_sort(ds.begin(), ds.end(),
                     [](const detail::Draft& x, const detail::Draft& y) { return x.day < y.day; });
    std::vector<AdRecord> recs;
    recs.reserve(ds.size());
    char id[24];
    for (std::size_t i = 0; i < ds.size(); ++i) {
      std::snprintf(id, sizeof id, "ad%08zu", i);
      AdRecord r;
      r.ad_id = id;
      r.posted_date = config.start_date + ds[i].day;
      r.location_id = locs[ds[i].location].id;
      r.region_id = config.regions[locs[ds[i].location].region].id;
      r.text = ds[i].text;
      if (ds[i].phone) r.phones = {*ds[i].phone};
      recs.push_back(std::move(r));
    }
    return recs;
  };

  std::vector<std::int64_t> baseline(injections.size(), 0);
  std::vector<double> expected(injections.size(), 0.0);
  for (std::size_t j = 0; j < injections.size(); ++j) {
    const auto& inj = injections[j];
    if (inj.mode != InjectionMode::NewToTownOnly) continue;
    const std::size_t target = loc_index.at(inj.location_id);
    const auto recs = to_records(drafts);
    const auto link = build_groups(recs);
    const auto labels = classify_labels(recs, link);
    // The multiplier scales the location's new-to-town rate, estimated from
    // the span before the window; a single week's count is too noisy.
    const std::int32_t ref_days = std::min<std::int32_t>(kReferenceSpanDays, inj.start_date - config.start_date);
    const Date ref_start = inj.start_date - ref_days;
    std::int64_t before = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (labels[i] != ActivityClass::NewToTown || recs[i].location_id != inj.location_id) continue;
      if (recs[i].posted_date >= inj.start_date && recs[i].posted_date <= inj.end_date()) ++baseline[j];
      if (recs[i].posted_date >= ref_start && recs[i].posted_date < inj.start_date) ++before;
    }
    expected[j] = ref_days > 0 && before > 0
                      ? static_cast<double>(before) * inj.duration_days / ref_days
                      : static_cast<double>(baseline[j]);

    auto& r = inj_rng[j];
    std::poisson_distribution<std::int64_t> visitors(std::max(expected[j] * (inj.multiplier - 1), 1e-9));
    const std::int64_t want = expected[j] > 0 ? visitors(r) : 0;
    std::vector<std::size_t> candidates;
    for (std::size_t a = 0; a < advs.size(); ++a) {
      if (advs[a].home == target) continue;
      if (!config.cross_region_travel && locs[advs[a].home].region != locs[target].region) continue;
      candidates.push_back(a);
    }
    std::unordered_set<std::size_t> used;
    std::uniform_int_distribution<std::int32_t> pick_day(inj.start_date - config.start_date,
                                                         inj.end_date() - config.start_date);
    auto phone_on = [&](std::size_t a, std::int32_t day) {
      const auto& tl = phone_timeline[a];
      auto it = std::upper_bound(tl.begin(), tl.end(), day,
                                 [](std::int32_t d, const auto& e) { return d < e.first; });
      return std::prev(it)->second;
    };
    // Label of an ad at (day, loc) given the phone's history; mirrors classify.
    auto label_in = [](const std::vector<std::pair<std::int32_t, std::size_t>>& hist, std::int32_t day,
                       std::size_t loc) {
      std::int32_t latest = -1;
      for (const auto& [d, l] : hist) {
        if (d >= day) continue;
        latest = std::max(latest, d);
        if (l == loc && d >= day - kLocalLookbackDays) return ActivityClass::Local;
      }
      if (latest < 0) return ActivityClass::First;
      for (const auto& [d, l] : hist)
        if (d == latest && l == loc) return ActivityClass::Local;
      return ActivityClass::NewToTown;
    };
    // A visit must be new-to-town and must not relabel any of the phone's
    // existing ads, so the only change is one more new-to-town ad at the target.
    auto qualifies = [&](const PhoneKey& p, std::int32_t day) {
      auto it = phone_history.find(p.value());
      if (it == phone_history.end()) return false;
      const auto& hist = it->second;
      if (label_in(hist, day, target) != ActivityClass::NewToTown) return false;
      auto with = hist;
      with.emplace_back(day, target);
      std::int32_t next = -1;
      for (const auto& [d, l] : hist)
        if (d > day && (next < 0 || d < next)) next = d;
      for (const auto& [d, l] : hist) {
        if (d <= day || (d > day + kLocalLookbackDays && d != next)) continue;
        if (label_in(hist, d, l) != label_in(with, d, l)) return false;
      }
      return true;
    };
    for (std::int64_t v = 0; v < want && !candidates.empty(); ++v) {
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      for (int attempt = 0; attempt < 200; ++attempt) {
        const std::size_t a = candidates[pick(r)];
        if (used.count(a)) continue;
        const std::int32_t day = pick_day(r);
        const PhoneKey p = phone_on(a, day);
        if (!qualifies(p, day)) continue;
        used.insert(a);
        drafts.push_back({day, target, a, p, detail::render_text(p, r)});
        auto& hist = phone_history[p.value()];
        hist.insert(std::upper_bound(hist.begin(), hist.end(), std::make_pair(day, std::size_t{0}),
                                     [](const auto& x, const auto& y) { return x.first < y.first; }),
                    {day, target});
        ++extra[j];
        break;
      }
    }
  }

  out.ads = to_records(drafts);
  out.planted.reserve(out.ads.size());
  for (auto& rec : out.ads) {
    out.planted.push_back(rec.phones.empty() ? std::nullopt : std::optional<PhoneKey>(rec.phones.front()));
    rec.phones.clear();
  }
  for (std::size_t j = 0; j < injections.size(); ++j)
    out.truth.injections.push_back({injections[j], extra[j], baseline[j], expected[j]});
  return out;
}

/// Attaches each ad's planted phone, the result a perfect extractor would give.
inline std::vector<AdRecord> with_planted_phones(const Corpus& c) {
  auto ads = c.ads;
  for (std::size_t i = 0; i < ads.size(); ++i)
    if (c.planted[i]) ads[i].phones = {*c.planted[i]};
  return ads;
}

/// Shares measured by running extraction, linkage and classification.
inline ClassShares measure(const Corpus& c, const PhoneExtractor& extractor = default_extractor()) {
  auto ads = c.ads;
  populate_phones(ads, extractor);
  const auto link = build_groups(ads);
  const auto labels = classify_labels(ads, link);
  return measure_shares(labels);
}

struct CalibrationTargets {
  double ntt_share = 0.08;
  double first_share = 0.065;
  double phone_coverage = 0.95;
};

struct CalibrationResult {
  MarketConfig config;
  ClassShares measured;
  int iterations = 0;
  bool converged = false;
};

/// Multiplicative fixed-point search on travel (new-to-town), churn (first
/// appearance) and phone fraction (coverage) until every share is within
/// `tolerance` of its target. Deterministic for a given start config.
inline CalibrationResult calibrate(const CalibrationTargets& targets, MarketConfig start,
                                   double tolerance = 0.0025, int max_iterations = 15) {
  if (!(targets.ntt_share > 0 && targets.first_share > 0 && targets.phone_coverage > 0 &&
        targets.phone_coverage <= 1))
    throw std::invalid_argument("calibration targets must be positive shares");
  CalibrationResult best;
  double best_err = std::numeric_limits<double>::infinity();
  MarketConfig cfg = std::move(start);
  for (int it = 1; it <= max_iterations; ++it) {
    const auto shares = measure(generate(cfg));
    const double err = std::max({std::fabs(shares.new_to_town - targets.ntt_share),
                                 std::fabs(shares.first - targets.first_share),
                                 std::fabs(shares.phone_coverage - targets.phone_coverage)});
    if (err < best_err) {
      best_err = err;
      best = {cfg, shares, it, err <= tolerance};
    }
    best.iterations = it;
    if (err <= tolerance) break;
    auto step = [](double value, double target, double measured, double lo, double hi) {
      if (measured <= 0) return std::min(hi, std::max(value * 2, 0.01));
      return std::clamp(value * target / measured, lo, hi);
    };
    cfg.travel_prob = step(cfg.travel_prob, targets.ntt_share, shares.new_to_town, 0.0, 1.0);
    cfg.churn_prob = step(cfg.churn_prob, targets.first_share, shares.first, 0.0, 1.0);
    cfg.phone_fraction = step(cfg.phone_fraction, targets.phone_coverage, shares.phone_coverage, 0.0, 1.0);
  }
  return best;
}

// ---- serialization --------------------------------------------------------

inline void to_json(nlohmann::json& j, const MarketConfig& c) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : c.regions) {
    nlohmann::json locs = nlohmann::json::array();
    for (const auto& l : r.locations) locs.push_back({{"id", l.id}, {"weight", l.weight}});
    regions.push_back({{"id", r.id}, {"locations", locs}});
  }
  j = {{"regions", regions},
       {"start_date", c.start_date.str()},
       {"days", c.days},
       {"advertisers", c.advertisers},
       {"ads_per_week_mean", c.ads_per_week_mean},
       {"ads_per_week_shape", c.ads_per_week_shape},
       {"churn_prob", c.churn_prob},
       {"travel_prob", c.travel_prob},
       {"trip_min_days", c.trip_min_days},
       {"trip_max_days", c.trip_max_days},
       {"phone_fraction", c.phone_fraction},
       {"weekday_multipliers", c.weekday_multipliers},
       {"cross_region_travel", c.cross_region_travel},
       {"seed", c.seed}};
}

/// Missing keys keep their defaults; "grid": [regions, locations] builds
/// the standard grid instead of listing regions.
inline void from_json(const nlohmann::json& j, MarketConfig& c) {
  c = MarketConfig::defaults();
  if (j.contains("grid")) {
    const auto g = j.at("grid").get<std::vector<int>>();
    if (g.size() != 2) throw std::invalid_argument("grid must be [regions, locations_per_region]");
    c.regions = MarketConfig::grid(g[0], g[1]);
  }
  if (j.contains("regions")) {
    c.regions.clear();
    for (const auto& r : j.at("regions")) {
      RegionSpec reg{r.at("id").get<std::string>(), {}};
      for (const auto& l : r.at("locations"))
        reg.locations.push_back({l.at("id").get<std::string>(), l.value("weight", 1.0)});
      c.regions.push_back(std::move(reg));
    }
  }
  if (j.contains("start_date")) c.start_date = parse_date_or_throw(j.at("start_date").get<std::string>());
  c.days = j.value("days", c.days);
  c.advertisers = j.value("advertisers", c.advertisers);
  c.ads_per_week_mean = j.value("ads_per_week_mean", c.ads_per_week_mean);
  c.ads_per_week_shape = j.value("ads_per_week_shape", c.ads_per_week_shape);
  c.churn_prob = j.value("churn_prob", c.churn_prob);
  c.travel_prob = j.value("travel_prob", c.travel_prob);
  c.trip_min_days = j.value("trip_min_days", c.trip_min_days);
  c.trip_max_days = j.value("trip_max_days", c.trip_max_days);
  c.phone_fraction = j.value("phone_fraction", c.phone_fraction);
  if (j.contains("weekday_multipliers"))
    c.weekday_multipliers = j.at("weekday_multipliers").get<std::array<double, 7>>();
  c.cross_region_travel = j.value("cross_region_travel", c.cross_region_travel);
  c.seed = j.value("seed", c.seed);
}

inline void to_json(nlohmann::json& j, const Injection& inj) {
  j = {{"location", inj.location_id},
       {"start_date", inj.start_date.str()},
       {"duration_days", inj.duration_days},
       {"multiplier", inj.multiplier},
       {"mode", to_string(inj.mode)}};
}

inline void from_json(const nlohmann::json& j, Injection& inj) {
  inj.location_id = j.at("location").get<std::string>();
  inj.start_date = parse_date_or_throw(j.at("start_date").get<std::string>());
  inj.duration_days = j.value("duration_days", 7);
  inj.multiplier = j.value("multiplier", 5.0);
  inj.mode = parse_injection_mode(j.value("mode", std::string("new-to-town-only")));
}

inline void write_truth_csv(std::ostream& out, const GroundTruth& truth) {
  csv::write_row(out, {"type", "advertiser", "location", "from_location", "start_date", "end_date",
                       "multiplier", "mode", "extra_ads"});
  for (const auto& o : truth.injections)
    csv::write_row(out, {"injection", "", o.injection.location_id, "", o.injection.start_date.str(),
                         o.injection.end_date().str(), csv::format_double(o.injection.multiplier),
                         to_string(o.injection.mode), std::to_string(o.extra_ads)});
  for (const auto& t : truth.trips)
    csv::write_row(out, {"trip", t.advertiser, t.to_location, t.from_location, t.start.str(),
                         t.end.str(), "", "", ""});
}

}  // namespace adsurge::synth
