#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adsurge {

/// Day-resolution calendar date. No timezone: the value is the site-local
/// posting day, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static std::optional<Date> from_ymd(int y, unsigned m, unsigned d) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
  }

  /// Strict "YYYY-MM-DD".
  static std::optional<Date> parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
      int v = 0;
      for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + (s[i] - '0');
      }
      return v;
    };
    const auto y = digits(0, 4);
    const auto m = digits(5, 2);
    const auto d = digits(8, 2);
    if (!y || !m || !d) return std::nullopt;
    return from_ymd(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
  }

  [[nodiscard]] constexpr std::int32_t days() const { return days_; }

  [[nodiscard]] std::chrono::year_month_day ymd() const {
    return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days_}}};
  }

  [[nodiscard]] int year() const { return static_cast<int>(ymd().year()); }

  /// 0 = Sunday ... 6 = Saturday.
  [[nodiscard]] unsigned weekday() const {
    return std::chrono::weekday{std::chrono::sys_days{std::chrono::days{days_}}}.c_encoding();
  }

  [[nodiscard]] std::string str() const {
    const auto v = ymd();
    char buf[16];
    const int y = static_cast<int>(v.year());
    const unsigned m = static_cast<unsigned>(v.month());
    const unsigned d = static_cast<unsigned>(v.day());
    buf[0] = static_cast<char>('0' + (y / 1000) % 10);
    buf[1] = static_cast<char>('0' + (y / 100) % 10);
    buf[2] = static_cast<char>('0' + (y / 10) % 10);
    buf[3] = static_cast<char>('0' + y % 10);
    buf[4] = '-';
    buf[5] = static_cast<char>('0' + m / 10);
    buf[6] = static_cast<char>('0' + m % 10);
    buf[7] = '-';
    buf[8] = static_cast<char>('0' + d / 10);
    buf[9] = static_cast<char>('0' + d % 10);
    return std::string(buf, 10);
  }

  constexpr Date operator+(std::int32_t n) const { return Date{days_ + n}; }
  constexpr Date operator-(std::int32_t n) const { return Date{days_ - n}; }
  constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }
  constexpr Date& operator+=(std::int32_t n) {
    days_ += n;
    return *this;
  }
  constexpr Date& operator++() {
    ++days_;
    return *this;
  }

  friend constexpr auto operator<=>(Date, Date) = default;

 private:
  std::int32_t days_ = 0;
};

/// Parses or throws std::invalid_argument naming the bad value.
inline Date parse_date_or_throw(std::string_view s) {
  if (auto d = Date::parse(s)) return *d;
  throw std::invalid_argument("invalid date '" + std::string(s) + "'");
}

/// Closed interval of dates.
struct DateSpan {
  Date first;
  Date last;

  [[nodiscard]] bool contains(Date d) const { return first <= d && d <= last; }
  [[nodiscard]] std::int32_t length() const { return last - first + 1; }
  [[nodiscard]] bool intersects(const DateSpan& o) const {
    return first <= o.last && o.first <= last;
  }
  friend bool operator==(const DateSpan&, const DateSpan&) = default;
};

}  // namespace adsurge
