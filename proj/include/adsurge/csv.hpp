#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

namespace adsurge::csv {

/// Minimal RFC 4180 reader: quoted fields may hold commas, doubled quotes
/// and newlines. Tracks the physical line a record started on.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Returns false at end of input. Blank lines are skipped.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    std::string line;
    while (true) {
      if (!std::getline(in_, line)) return false;
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) break;
    }
    record_line_ = line_no_;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
      if (i == line.size()) {
        if (quoted) {
          std::string more;
          if (!std::getline(in_, more)) throw std::runtime_error("unterminated quoted field");
          ++line_no_;
          if (!more.empty() && more.back() == '\r') more.pop_back();
          field.push_back('\n');
          line = std::move(more);
          i = 0;
          continue;
        }
        fields.push_back(std::move(field));
        return true;
      }
      const char ch = line[i++];
      if (quoted) {
        if (ch == '"') {
          if (i < line.size() && line[i] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(ch);
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(ch);
      }
    }
  }

  /// Line number (1-based) where the last returned record began.
  [[nodiscard]] std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  std::size_t record_line_ = 0;
};

/// Column lookup built from a header row.
class Header {
 public:
  Header() = default;
  explicit Header(const std::vector<std::string>& names) : names_(names) {
    for (std::size_t i = 0; i < names.size(); ++i) index_.emplace(names[i], i);
  }

  [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] std::size_t require(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw std::runtime_error("missing column '" + std::string(name) + "'");
  }

  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline void write_field(std::ostream& out, std::string_view v) {
  if (v.find_first_of(",\"\n\r") == std::string_view::npos) {
    out << v;
    return;
  }
  out << '"';
  for (char ch : v) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace adsurge::csv
