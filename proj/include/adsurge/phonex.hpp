#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace adsurge {

/// Canonical 10-digit NANP number without country code. First digit is 2-9.
class PhoneKey {
 public:
  PhoneKey() = default;

  /// Accepts exactly ten decimal digits with a leading 2-9.
  static std::optional<PhoneKey> from_digits(std::string_view s) {
    if (s.size() != 10 || s[0] < '2' || s[0] > '9') return std::nullopt;
    std::uint64_t v = 0;
    for (char ch : s) {
      if (ch < '0' || ch > '9') return std::nullopt;
      v = v * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    return PhoneKey{v};
  }

  [[nodiscard]] std::uint64_t value() const { return value_; }

  [[nodiscard]] std::string digits() const {
    std::string s(10, '0');
    std::uint64_t v = value_;
    for (int i = 9; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = static_cast<char>('0' + v % 10);
      v /= 10;
    }
    return s;
  }

  friend auto operator<=>(const PhoneKey&, const PhoneKey&) = default;

 private:
  explicit PhoneKey(std::uint64_t v) : value_(v) {}
  std::uint64_t value_ = 0;
};

struct PhoneKeyHash {
  std::size_t operator()(const PhoneKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.value());
  }
};

struct NormalizeResult {
  std::optional<PhoneKey> key;
  std::string reason;  // empty when accepted

  [[nodiscard]] bool accepted() const { return key.has_value(); }
};

/// Strips non-digits, drops a leading "1" from 11-digit candidates and
/// accepts the result if it is a valid PhoneKey.
inline NormalizeResult normalize_phone(std::string_view raw) {
  std::string digits;
  digits.reserve(raw.size());
  for (char ch : raw)
    if (ch >= '0' && ch <= '9') digits.push_back(ch);
  if (digits.size() == 11 && digits[0] == '1') digits.erase(0, 1);
  if (digits.size() != 10)
    return {std::nullopt, "wrong length (" + std::to_string(digits.size()) + " digits)"};
  if (digits[0] == '0' || digits[0] == '1')
    return {std::nullopt, std::string("invalid leading digit '") + digits[0] + "'"};
  return {PhoneKey::from_digits(digits), {}};
}

/// One entry of the ordered rule list. The pattern is a whitespace separated
/// sequence over three token kinds:
///   d      one digit (decimal character or digit word)
///   d{N}   N adjacent digits with no separator between them
///   s      one separator run (spaces, dots, dashes, parentheses)
/// Any element may carry a trailing '?' to make it optional.
struct ExtractionRule {
  std::string pattern_id;
  std::string description;
  std::string pattern;
};

inline void to_json(nlohmann::json& j, const ExtractionRule& r) {
  j = {{"pattern_id", r.pattern_id}, {"description", r.description}, {"pattern", r.pattern}};
}
inline void from_json(const nlohmann::json& j, ExtractionRule& r) {
  r.pattern_id = j.at("pattern_id").get<std::string>();
  r.description = j.value("description", std::string{});
  r.pattern = j.at("pattern").get<std::string>();
}

struct ExtractorConfig {
  std::vector<ExtractionRule> rules;
  std::map<std::string, char, std::less<>> digit_words;
  bool letter_o_as_zero = true;
  std::string separators = " \t\r\n.-()";

  static ExtractorConfig defaults() {
    ExtractorConfig c;
    c.rules = {
        {"nanp-country", "1 + area code + exchange + line, optional separators",
         "d s? d{3} s? d{3} s? d{4}"},
        {"nanp", "area code + exchange + line, optional separators", "d{3} s? d{3} s? d{4}"},
    };
    c.digit_words = {{"zero", '0'}, {"one", '1'}, {"two", '2'},   {"three", '3'},
                     {"four", '4'}, {"five", '5'}, {"six", '6'},  {"seven", '7'},
                     {"eight", '8'}, {"nine", '9'}, {"oh", '0'}};
    return c;
  }
};

inline void to_json(nlohmann::json& j, const ExtractorConfig& c) {
  nlohmann::json words = nlohmann::json::object();
  for (const auto& [w, d] : c.digit_words) words[w] = std::string(1, d);
  j = {{"rules", c.rules},
       {"digit_words", words},
       {"letter_o_as_zero", c.letter_o_as_zero},
       {"separators", c.separators}};
}

inline void from_json(const nlohmann::json& j, ExtractorConfig& c) {
  c = ExtractorConfig::defaults();
  if (j.contains("rules")) c.rules = j.at("rules").get<std::vector<ExtractionRule>>();
  if (j.contains("digit_words")) {
    c.digit_words.clear();
    for (const auto& [w, d] : j.at("digit_words").items()) {
      const auto s = d.get<std::string>();
      if (s.size() != 1 || s[0] < '0' || s[0] > '9')
        throw std::invalid_argument("digit word '" + w + "' must map to one digit");
      std::string lower = w;
      for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      c.digit_words[lower] = s[0];
    }
  }
  c.letter_o_as_zero = j.value("letter_o_as_zero", c.letter_o_as_zero);
  c.separators = j.value("separators", c.separators);
}

/// Rule-driven phone extractor. Immutable after construction and safe to
/// share across threads.
class PhoneExtractor {
 public:
  explicit PhoneExtractor(ExtractorConfig config = ExtractorConfig::defaults())
      : config_(std::move(config)) {
    for (const auto& r : config_.rules) compiled_.push_back(compile(r));
    for (unsigned char ch : config_.separators) is_sep_[ch] = true;
    for (const auto& [w, d] : config_.digit_words) {
      if (w.empty()) throw std::invalid_argument("empty digit word");
      max_word_ = std::max(max_word_, w.size());
    }
  }

  [[nodiscard]] const ExtractorConfig& config() const { return config_; }

  /// Deduplicated, sorted set of phone keys found in text.
  [[nodiscard]] std::vector<PhoneKey> extract(std::string_view text) const {
    std::vector<Token> tokens;
    tokenize(text, tokens);
    std::vector<PhoneKey> keys;
    std::string digits;
    std::vector<std::size_t> ends;
    std::size_t i = 0;
    while (i < tokens.size()) {
      if (tokens[i].kind != Kind::Digit || (i > 0 && tokens[i - 1].kind == Kind::Digit)) {
        ++i;
        continue;
      }
      // Leftmost: first digit token that can start a match. Longest: the
      // longest candidate across all rules that normalizes; earlier rules
      // win ties.
      std::size_t best_end = 0;
      std::optional<PhoneKey> best_key;
      for (const auto& rule : compiled_) {
        ends.clear();
        match(rule, 0, tokens, i, ends);
        for (std::size_t end : ends) {
          if (end <= best_end) continue;
          if (end < tokens.size() && tokens[end].kind == Kind::Digit) continue;
          digits.clear();
          for (std::size_t t = i; t < end; ++t)
            if (tokens[t].kind == Kind::Digit) digits.push_back(tokens[t].digit);
          auto n = normalize_phone(digits);
          if (n.accepted()) {
            best_end = end;
            best_key = n.key;
          }
        }
      }
      if (best_key) {
        keys.push_back(*best_key);
        i = best_end;
      } else {
        ++i;
      }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
  }

 private:
  enum class Kind : std::uint8_t { Digit, Sep, Other, MaybeZero };
  struct Token {
    Kind kind;
    char digit;
  };
  struct Element {
    bool is_sep;
    std::size_t count;  // digit count for digit elements
    bool optional;
  };
  using CompiledRule = std::vector<Element>;

  static CompiledRule compile(const ExtractionRule& rule) {
    CompiledRule out;
    std::size_t pos = 0;
    const std::string& p = rule.pattern;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("rule '" + rule.pattern_id + "': " + why);
    };
    while (pos < p.size()) {
      if (std::isspace(static_cast<unsigned char>(p[pos]))) {
        ++pos;
        continue;
      }
      Element e{false, 1, false};
      if (p[pos] == 's') {
        e.is_sep = true;
        ++pos;
      } else if (p[pos] == 'd') {
        ++pos;
        if (pos < p.size() && p[pos] == '{') {
          const auto close = p.find('}', pos);
          if (close == std::string::npos) fail("unclosed '{'");
          const auto n = std::stoul(p.substr(pos + 1, close - pos - 1));
          if (n == 0) fail("zero-length digit group");
          e.count = n;
          pos = close + 1;
        }
      } else {
        fail(std::string("unexpected '") + p[pos] + "'");
      }
      if (pos < p.size() && p[pos] == '?') {
        e.optional = true;
        ++pos;
      }
      out.push_back(e);
    }
    if (out.empty()) fail("empty pattern");
    return out;
  }

  // Collects every token index at which `rule[el..]` can finish when started
  // at token `t`.
  static void match(const CompiledRule& rule, std::size_t el, const std::vector<Token>& tokens,
                    std::size_t t, std::vector<std::size_t>& ends) {
    if (el == rule.size()) {
      ends.push_back(t);
      return;
    }
    const Element& e = rule[el];
    if (e.optional) match(rule, el + 1, tokens, t, ends);
    if (e.is_sep) {
      if (t < tokens.size() && tokens[t].kind == Kind::Sep) match(rule, el + 1, tokens, t + 1, ends);
      return;
    }
    if (t + e.count > tokens.size()) return;
    for (std::size_t k = t; k < t + e.count; ++k)
      if (tokens[k].kind != Kind::Digit) return;
    match(rule, el + 1, tokens, t + e.count, ends);
  }

  void tokenize(std::string_view text, std::vector<Token>& out) const {
    out.clear();
    std::size_t i = 0;
    std::string lower;
    while (i < text.size()) {
      const auto ch = static_cast<unsigned char>(text[i]);
      if (ch >= '0' && ch <= '9') {
        out.push_back({Kind::Digit, static_cast<char>(ch)});
        ++i;
      } else if (is_sep_[ch]) {
        if (out.empty() || out.back().kind != Kind::Sep) out.push_back({Kind::Sep, 0});
        ++i;
      } else if (std::isalpha(ch)) {
        std::size_t j = i;
        while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
        lower.assign(text.substr(i, j - i));
        for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!decompose(lower, out)) {
          if (config_.letter_o_as_zero && lower == "o")
            out.push_back({Kind::MaybeZero, '0'});
          else
            out.push_back({Kind::Other, 0});
        }
        i = j;
      } else {
        if (out.empty() || out.back().kind != Kind::Other) out.push_back({Kind::Other, 0});
        ++i;
      }
    }
    // A lone "o" reads as zero only when digits (or other lone o's) sit on
    // both sides of it, possibly across a separator run. All are decided
    // before any is rewritten.
    std::vector<std::size_t> zeros, others;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (out[k].kind != Kind::MaybeZero) continue;
      auto neighbour_is_digit = [&](std::ptrdiff_t step) {
        auto p = static_cast<std::ptrdiff_t>(k) + step;
        if (p >= 0 && p < static_cast<std::ptrdiff_t>(out.size()) &&
            out[static_cast<std::size_t>(p)].kind == Kind::Sep)
          p += step;
        if (p < 0 || p >= static_cast<std::ptrdiff_t>(out.size())) return false;
        const Kind kind = out[static_cast<std::size_t>(p)].kind;
        return kind == Kind::Digit || kind == Kind::MaybeZero;
      };
      (neighbour_is_digit(-1) && neighbour_is_digit(+1) ? zeros : others).push_back(k);
    }
    for (std::size_t k : zeros) out[k].kind = Kind::Digit;
    for (std::size_t k : others) out[k].kind = Kind::Other;
  }

  // Splits a lowercase letter run into digit words. Appends digits and
  // returns true only if the whole run decomposes.
  bool decompose(const std::string& word, std::vector<Token>& out) const {
    if (word.size() > 64) return false;
    // reach[i] holds the length of a vocabulary word ending at i on some
    // full decomposition path.
    std::vector<std::size_t> via(word.size() + 1, 0);
    std::vector<bool> reach(word.size() + 1, false);
    reach[0] = true;
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (!reach[i]) continue;
      for (std::size_t len = 1; len <= max_word_ && i + len <= word.size(); ++len) {
        if (reach[i + len]) continue;
        if (config_.digit_words.find(std::string_view(word).substr(i, len)) !=
            config_.digit_words.end()) {
          reach[i + len] = true;
          via[i + len] = len;
        }
      }
    }
    if (!reach[word.size()]) return false;
    std::vector<char> digits;
    for (std::size_t end = word.size(); end > 0; end -= via[end])
      digits.push_back(
          config_.digit_words.find(std::string_view(word).substr(end - via[end], via[end]))->second);
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back({Kind::Digit, *it});
    return true;
  }

  ExtractorConfig config_;
  std::vector<CompiledRule> compiled_;
  bool is_sep_[256] = {};
  std::size_t max_word_ = 0;
};

inline const PhoneExtractor& default_extractor() {
  static const PhoneExtractor extractor;
  return extractor;
}

inline std::vector<PhoneKey> extract_phones(std::string_view text) {
  return default_extractor().extract(text);
}

}  // namespace adsurge
