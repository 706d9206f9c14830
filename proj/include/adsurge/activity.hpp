#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adsurge {

/// Movement label of one ad relative to its phone-linked group.
enum class ActivityClass : std::uint8_t { First, Local, NewToTown, Unlinked };

inline std::string_view to_string(ActivityClass c) {
  switch (c) {
    case ActivityClass::First: return "first";
    case ActivityClass::Local: return "local";
    case ActivityClass::NewToTown: return "new_to_town";
    case ActivityClass::Unlinked: return "unlinked";
  }
  return "unlinked";
}

inline std::optional<ActivityClass> parse_activity_class(std::string_view s) {
  if (s == "first") return ActivityClass::First;
  if (s == "local") return ActivityClass::Local;
  if (s == "new_to_town") return ActivityClass::NewToTown;
  if (s == "unlinked") return ActivityClass::Unlinked;
  return std::nullopt;
}

/// Which subset of ads a scan runs over.
enum class Stream : std::uint8_t { All, NewToTown };

inline std::string_view to_string(Stream s) { return s == Stream::All ? "all" : "ntt"; }

inline Stream parse_stream(std::string_view s) {
  if (s == "all") return Stream::All;
  if (s == "ntt") return Stream::NewToTown;
  throw std::invalid_argument("unknown stream '" + std::string(s) + "' (expected all|ntt)");
}

}  // namespace adsurge
