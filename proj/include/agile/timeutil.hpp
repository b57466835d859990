#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace agile {

// Seconds since the Unix epoch, always UTC. Every timestamp in the data
// model is normalized to this at ingest.
using UtcSeconds = std::int64_t;

constexpr UtcSeconds kSecondsPerHour = 3600;
constexpr UtcSeconds kSecondsPerDay = 86400;

// Parses "YYYY-MM-DDTHH:MM:SS" followed by "Z", "+HH:MM", "-HH:MM" or a
// 4-digit offset without colon. Fractional seconds are accepted and
// truncated. Throws ParseError on anything else.
UtcSeconds parse_iso8601(std::string_view text);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(UtcSeconds t);

}  // namespace agile
