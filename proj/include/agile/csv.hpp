#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agile::csv {

// Minimal RFC-4180 style CSV. Fields are quoted only when they contain a
// comma, quote or newline; embedded quotes are doubled.

std::string escape_field(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

// Splits one line into fields. Multi-line quoted fields are not supported;
// none of the formats written by this project produce them.
std::vector<std::string> split_row(std::string_view line);

// Shortest round-trip decimal representation of a double ("0.5", "12", ...).
std::string format_double(double v);

// Strict parse of a full string as a double / long. Returns nullopt on any
// trailing garbage or empty input.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

}  // namespace agile::csv
