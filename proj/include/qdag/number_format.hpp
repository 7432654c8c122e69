#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace qdag {

// Shortest decimal string that parses back to exactly the same double.
std::string format_number(double value);

// Strict parse of a full token; nullopt on any trailing garbage.
std::optional<double> parse_number(std::string_view token);

}  // namespace qdag
