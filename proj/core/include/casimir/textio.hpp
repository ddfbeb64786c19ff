#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace casimir {

/// Shortest decimal form that round-trips an IEEE-754 double (17 significant
/// digits). All file formats use this so that write/read is bit-exact.
std::string g17(double v);

/// Strict double parse of a full token; throws std::invalid_argument on
/// trailing garbage or empty input.
double parse_double(std::string_view token);

long parse_long(std::string_view token);

/// FNV-1a 64-bit hash as 16 hex digits; used for config digests.
std::string fnv1a64_hex(std::string_view data);

std::vector<std::string> split(std::string_view line, char sep);

std::string trim(std::string_view s);

}  // namespace casimir
