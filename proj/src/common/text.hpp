#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace agiqa::text {

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);

/// Shortest form that round-trips exactly.
std::string format_double(double v);

// Parsers throw ErrorCode::kConfig naming `what` on malformed input.
double parse_double(std::string_view s, std::string_view what);
std::uint64_t parse_u64(std::string_view s, std::string_view what);
bool parse_bool(std::string_view s, std::string_view what);

}  // namespace agiqa::text
