#include "common/text.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "common/error.hpp"

namespace agiqa::text {

std::string_view trim(std::string_view s) noexcept {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? end : buf);
}

double parse_double(std::string_view s, std::string_view what) {
  const std::string str(trim(s));
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (str.empty() || end != str.c_str() + str.size() || !std::isfinite(v)) {
    fail(ErrorCode::kConfig, std::string(what) + ": '" + str + "' is not a finite number");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  const auto t = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorCode::kConfig, std::string(what) + ": '" + std::string(t) +
                                 "' is not a non-negative integer");
  }
  return v;
}

bool parse_bool(std::string_view s, std::string_view what) {
  const auto t = trim(s);
  if (t == "true" || t == "1" || t == "on" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "off" || t == "no") return false;
  fail(ErrorCode::kConfig, std::string(what) + ": '" + std::string(t) + "' is not a boolean");
}

}  // namespace agiqa::text
