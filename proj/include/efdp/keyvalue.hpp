#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace efdp::kv {

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
// Throws ConfigError on a line without '='.
std::vector<std::pair<std::string, std::string>> parse(std::string_view text);

// Typed conversions; throw ConfigError naming the key on bad input.
std::size_t to_size(const std::string& key, const std::string& value);
std::uint64_t to_u64(const std::string& key, const std::string& value);
double to_double(const std::string& key, const std::string& value);
bool to_bool(const std::string& key, const std::string& value);

std::string format(double v);
inline std::string format(bool v) { return v ? "true" : "false"; }

}  // namespace efdp::kv
