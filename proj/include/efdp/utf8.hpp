#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace efdp::utf8 {

// Splits into one substring per code point. Invalid bytes come out as
// single-byte pieces rather than throwing.
std::vector<std::string> characters(std::string_view s);

// Lowercases ASCII, Latin-1, Latin Extended-A/B letters used by Vietnamese
// and the Vietnamese block U+1EA0..U+1EF9. Other code points pass through.
std::string to_lower(std::string_view s);

}  // namespace efdp::utf8
