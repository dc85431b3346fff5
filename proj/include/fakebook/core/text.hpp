#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fakebook {

bool is_valid_utf8(std::string_view bytes) noexcept;

/// Number of Unicode code points; assumes valid UTF-8.
std::size_t utf8_length(std::string_view text) noexcept;

std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view text) noexcept;

/// Strict decimal integer parse: optional sign, digits only, no whitespace.
std::optional<long long> parse_int(std::string_view text) noexcept;

}  // namespace fakebook
