#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mednlu::text {

/// Number of UTF-8 code points. Bytes that do not form a valid sequence
/// count as one code point each, so the walk never fails on dirty input.
std::size_t cp_length(std::string_view s);

/// Byte offset of the code point at index `cp`; s.size() when cp == cp_length(s).
std::size_t cp_to_byte(std::string_view s, std::size_t cp);

/// Substring by code-point range [start, end). Throws IndexOutOfRange.
std::string cp_slice(std::string_view s, std::size_t start, std::size_t end);

/// First occurrence of needle at or after code point `from`; code-point index.
std::optional<std::size_t> cp_find(std::string_view hay, std::string_view needle,
                                   std::size_t from);

bool is_ascii_space(char c);
std::string_view ltrim(std::string_view s);
std::string_view rtrim(std::string_view s);
std::string_view trim(std::string_view s);

std::string lower(std::string_view s);

/// Whitespace-delimited token count.
std::size_t word_count(std::string_view s);

/// Split on '\n'; a trailing '\r' on each line is dropped.
std::vector<std::string> split_lines(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

} // namespace mednlu::text
