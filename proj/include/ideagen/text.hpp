#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ideagen::text {

// ASCII whitespace only; titles are UTF-8 but separators are plain spaces/tabs.
bool is_space(char c);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Splits on runs of whitespace, dropping empty pieces.
std::vector<std::string> split_words(std::string_view s);

// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string> split(std::string_view s, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool contains(std::string_view haystack, std::string_view needle);

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

// Parses a full string as a double; throws DataError on trailing garbage.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

// Replaces each invalid UTF-8 byte sequence with U+FFFD.
std::string sanitize_utf8(std::string_view s);

// RFC 4180 field quoting: wraps in quotes when the field holds a comma,
// quote, or newline.
std::string csv_escape(std::string_view field);
std::vector<std::string> parse_csv_line(std::string_view line);

}  // namespace ideagen::text
