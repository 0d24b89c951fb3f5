#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ideagen::io {

// Throws DataError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Creates parent directories as needed. Throws DataError when the file
// cannot be written.
void write_file(const std::filesystem::path& path, std::string_view content);

// Splits on '\n' and strips a trailing '\r'. A final empty line (from a
// trailing newline) is dropped.
std::vector<std::string> lines(std::string_view content);

std::string hex64(std::uint64_t v);

// FNV-1a content hash of a file, hex encoded.
std::string file_hash(const std::filesystem::path& path);

// UTC timestamp, ISO-8601 with seconds.
std::string utc_timestamp();

}  // namespace ideagen::io
