#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsrate::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split(std::string_view line);

std::string_view trim(std::string_view s);

/// Strict decimal parse of the whole (trimmed) field; nullopt on garbage,
/// empty input, or non-finite results.
std::optional<double> parse_double(std::string_view field);

/// Shortest round-trip representation ("0.1", "2.4", "-3").
std::string format_double(double v);

/// Reads a text file into lines, dropping a UTF-8 BOM and trailing '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Quotes a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

}  // namespace tsrate::csv
