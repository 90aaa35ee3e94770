#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nngpso {

/// Shortest round-trip decimal form of a double. Deterministic, so files
/// built from the same values are byte-identical.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Splits a CSV line on commas. No quoting; none of our fields need it.
std::vector<std::string_view> split_csv_line(std::string_view line);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// Rows of a CSV file, header skipped. Throws on a header mismatch.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::string_view expected_header);

}  // namespace nngpso
