#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace semfield::detail {

/// Whole-file read. Throws Error(ingest, "file not found: <path>").
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits on '\n' and strips a trailing '\r'. A final empty line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
bool is_blank_or_comment(std::string_view line);

}  // namespace semfield::detail
