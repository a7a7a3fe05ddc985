#pragma once

// File emission helpers. Numbers are written in the shortest decimal form
// that parses back to the identical double, so CSV files round-trip exactly.
// Every file is written to a temporary sibling and renamed into place.

#include <filesystem>
#include <string>
#include <vector>

namespace cavity_bjj::io {

/// Shortest round-trip representation ("inf", "-inf", "nan" for non-finite values).
std::string format_number(double value);

/// Writes `content` to `path` atomically, creating parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Parses a numeric CSV with a single header line. Throws cavity_bjj::Error on malformed input.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

} // namespace cavity_bjj::io
