#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wvpe::io {

/// 9 significant digits, the fixed CSV number format.
std::string sig9(double v);

/// Shortest text that parses back to exactly the same double.
std::string exact(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with a header line. Throws InvalidConfiguration with the
/// file name and line number on malformed input.
Table read_csv(const std::filesystem::path& path, std::size_t expected_columns);

/// Reads a two-column table and checks the header matches.
std::vector<std::pair<double, double>> read_two_column(const std::filesystem::path& path,
                                                       std::string_view expected_header);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace wvpe::io
