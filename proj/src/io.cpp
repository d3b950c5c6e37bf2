#include "wvpe/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wvpe/errors.hpp"

namespace wvpe::io {

std::string sig9(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string exact(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

double parse_number(const std::string& field, const std::filesystem::path& path, std::size_t line_no)
{
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw InvalidConfiguration(path.string() + ":" + std::to_string(line_no) + ": not a number: '" +
                                   field + "'");
    }
    return v;
}

}  // namespace

Table read_csv(const std::filesystem::path& path, std::size_t expected_columns)
{
    std::ifstream in(path);
    if (!in) throw InvalidConfiguration("cannot open " + path.string());

    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (fields.size() != expected_columns) {
            throw InvalidConfiguration(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                       std::to_string(expected_columns) + " columns");
        }
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_number(f, path, line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw InvalidConfiguration(path.string() + ": empty file");
    return table;
}

std::vector<std::pair<double, double>> read_two_column(const std::filesystem::path& path,
                                                       std::string_view expected_header)
{
    const auto table = read_csv(path, 2);
    const std::string header = table.header[0] + "," + table.header[1];
    if (header != expected_header) {
        throw InvalidConfiguration(path.string() + ": expected header '" + std::string(expected_header) +
                                   "', found '" + header + "'");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(table.rows.size());
    for (const auto& r : table.rows) out.emplace_back(r[0], r[1]);
    return out;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfiguration("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidConfiguration("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace wvpe::io
