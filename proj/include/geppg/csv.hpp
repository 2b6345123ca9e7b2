#ifndef GEPPG_CSV_HPP
#define GEPPG_CSV_HPP

#include "geppg/common.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace geppg::csv {

/// Shortest decimal text that reads back to exactly `x`.
std::string format_double(double x);

/// Strict parsers: the whole field must be consumed.
double parse_double(const std::string& s);
std::int64_t parse_int(const std::string& s);
std::uint64_t parse_uint(const std::string& s);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

/**
 * Comma-separated table with a header row. Lines of the form
 * `# key=value` before the header are kept as metadata; fields never
 * contain commas or quotes in this project's files.
 */
struct Table {
    std::map<std::string, std::string> meta;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    Index column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    const std::string& at(std::size_t row, const std::string& name) const;
    double number(std::size_t row, const std::string& name) const { return parse_double(at(row, name)); }
    std::vector<double> numbers(const std::string& name) const;
};

Table read_table(std::istream& is);
Table read_table(const std::filesystem::path& path);

void write_table(std::ostream& os, const Table& t);
/// Writes through a temporary file and renames it into place.
void write_table(const std::filesystem::path& path, const Table& t);

} // namespace geppg::csv

#endif
