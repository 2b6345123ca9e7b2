#include "geppg/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geppg::csv {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T parse_number(const std::string& s, const char* what) {
    T value{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || s.empty()) {
        throw InputDomainError(std::string("expected ") + what + ", got '" + s + "'");
    }
    return value;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    return parse_number<double>(s, "a number");
}

std::int64_t parse_int(const std::string& s) { return parse_number<std::int64_t>(s, "an integer"); }

std::uint64_t parse_uint(const std::string& s) { return parse_number<std::uint64_t>(s, "a non-negative integer"); }

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Index Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<Index>(i);
    }
    throw InputDomainError("csv: missing column '" + name + "'");
}

bool Table::has_column(const std::string& name) const {
    for (const auto& h : header) {
        if (h == name) return true;
    }
    return false;
}

const std::string& Table::at(std::size_t row, const std::string& name) const {
    return rows.at(row).at(static_cast<std::size_t>(column(name)));
}

std::vector<double> Table::numbers(const std::string& name) const {
    const auto c = static_cast<std::size_t>(column(name));
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(parse_double(r.at(c)));
    return out;
}

Table read_table(std::istream& is) {
    Table t;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(line.find_first_not_of("# "));
            const std::size_t eq = body.find('=');
            if (eq != std::string::npos) t.meta[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        auto fields = split(line);
        if (fields.size() != t.header.size()) {
            throw InputDomainError("csv: row " + std::to_string(t.rows.size() + 1) + " has " +
                                   std::to_string(fields.size()) + " fields, header has " +
                                   std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty()) throw InputDomainError("csv: missing header row");
    return t;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputDomainError("cannot open " + path.string());
    try {
        return read_table(in);
    } catch (const InputDomainError& e) {
        throw InputDomainError(path.string() + ": " + e.what());
    }
}

void write_table(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
    auto write_row = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    };
    write_row(t.header);
    for (const auto& r : t.rows) write_row(r);
}

void write_table(const std::filesystem::path& path, const Table& t) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        write_table(out, t);
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace geppg::csv
