#include "mfgcap/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfgcap/errors.hpp"

namespace mfgcap {

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) return columns[c];
    throw ConfigError("no column named '" + name + "'");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    if (table.header.size() != table.columns.size())
        throw ConfigError("csv: header and column count differ");
    const std::size_t n = table.rows();
    for (const auto& c : table.columns)
        if (c.size() != n) throw ConfigError("csv: ragged columns");
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
    for (std::size_t c = 0; c < table.header.size(); ++c) f << (c ? "," : "") << table.header[c];
    f << '\n';
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            f << (c ? "," : "") << format_double(table.columns[c][r]);
        f << '\n';
    }
    if (!f) throw ConfigError("failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(f, line)) throw ConfigError(path.string() + " is empty");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    t.columns.resize(t.header.size());
    std::size_t row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty()) continue;
        std::size_t c = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (true) {
            if (c >= t.columns.size()) throw ConfigError("too many cells on line " + std::to_string(row));
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc()) throw ConfigError("bad number on line " + std::to_string(row));
            t.columns[c++].push_back(v);
            p = res.ptr;
            if (p == end) break;
            if (*p != ',') throw ConfigError("bad separator on line " + std::to_string(row));
            ++p;
        }
        if (c != t.columns.size()) throw ConfigError("too few cells on line " + std::to_string(row));
    }
    return t;
}

}  // namespace mfgcap
