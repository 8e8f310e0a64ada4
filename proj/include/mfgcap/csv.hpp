#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mfgcap {

/// Column-oriented numeric table.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] const std::vector<double>& column(const std::string& name) const;
    [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// %.17g, enough digits to round-trip any double.
std::string format_double(double v);

/// Shortest round-trip representation, with ".0" appended to integral values.
std::string format_shortest(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace mfgcap
