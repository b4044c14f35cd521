#include "fcsl/csv.hpp"

#include <cstdio>

namespace fcsl {

std::string csv_format(const CsvCell& cell) {
    if (std::holds_alternative<std::string>(cell)) return std::get<std::string>(cell);
    if (std::holds_alternative<bool>(cell)) return std::get<bool>(cell) ? "true" : "false";
    if (std::holds_alternative<long>(cell)) return std::to_string(std::get<long>(cell));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(cell));
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : os_(path, std::ios::trunc), width_(header.size()) {
    if (!os_) throw ConfigError("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        os_ << header[i] << (i + 1 < header.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != width_) throw ShapeError("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i)
        os_ << csv_format(cells[i]) << (i + 1 < cells.size() ? "," : "\n");
}

} // namespace fcsl
