// CSV emission: UTF-8, comma-separated, header row, locale-independent
// full-precision numbers.
#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "fcsl/errors.hpp"

namespace fcsl {

using CsvCell = std::variant<std::string, double, long, bool>;

std::string csv_format(const CsvCell& cell);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<CsvCell>& cells);

private:
    std::ofstream os_;
    std::size_t width_;
};

} // namespace fcsl
