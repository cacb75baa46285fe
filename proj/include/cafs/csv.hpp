// Minimal CSV support for the energy-data feeds and result files. Values are
// comma-separated, first line is the header, cells carry no quoting.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cafs {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

// Empty or whitespace-only cells yield nullopt; anything non-numeric throws.
std::optional<double> parse_cell(const std::string& cell, const std::string& where);

}  // namespace cafs
