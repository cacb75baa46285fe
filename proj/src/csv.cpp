#include "cafs/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "cafs/core.hpp"
#include "cafs/serialize.hpp"

namespace cafs {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(trim(line.substr(pos)));
            break;
        }
        cells.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return cells;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    CsvTable table;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos = eol + 1;
        if (trim(line).empty()) continue;
        if (first) {
            table.header = split_line(line);
            first = false;
        } else {
            auto cells = split_line(line);
            if (cells.size() != table.header.size())
                throw ParseError(origin + ": row " + std::to_string(table.rows.size() + 2) +
                                 " has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(table.header.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw ParseError(origin + ": empty file");
    return table;
}

CsvTable read_csv(const std::string& path) {
    return parse_csv(read_text_file(path), path);
}

std::optional<double> parse_cell(const std::string& cell, const std::string& where) {
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end)
        throw ParseError(where + ": non-numeric cell '" + cell + "'");
    return value;
}

}  // namespace cafs
