#include "cafs/carbon.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "cafs/csv.hpp"
#include "cafs/serialize.hpp"

namespace cafs {

EmissionFactorTable EmissionFactorTable::defaults() {
    EmissionFactorTable table;
    table.add("coal", {740, 820, 910});
    table.add("gas-cc", {410, 490, 650});
    table.add("biomass-cofiring", {620, 740, 890});
    table.add("biomass-dedicated", {130, 230, 420});
    table.add("geothermal", {6, 38, 79});
    table.add("hydro", {1, 24, 2200});
    table.add("nuclear", {3.7, 12, 110});
    table.add("solar-pv", {26, 41, 60});
    table.add("wind-onshore", {7, 11, 56});
    table.add("wind-offshore", {8, 12, 35});
    return table;
}

void EmissionFactorTable::add(const std::string& source, EmissionFactor factor) {
    if (factor.median <= 0.0 || factor.min <= 0.0 || factor.max <= 0.0)
        throw ValidationError("emission factor for '" + source + "' must be > 0");
    if (contains(source))
        throw ValidationError("duplicate emission factor source '" + source + "'");
    entries_.emplace_back(source, factor);
}

bool EmissionFactorTable::contains(const std::string& source) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return e.first == source; });
}

const EmissionFactor& EmissionFactorTable::factor_of(const std::string& source) const {
    for (const auto& [name, factor] : entries_)
        if (name == source) return factor;
    throw ValidationError("unknown energy source '" + source + "'");
}

double EmissionFactorTable::median_of(const std::string& source) const {
    return factor_of(source).median;
}

std::vector<double> GenerationMixSeries::shares(int period) const {
    const auto& row = quantities[static_cast<std::size_t>(period)];
    double total = 0.0;
    for (double q : row) total += q;
    if (total <= 0.0)
        throw ValidationError("generation mix: zero total generation in period " +
                              std::to_string(period + 1));
    std::vector<double> w(row.size());
    for (std::size_t g = 0; g < row.size(); ++g) w[g] = row[g] / total;
    return w;
}

void validate_mix(const GenerationMixSeries& mix) {
    for (const auto& row : mix.quantities) {
        if (row.size() != mix.sources.size())
            throw ValidationError("generation mix: ragged quantity row");
        for (double q : row)
            if (q < 0.0) throw ValidationError("generation mix: negative quantity");
    }
    for (int t = 0; t < mix.period_count(); ++t) mix.shares(t);  // rejects zero-total periods
}

std::vector<double> carbon_intensity(const GenerationMixSeries& mix,
                                     const EmissionFactorTable& factors) {
    std::vector<double> theta(mix.sources.size());
    for (std::size_t g = 0; g < mix.sources.size(); ++g)
        theta[g] = factors.median_of(mix.sources[g]);
    std::vector<double> intensity(static_cast<std::size_t>(mix.period_count()));
    for (int t = 0; t < mix.period_count(); ++t) {
        const std::vector<double> w = mix.shares(t);
        double c = 0.0;
        for (std::size_t g = 0; g < w.size(); ++g) c += w[g] * theta[g];
        intensity[static_cast<std::size_t>(t)] = c;
    }
    return intensity;
}

StartWindow start_window(const Instance& inst, int job, int machine) {
    int before = 0;
    for (int l = 0; l < machine; ++l) before += inst.op(job, l).duration;
    int remaining = 0;
    for (int l = machine; l < inst.machines; ++l) remaining += inst.op(job, l).duration;
    return {1 + before, inst.horizon + 1 - remaining};
}

double EmissionMatrix::at(int job, int machine, int start_period) const {
    const Window& w = window(job, machine);
    return w.values[static_cast<std::size_t>(start_period - w.first_start)];
}

EmissionMatrix emission_matrix(const Instance& inst) {
    EmissionMatrix matrix;
    matrix.machine_count = inst.machines;
    matrix.windows.resize(static_cast<std::size_t>(inst.job_count()) *
                          static_cast<std::size_t>(inst.machines));
    const double h = inst.period_hours;
    for (int i = 0; i < inst.job_count(); ++i) {
        for (int m = 0; m < inst.machines; ++m) {
            const StartWindow sw = start_window(inst, i, m);
            if (sw.latest < sw.earliest)
                throw ValidationError("job " + std::to_string(i + 1) +
                                      " cannot fit in the horizon (machine " +
                                      std::to_string(m + 1) + ")");
            const OperationSpec& op = inst.op(i, m);
            EmissionMatrix::Window w;
            w.first_start = sw.earliest;
            w.values.resize(static_cast<std::size_t>(sw.width()));
            for (int t = sw.earliest; t <= sw.latest; ++t) {
                double grams = 0.0;
                for (int k = 1; k <= op.duration; ++k)
                    grams += op.power[static_cast<std::size_t>(k - 1)] * h *
                             inst.carbon_intensity[static_cast<std::size_t>(t + k - 2)];
                w.values[static_cast<std::size_t>(t - sw.earliest)] = grams;
            }
            matrix.windows[static_cast<std::size_t>(i * inst.machines + m)] = std::move(w);
        }
    }
    return matrix;
}

namespace {

// Reads value columns with previous-value carry-forward for empty cells.
// Columns are every header except the leading timestamp column.
struct SeriesColumns {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::size_t gaps_filled = 0;
};

bool is_timestamp_header(const std::string& name) {
    std::string lower;
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower == "timestamp" || lower == "time" || lower == "datetime" || lower == "date";
}

SeriesColumns read_series_columns(const CsvTable& table, const std::string& origin) {
    SeriesColumns out;
    std::vector<int> value_columns;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == 0 && is_timestamp_header(table.header[c])) continue;
        value_columns.push_back(static_cast<int>(c));
        out.names.push_back(table.header[c]);
    }
    if (value_columns.empty()) throw ParseError(origin + ": no value columns");
    std::vector<double> previous(value_columns.size(), 0.0);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<double> row(value_columns.size());
        for (std::size_t j = 0; j < value_columns.size(); ++j) {
            const std::string& cell = table.rows[r][static_cast<std::size_t>(value_columns[j])];
            const std::string where =
                origin + ": row " + std::to_string(r + 2) + ", column '" + out.names[j] + "'";
            const auto value = parse_cell(cell, where);
            if (value) {
                row[j] = *value;
            } else {
                row[j] = previous[j];
                ++out.gaps_filled;
            }
        }
        previous = row;
        out.rows.push_back(std::move(row));
    }
    if (out.rows.empty()) throw ParseError(origin + ": no data rows");
    return out;
}

}  // namespace

GenerationMixSeries ingest_grid_mix(const std::string& path, const EmissionFactorTable& factors,
                                    const std::map<std::string, std::string>& column_map,
                                    IngestStats* stats) {
    const CsvTable table = read_csv(path);
    SeriesColumns columns = read_series_columns(table, path);
    GenerationMixSeries mix;
    for (const std::string& name : columns.names) {
        const auto mapped = column_map.find(name);
        const std::string source = mapped == column_map.end() ? name : mapped->second;
        if (!factors.contains(source))
            throw ValidationError(path + ": column '" + name +
                                  "' does not resolve to a known energy source");
        mix.sources.push_back(source);
    }
    mix.quantities = std::move(columns.rows);
    validate_mix(mix);
    if (stats) {
        stats->rows = mix.quantities.size();
        stats->gaps_filled = columns.gaps_filled;
    }
    return mix;
}

std::vector<double> ingest_onsite(const std::string& path, double scale, IngestStats* stats) {
    const CsvTable table = read_csv(path);
    SeriesColumns columns = read_series_columns(table, path);
    if (columns.names.size() != 1)
        throw ParseError(path + ": expected a single value column, found " +
                         std::to_string(columns.names.size()));
    std::vector<double> available;
    available.reserve(columns.rows.size());
    for (const auto& row : columns.rows) available.push_back(std::max(0.0, scale * row[0]));
    if (stats) {
        stats->rows = available.size();
        stats->gaps_filled = columns.gaps_filled;
    }
    return available;
}

std::vector<double> ingest_prices(const std::string& path, IngestStats* stats) {
    const CsvTable table = read_csv(path);
    SeriesColumns columns = read_series_columns(table, path);
    if (columns.names.size() != 1)
        throw ParseError(path + ": expected a single value column, found " +
                         std::to_string(columns.names.size()));
    if (columns.rows.size() % 24 != 0)
        throw ValidationError(path + ": " + std::to_string(columns.rows.size()) +
                              " hourly rows is not a whole number of days (24 per day)");
    std::vector<double> prices;
    prices.reserve(columns.rows.size() * 4);
    for (const auto& row : columns.rows) {
        const double per_kwh = row[0] / 1000.0;  // currency/MWh -> currency/kWh
        for (int q = 0; q < 4; ++q) prices.push_back(per_kwh);
    }
    if (stats) {
        stats->rows = columns.rows.size();
        stats->gaps_filled = columns.gaps_filled;
    }
    return prices;
}

std::map<std::string, std::string> load_column_map(const std::string& path) {
    std::map<std::string, std::string> map;
    const std::string text = read_text_file(path);
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
            if (blank) continue;
            throw ParseError(path + ": line " + std::to_string(line_no) + " is not 'key = value'");
        }
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        map[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return map;
}

}  // namespace cafs
