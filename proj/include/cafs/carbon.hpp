// Grid carbon intensity from generation-mix data, per-operation emission
// matrices, and ingestion of the three energy-data CSV feeds.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "cafs/core.hpp"

namespace cafs {

struct EmissionFactor {
    double min = 0.0;
    double median = 0.0;  // used for all intensity computations
    double max = 0.0;
};

// Lifecycle emission factors per source, gCO2eq/kWh. The default table holds
// the ten standard supply technologies; min/max columns are kept for
// sensitivity runs.
class EmissionFactorTable {
public:
    static EmissionFactorTable defaults();
    EmissionFactorTable() = default;

    void add(const std::string& source, EmissionFactor factor);
    bool contains(const std::string& source) const;
    double median_of(const std::string& source) const;  // throws ValidationError if unknown
    const EmissionFactor& factor_of(const std::string& source) const;
    std::size_t size() const { return entries_.size(); }
    const std::vector<std::pair<std::string, EmissionFactor>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, EmissionFactor>> entries_;
};

// Per-period energy contribution of each source. quantities[t][g] >= 0 and
// every period has a positive total.
struct GenerationMixSeries {
    std::vector<std::string> sources;
    std::vector<std::vector<double>> quantities;  // period-major

    int period_count() const { return static_cast<int>(quantities.size()); }
    // shares w_t = Q_t / sum(Q_t); throws ValidationError on a zero-total period
    std::vector<double> shares(int period) const;
};

void validate_mix(const GenerationMixSeries& mix);

// C_t = sum_g w_t^g * theta_g for every period.
std::vector<double> carbon_intensity(const GenerationMixSeries& mix,
                                     const EmissionFactorTable& factors);

// Feasible start window of operation (job, machine): earliest start honours
// the durations of preceding operations, latest start leaves room for the
// remaining ones within the horizon.
struct StartWindow {
    int earliest = 0;  // S
    int latest = 0;    // F, may be horizon + 1 for a trailing dummy
    int width() const { return latest - earliest + 1; }
};
StartWindow start_window(const Instance& instance, int job, int machine);

// Grid-only emissions (grams) of starting each operation at each feasible
// period, with the per-period energy P * h weighted by C.
struct EmissionMatrix {
    struct Window {
        int first_start = 0;
        std::vector<double> values;  // values[t - first_start]
    };
    int machine_count = 0;
    std::vector<Window> windows;  // job-major

    const Window& window(int job, int machine) const {
        return windows[static_cast<std::size_t>(job * machine_count + machine)];
    }
    double at(int job, int machine, int start_period) const;
};

// Throws ValidationError when some operation has no feasible start.
EmissionMatrix emission_matrix(const Instance& instance);

struct IngestStats {
    std::size_t rows = 0;
    std::size_t gaps_filled = 0;  // cells restored by previous-value carry-forward
};

// CSV feed: timestamp column + one kW column per source, one row per period.
// column_map translates CSV headers to factor-table source names; headers
// already matching a table entry need no mapping.
GenerationMixSeries ingest_grid_mix(const std::string& path, const EmissionFactorTable& factors,
                                    const std::map<std::string, std::string>& column_map,
                                    IngestStats* stats = nullptr);

// CSV feed: timestamp + one kW reading per period. Readings are scaled and
// clipped at zero.
std::vector<double> ingest_onsite(const std::string& path, double scale = 0.005,
                                  IngestStats* stats = nullptr);

// CSV feed: timestamp + one price per hour in currency/MWh. Each hourly price
// is replicated to its four quarter-hour periods and converted to
// currency/kWh. The row count must be a whole number of days.
std::vector<double> ingest_prices(const std::string& path, IngestStats* stats = nullptr);

// key = value lines mapping CSV headers to factor-table source names.
std::map<std::string, std::string> load_column_map(const std::string& path);

}  // namespace cafs
