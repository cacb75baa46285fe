// Benchmark instance generation: an operation pool sampled from discrete
// uniform distributions, feasibility-checked job assembly, and energy-data
// windows sliced from a year of historical (or synthetic) series.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cafs/core.hpp"
#include "cafs/util.hpp"

namespace cafs {

struct GenConfig {
    int machines = 1;
    int horizon = 96;  // periods
    int instance_count = 50;
    int pool_size = 2000;
    int duration_min = 2;  // {2,16} single-machine, {0,8} multi-machine
    int duration_max = 16;
    int base_power_min = 100;  // kW
    int base_power_max = 3000;
    int jitter_min = -250;  // kW, added per period
    int jitter_max = 250;
    std::uint64_t rng_seed = 1;
    int max_consecutive_rejects = 1000;
    std::string label_prefix = "inst";

    void validate() const;

    // duration bounds per machine count: {2,16} for one machine, {0,8} otherwise
    static GenConfig for_machines(int machines, int horizon);
};

// Year-long (or longer) per-period series the generator slices windows from.
struct EnergyData {
    double period_hours = 0.25;
    std::vector<double> carbon;  // gCO2eq/kWh
    std::vector<double> onsite;  // kW
    std::vector<double> prices;  // currency/kWh, may be empty

    int periods_per_day() const { return static_cast<int>(std::lround(24.0 / period_hours)); }
    int day_count() const { return static_cast<int>(carbon.size()) / periods_per_day(); }
};

// A deterministic stand-in for historical feeds: 365 days of generation-mix
// shares run through the emission-factor table, a solar-shaped on-site
// profile, and hourly day-ahead prices.
EnergyData synthetic_energy_year(std::uint64_t seed, double period_hours = 0.25);

// pool_size operations; duration ~ U{lo,hi}, per-period power
// max(0, base + jitter) with base ~ U{base_lo,base_hi} per operation and
// jitter ~ U{jitter_lo,jitter_hi} per period.
std::vector<OperationSpec> build_operation_pool(const GenConfig& config, Rng& rng);

// Draws jobs from the pool while the FCFS makespan with the candidate stays
// strictly below the horizon, then attaches an energy window starting at a
// uniformly drawn day (wrapping past year end). Instances use per-index rng
// substreams, so output is independent of generation order.
std::vector<Instance> generate_dataset(const GenConfig& config,
                                       std::span<const OperationSpec> pool,
                                       const EnergyData& historical);

struct InstanceStats {
    std::string file;
    int jobs = 0;
    int operations = 0;  // non-dummy
    std::vector<int> slack;  // per machine
};

// Writes one instance file per entry plus manifest.json (config echo, seed,
// per-instance stats, aggregate min/median/max). Returns the manifest path.
std::string write_dataset(const std::vector<Instance>& instances, const GenConfig& config,
                          const std::string& directory);

}  // namespace cafs
