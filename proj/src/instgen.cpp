#include "cafs/instgen.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include <json.hpp>

#include "cafs/carbon.hpp"
#include "cafs/serialize.hpp"

namespace cafs {

void GenConfig::validate() const {
    if (machines < 1) throw ValidationError("machines: must be >= 1");
    if (horizon < 1) throw ValidationError("horizon: must be >= 1");
    if (instance_count < 1) throw ValidationError("instance_count: must be >= 1");
    if (pool_size < 1) throw ValidationError("pool_size: must be >= 1");
    if (duration_min < 0 || duration_min > duration_max)
        throw ValidationError("duration bounds: need 0 <= min <= max");
    if (base_power_min <= 0 || base_power_min > base_power_max)
        throw ValidationError("base power bounds: need 0 < min <= max");
    if (jitter_min > jitter_max) throw ValidationError("jitter bounds: need min <= max");
    if (max_consecutive_rejects < 1)
        throw ValidationError("max_consecutive_rejects: must be >= 1");
}

GenConfig GenConfig::for_machines(int machines, int horizon) {
    GenConfig config;
    config.machines = machines;
    config.horizon = horizon;
    if (machines == 1) {
        config.duration_min = 2;
        config.duration_max = 16;
    } else {
        config.duration_min = 0;
        config.duration_max = 8;
    }
    return config;
}

EnergyData synthetic_energy_year(std::uint64_t seed, double period_hours) {
    EnergyData data;
    data.period_hours = period_hours;
    const int per_day = data.periods_per_day();
    const int periods = 365 * per_day;
    Rng rng(derive_seed(seed, 0xE17A, 0));
    std::normal_distribution<double> noise(0.0, 1.0);

    // a compact generation park: nuclear base load, gas following demand,
    // wind varying over days, solar by daylight
    GenerationMixSeries mix;
    mix.sources = {"nuclear", "gas-cc", "wind-onshore", "solar-pv", "hydro"};
    mix.quantities.reserve(static_cast<std::size_t>(periods));
    std::vector<double> onsite;
    onsite.reserve(static_cast<std::size_t>(periods));
    std::vector<double> gas_share;
    gas_share.reserve(static_cast<std::size_t>(periods));

    double wind_level = 1.0;
    for (int t = 0; t < periods; ++t) {
        const int day = t / per_day;
        const double hour = (t % per_day) * period_hours;
        const double season = std::sin(2.0 * std::acos(-1.0) * day / 365.0);
        if (t % per_day == 0)
            wind_level = std::clamp(wind_level + 0.35 * noise(rng), 0.2, 2.2);
        const double daylight =
            std::max(0.0, std::sin(std::acos(-1.0) * (hour - 6.0) / 13.0));
        const double demand_shape =
            1.0 + 0.25 * std::sin(std::acos(-1.0) * (hour - 7.0) / 12.0);

        const double nuclear = 3900.0;
        const double wind = 1400.0 * wind_level * (1.0 + 0.05 * noise(rng));
        const double solar = 2600.0 * daylight * (1.0 - 0.25 * season) *
                             std::max(0.0, 1.0 + 0.1 * noise(rng));
        const double hydro = 280.0;
        const double gas = std::max(
            250.0, 7600.0 * demand_shape - nuclear - wind - solar - hydro + 220.0 * noise(rng));
        mix.quantities.push_back({nuclear, gas, std::max(0.0, wind), solar, hydro});
        gas_share.push_back(gas / (nuclear + gas + std::max(0.0, wind) + solar + hydro));

        // plant-scale solar with its own weather
        onsite.push_back(std::max(
            0.0, 2400.0 * daylight * (1.0 - 0.2 * season) * (1.0 + 0.15 * noise(rng))));
    }
    data.carbon = carbon_intensity(mix, EmissionFactorTable::defaults());
    data.onsite = std::move(onsite);

    // hourly day-ahead prices tracking the gas share, replicated per period
    data.prices.reserve(static_cast<std::size_t>(periods));
    const int per_hour = std::max(1, static_cast<int>(std::lround(1.0 / period_hours)));
    double hourly_price = 0.0;
    for (int t = 0; t < periods; ++t) {
        if (t % per_hour == 0)
            hourly_price = std::max(
                0.01, 0.045 + 0.16 * gas_share[static_cast<std::size_t>(t)] + 0.012 * noise(rng));
        data.prices.push_back(hourly_price);
    }
    return data;
}

std::vector<OperationSpec> build_operation_pool(const GenConfig& config, Rng& rng) {
    config.validate();
    std::uniform_int_distribution<int> duration(config.duration_min, config.duration_max);
    std::uniform_int_distribution<int> base(config.base_power_min, config.base_power_max);
    std::uniform_int_distribution<int> jitter(config.jitter_min, config.jitter_max);
    std::vector<OperationSpec> pool;
    pool.reserve(static_cast<std::size_t>(config.pool_size));
    for (int o = 0; o < config.pool_size; ++o) {
        OperationSpec op;
        op.duration = duration(rng);
        const int base_power = base(rng);
        op.power.reserve(static_cast<std::size_t>(op.duration));
        for (int k = 0; k < op.duration; ++k)
            op.power.push_back(std::max(0, base_power + jitter(rng)));
        pool.push_back(std::move(op));
    }
    return pool;
}

namespace {

Instance generate_instance(const GenConfig& config, std::span<const OperationSpec> pool,
                           const EnergyData& historical, std::uint64_t seed, int index) {
    Rng rng(derive_seed(seed, 0x9E22, static_cast<std::uint64_t>(index)));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);

    Instance inst;
    inst.machines = config.machines;
    inst.horizon = config.horizon;
    inst.period_hours = historical.period_hours;

    int makespan = 0;
    int rejects = 0;
    while (makespan < config.horizon && rejects < config.max_consecutive_rejects) {
        Job candidate;
        bool vacuous = true;
        for (int m = 0; m < config.machines; ++m) {
            const OperationSpec& op = pool[static_cast<std::size_t>(pick(rng))];
            if (op.duration > 0) vacuous = false;
            candidate.operations.push_back(op);
        }
        if (vacuous) {  // a job skipping every machine carries no work
            ++rejects;
            continue;
        }
        inst.jobs.push_back(candidate);
        const Schedule trial = fcfs_schedule(inst);
        if (trial.completion < config.horizon) {
            makespan = trial.completion;
            rejects = 0;
        } else {
            inst.jobs.pop_back();
            ++rejects;
        }
    }
    if (inst.jobs.empty())
        throw ValidationError("instance " + std::to_string(index + 1) +
                              ": no job fits the horizon after " +
                              std::to_string(config.max_consecutive_rejects) + " draws");

    std::uniform_int_distribution<int> day(1, 365);
    const int start = (day(rng) - 1) * historical.periods_per_day();
    const int span = static_cast<int>(historical.carbon.size());
    auto slice = [&](const std::vector<double>& series) {
        std::vector<double> window(static_cast<std::size_t>(config.horizon));
        for (int t = 0; t < config.horizon; ++t)
            window[static_cast<std::size_t>(t)] =
                series[static_cast<std::size_t>((start + t) % span)];
        return window;
    };
    inst.carbon_intensity = slice(historical.carbon);
    inst.onsite_available = slice(historical.onsite);
    if (!historical.prices.empty()) inst.prices = slice(historical.prices);

    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%03d", index + 1);
    inst.label = config.label_prefix + "_" + suffix;
    return inst;
}

}  // namespace

std::vector<Instance> generate_dataset(const GenConfig& config,
                                       std::span<const OperationSpec> pool,
                                       const EnergyData& historical) {
    config.validate();
    if (pool.empty()) throw ValidationError("operation pool is empty");
    if (historical.day_count() < 365)
        throw ValidationError("historical series cover " + std::to_string(historical.day_count()) +
                              " days; at least 365 required");
    if (!historical.prices.empty() && historical.prices.size() != historical.carbon.size())
        throw ValidationError("prices series length differs from carbon series");
    if (historical.onsite.size() != historical.carbon.size())
        throw ValidationError("onsite series length differs from carbon series");

    std::vector<Instance> instances;
    instances.reserve(static_cast<std::size_t>(config.instance_count));
    for (int i = 0; i < config.instance_count; ++i) {
        Instance inst = generate_instance(config, pool, historical, config.rng_seed, i);
        validate_instance(inst);
        instances.push_back(std::move(inst));
    }
    return instances;
}

std::string write_dataset(const std::vector<Instance>& instances, const GenConfig& config,
                          const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    nlohmann::json manifest;
    manifest["config"] = {{"machines", config.machines},
                          {"horizon", config.horizon},
                          {"instance_count", config.instance_count},
                          {"pool_size", config.pool_size},
                          {"duration_min", config.duration_min},
                          {"duration_max", config.duration_max},
                          {"base_power_min", config.base_power_min},
                          {"base_power_max", config.base_power_max},
                          {"jitter_min", config.jitter_min},
                          {"jitter_max", config.jitter_max},
                          {"label_prefix", config.label_prefix}};
    manifest["seed"] = config.rng_seed;

    nlohmann::json rows = nlohmann::json::array();
    std::vector<int> all_operations;
    std::vector<int> all_slack;
    for (const Instance& inst : instances) {
        const std::string file = inst.label + ".json";
        save_instance(inst, (fs::path(directory) / file).string());
        int operations = 0;
        for (const Job& job : inst.jobs)
            for (const OperationSpec& op : job.operations)
                if (op.duration > 0) ++operations;
        std::vector<int> slack;
        for (int m = 0; m < inst.machines; ++m) {
            int busy = 0;
            for (int i = 0; i < inst.job_count(); ++i) busy += inst.op(i, m).duration;
            slack.push_back(inst.horizon - busy);
            all_slack.push_back(inst.horizon - busy);
        }
        all_operations.push_back(operations);
        rows.push_back({{"file", file},
                        {"jobs", inst.job_count()},
                        {"operations", operations},
                        {"slack", slack}});
    }
    manifest["instances"] = std::move(rows);

    auto min_median_max = [](std::vector<int> values) {
        std::sort(values.begin(), values.end());
        return nlohmann::json{{"min", values.front()},
                              {"median", values[values.size() / 2]},
                              {"max", values.back()}};
    };
    manifest["summary"] = {{"operations", min_median_max(all_operations)},
                           {"slack", min_median_max(all_slack)}};

    const std::string path = (fs::path(directory) / "manifest.json").string();
    write_text_file(path, manifest.dump(1) + "\n");
    return path;
}

}  // namespace cafs
