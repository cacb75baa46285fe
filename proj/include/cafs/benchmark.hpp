// Benchmark protocol: repeated seeded searches per instance and objective,
// summary statistics (mean, standard deviation, coefficient of variation),
// percentage gaps against a reference method, and the tri-objective cross
// table built from each objective's champion schedule.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cafs/core.hpp"
#include "cafs/evaluator.hpp"
#include "cafs/memetic.hpp"
#include "cafs/milp.hpp"

namespace cafs {

struct RunRecord {
    std::string instance;
    std::string method;  // "ma", "oracle" or "external"
    ObjectiveKind objective = ObjectiveKind::carbon;
    int run = 0;
    double value = 0.0;
    double penalty = 0.0;
    bool feasible = false;
    double seconds = 0.0;
};

extern const char* const kRunsCsvHeader;  // instance,method,objective,run,...
std::string to_csv_row(const RunRecord& record);
RunRecord run_record_from_csv(const std::string& line);

struct Stats {
    int runs = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for fewer than 2 runs
    double cv = 0.0;      // stddev / mean, 0 when mean is not positive
    double mean_seconds = 0.0;
};

Stats compute_stats(const std::vector<double>& values, const std::vector<double>& seconds);

// (reference - candidate) / reference * 100; empty when reference <= 0.
std::optional<double> percentage_gap(double reference_value, double candidate_value);

struct CrossRow {
    ObjectiveKind optimized_for = ObjectiveKind::carbon;
    // champion schedule re-evaluated under each objective; empty when the
    // instance cannot express it (cost without prices)
    std::optional<double> carbon;
    std::optional<double> cost;
    std::optional<double> makespan;

    std::optional<double> cell(ObjectiveKind kind) const;
};

struct InstanceBenchmark {
    std::string label;
    std::vector<RunRecord> records;
    std::vector<CrossRow> cross;  // one row per optimized objective
};

struct BenchmarkReport {
    std::vector<InstanceBenchmark> instances;
};

struct BenchmarkOptions {
    std::vector<ObjectiveKind> objectives{ObjectiveKind::carbon};
    bool run_oracle = false;
    std::string external_results;  // CSV: instance,objective,value,seconds
    std::string reference_method;  // "oracle" or "external"; empty disables gaps
    int runs = 10;
    std::uint64_t seed = 1;
    std::optional<MaParams> params;  // unset: per-instance tuned defaults
    std::optional<double> time_limit_seconds;
    int workers = 1;
    OracleLimits oracle_limits;
};

// Deterministic for a fixed seed, independent of worker count (timings in the
// records are measured wall time and vary run to run).
BenchmarkReport run_benchmark(const std::vector<Instance>& instances,
                              const BenchmarkOptions& options);

// Writes benchmark_runs.csv, benchmark_summary.csv, benchmark_cross.csv,
// benchmark_gaps.csv (when a reference is configured) and a human-readable
// benchmark_summary.txt with dataset aggregates.
void write_benchmark_report(const BenchmarkReport& report, const BenchmarkOptions& options,
                            const std::string& out_dir);

// Seed for one search run; shared by solve and benchmark so their results
// stay comparable.
std::uint64_t run_seed(std::uint64_t master, std::size_t instance_index, ObjectiveKind kind,
                       int run);

}  // namespace cafs
