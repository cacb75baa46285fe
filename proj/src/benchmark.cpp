#include "cafs/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "cafs/csv.hpp"
#include "cafs/serialize.hpp"
#include "cafs/util.hpp"

namespace cafs {

const char* const kRunsCsvHeader = "instance,method,objective,run,value,penalty,feasible,seconds";

std::string to_csv_row(const RunRecord& r) {
    std::string row = r.instance;
    row += ",";
    row += r.method;
    row += ",";
    row += to_string(r.objective);
    row += "," + std::to_string(r.run);
    row += "," + format_double(r.value);
    row += "," + format_double(r.penalty);
    row += r.feasible ? ",true" : ",false";
    row += "," + format_double(r.seconds);
    return row;
}

RunRecord run_record_from_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    if (cells.size() != 8) throw ParseError("run record: expected 8 cells, got " +
                                            std::to_string(cells.size()));
    RunRecord r;
    r.instance = cells[0];
    r.method = cells[1];
    r.objective = objective_from_string(cells[2]);
    r.run = std::stoi(cells[3]);
    r.value = std::stod(cells[4]);
    r.penalty = std::stod(cells[5]);
    r.feasible = cells[6] == "true";
    r.seconds = std::stod(cells[7]);
    return r;
}

Stats compute_stats(const std::vector<double>& values, const std::vector<double>& seconds) {
    Stats stats;
    stats.runs = static_cast<int>(values.size());
    if (values.empty()) return stats;
    double sum = 0.0;
    for (double v : values) sum += v;
    stats.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double squares = 0.0;
        for (double v : values) squares += (v - stats.mean) * (v - stats.mean);
        stats.stddev = std::sqrt(squares / static_cast<double>(values.size() - 1));
    }
    stats.cv = stats.mean > 0.0 ? stats.stddev / stats.mean : 0.0;
    double time_sum = 0.0;
    for (double s : seconds) time_sum += s;
    stats.mean_seconds = seconds.empty() ? 0.0 : time_sum / static_cast<double>(seconds.size());
    return stats;
}

std::optional<double> percentage_gap(double reference_value, double candidate_value) {
    if (reference_value <= 0.0) return std::nullopt;
    return (reference_value - candidate_value) / reference_value * 100.0;
}

std::optional<double> CrossRow::cell(ObjectiveKind kind) const {
    switch (kind) {
        case ObjectiveKind::carbon: return carbon;
        case ObjectiveKind::cost: return cost;
        case ObjectiveKind::makespan: return makespan;
    }
    return std::nullopt;
}

std::uint64_t run_seed(std::uint64_t master, std::size_t instance_index, ObjectiveKind kind,
                       int run) {
    return derive_seed(master, 0xB000 + static_cast<std::uint64_t>(instance_index),
                       (static_cast<std::uint64_t>(kind) << 32) | static_cast<std::uint64_t>(run));
}

namespace {

struct ExternalResult {
    double value = 0.0;
    double seconds = 0.0;
};

std::map<std::pair<std::string, ObjectiveKind>, ExternalResult> load_external_results(
    const std::string& path) {
    std::map<std::pair<std::string, ObjectiveKind>, ExternalResult> results;
    const CsvTable table = read_csv(path);
    const int instance_col = table.column("instance");
    const int objective_col = table.column("objective");
    const int value_col = table.column("value");
    const int seconds_col = table.column("seconds");
    if (instance_col < 0 || objective_col < 0 || value_col < 0)
        throw ParseError(path + ": need columns instance, objective, value");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = path + ": row " + std::to_string(r + 2);
        ExternalResult result;
        result.value = parse_cell(row[static_cast<std::size_t>(value_col)], where).value_or(0.0);
        if (seconds_col >= 0)
            result.seconds =
                parse_cell(row[static_cast<std::size_t>(seconds_col)], where).value_or(0.0);
        results[{row[static_cast<std::size_t>(instance_col)],
                 objective_from_string(row[static_cast<std::size_t>(objective_col)])}] = result;
    }
    return results;
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<Instance>& instances,
                              const BenchmarkOptions& options) {
    using clock = std::chrono::steady_clock;
    std::map<std::pair<std::string, ObjectiveKind>, ExternalResult> external;
    if (!options.external_results.empty())
        external = load_external_results(options.external_results);

    BenchmarkReport report;
    report.instances.resize(instances.size());

    struct Task {
        std::size_t instance_index;
        ObjectiveKind kind;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (ObjectiveKind kind : options.objectives) tasks.push_back({i, kind});

    // champion schedule per (instance, objective): best fitness, lowest run on ties
    std::vector<std::map<ObjectiveKind, Schedule>> champions(instances.size());
    std::vector<std::map<ObjectiveKind, std::vector<RunRecord>>> records(instances.size());
    std::mutex layout_mutex;

    parallel_for(tasks.size(), options.workers, [&](std::size_t task_index) {
        const Task task = tasks[task_index];
        const Instance& inst = instances[task.instance_index];
        MaParams params = options.params ? *options.params : MaParams::defaults_for(inst);
        std::vector<RunRecord> local;
        Schedule champion;
        double champion_fitness = std::numeric_limits<double>::infinity();
        for (int run = 0; run < options.runs; ++run) {
            params.rng_seed = run_seed(options.seed, task.instance_index, task.kind, run);
            const auto started = clock::now();
            const RunResult result = run_memetic(inst, params, task.kind,
                                                 {options.time_limit_seconds, 1});
            const std::chrono::duration<double> elapsed = clock::now() - started;
            RunRecord record;
            record.instance = inst.label;
            record.method = "ma";
            record.objective = task.kind;
            record.run = run;
            record.value = result.best_objective.value;
            record.penalty = result.best_objective.penalty;
            record.feasible = result.best_schedule.feasible;
            record.seconds = elapsed.count();
            local.push_back(std::move(record));
            if (result.best_objective.fitness() < champion_fitness) {
                champion_fitness = result.best_objective.fitness();
                champion = result.best_schedule;
            }
        }
        if (options.run_oracle) {
            const auto started = clock::now();
            const OracleResult oracle =
                exact_oracle(inst, task.kind, options.oracle_limits, 1);
            const std::chrono::duration<double> elapsed = clock::now() - started;
            RunRecord record;
            record.instance = inst.label;
            record.method = "oracle";
            record.objective = task.kind;
            record.run = 0;
            record.value = oracle.objective.value;
            record.penalty = oracle.objective.penalty;
            record.feasible = oracle.schedule.feasible;
            record.seconds = elapsed.count();
            local.push_back(std::move(record));
        }
        const auto ext = external.find({inst.label, task.kind});
        if (ext != external.end()) {
            RunRecord record;
            record.instance = inst.label;
            record.method = "external";
            record.objective = task.kind;
            record.run = 0;
            record.value = ext->second.value;
            record.penalty = 0.0;
            record.feasible = true;
            record.seconds = ext->second.seconds;
            local.push_back(std::move(record));
        }
        std::lock_guard<std::mutex> lock(layout_mutex);
        records[task.instance_index][task.kind] = std::move(local);
        champions[task.instance_index][task.kind] = std::move(champion);
    });

    for (std::size_t i = 0; i < instances.size(); ++i) {
        const Instance& inst = instances[i];
        InstanceBenchmark& bench = report.instances[i];
        bench.label = inst.label;
        for (ObjectiveKind kind : options.objectives) {
            auto& recs = records[i][kind];
            bench.records.insert(bench.records.end(), recs.begin(), recs.end());
            CrossRow row;
            row.optimized_for = kind;
            const Schedule& champion = champions[i][kind];
            row.carbon = evaluate(inst, champion, ObjectiveKind::carbon).value;
            if (inst.prices) row.cost = evaluate(inst, champion, ObjectiveKind::cost).value;
            row.makespan = evaluate(inst, champion, ObjectiveKind::makespan).value;
            bench.cross.push_back(row);
        }
    }
    return report;
}

namespace {

std::string optional_cell(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string();
}

}  // namespace

void write_benchmark_report(const BenchmarkReport& report, const BenchmarkOptions& options,
                            const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::string runs_csv = std::string(kRunsCsvHeader) + "\n";
    for (const InstanceBenchmark& bench : report.instances)
        for (const RunRecord& record : bench.records) runs_csv += to_csv_row(record) + "\n";
    write_text_file((fs::path(out_dir) / "benchmark_runs.csv").string(), runs_csv);

    std::string summary_csv = "instance,method,objective,runs,mean,stddev,cv,mean_seconds\n";
    std::string gaps_csv = "instance,objective,reference,reference_value,ma_mean,gap_pct\n";
    bool any_gap = false;
    for (const InstanceBenchmark& bench : report.instances) {
        for (ObjectiveKind kind : options.objectives) {
            std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> grouped;
            for (const RunRecord& record : bench.records) {
                if (record.objective != kind) continue;
                grouped[record.method].first.push_back(record.value + record.penalty);
                grouped[record.method].second.push_back(record.seconds);
            }
            for (const auto& [method, data] : grouped) {
                const Stats stats = compute_stats(data.first, data.second);
                summary_csv += bench.label;
                summary_csv += ",";
                summary_csv += method;
                summary_csv += ",";
                summary_csv += to_string(kind);
                summary_csv += "," + std::to_string(stats.runs);
                summary_csv += "," + format_double(stats.mean);
                summary_csv += "," + format_double(stats.stddev);
                summary_csv += "," + format_double(stats.cv);
                summary_csv += "," + format_double(stats.mean_seconds) + "\n";
            }
            if (!options.reference_method.empty() && grouped.count(options.reference_method) &&
                grouped.count("ma")) {
                const Stats ref = compute_stats(grouped[options.reference_method].first,
                                                grouped[options.reference_method].second);
                const Stats ma = compute_stats(grouped["ma"].first, grouped["ma"].second);
                const auto gap = percentage_gap(ref.mean, ma.mean);
                gaps_csv += bench.label;
                gaps_csv += ",";
                gaps_csv += to_string(kind);
                gaps_csv += ",";
                gaps_csv += options.reference_method;
                gaps_csv += "," + format_double(ref.mean);
                gaps_csv += "," + format_double(ma.mean);
                gaps_csv += "," + (gap ? format_double(*gap) : std::string()) + "\n";
                any_gap = true;
            }
        }
    }
    write_text_file((fs::path(out_dir) / "benchmark_summary.csv").string(), summary_csv);
    if (any_gap) write_text_file((fs::path(out_dir) / "benchmark_gaps.csv").string(), gaps_csv);

    std::string cross_csv = "instance,optimized_for,carbon,cost,makespan\n";
    for (const InstanceBenchmark& bench : report.instances) {
        for (const CrossRow& row : bench.cross) {
            cross_csv += bench.label;
            cross_csv += ",";
            cross_csv += to_string(row.optimized_for);
            cross_csv += "," + optional_cell(row.carbon);
            cross_csv += "," + optional_cell(row.cost);
            cross_csv += "," + optional_cell(row.makespan) + "\n";
        }
    }
    write_text_file((fs::path(out_dir) / "benchmark_cross.csv").string(), cross_csv);

    // human-readable aggregate: per-objective method means and the dataset
    // cross table with relative values against each column's best row
    std::ostringstream txt;
    txt << "benchmark over " << report.instances.size() << " instances, " << options.runs
        << " runs per objective\n\n";
    for (ObjectiveKind kind : options.objectives) {
        txt << "objective " << to_string(kind) << ":\n";
        std::map<std::string, std::vector<double>> method_means;
        for (const InstanceBenchmark& bench : report.instances) {
            std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> grouped;
            for (const RunRecord& record : bench.records)
                if (record.objective == kind) {
                    grouped[record.method].first.push_back(record.value + record.penalty);
                    grouped[record.method].second.push_back(record.seconds);
                }
            for (const auto& [method, data] : grouped)
                method_means[method].push_back(compute_stats(data.first, data.second).mean);
        }
        for (const auto& [method, means] : method_means) {
            const Stats aggregate = compute_stats(means, {});
            txt << "  " << method << ": mean of per-instance means = "
                << format_double(aggregate.mean) << "\n";
        }
        txt << "\n";
    }

    if (!report.instances.empty() && !report.instances.front().cross.empty()) {
        txt << "cross table (dataset mean per cell, relative % above column best):\n";
        const std::vector<ObjectiveKind> columns{ObjectiveKind::carbon, ObjectiveKind::cost,
                                                 ObjectiveKind::makespan};
        std::map<ObjectiveKind, std::map<ObjectiveKind, std::pair<double, int>>> cells;
        for (const InstanceBenchmark& bench : report.instances)
            for (const CrossRow& row : bench.cross)
                for (ObjectiveKind column : columns)
                    if (const auto v = row.cell(column)) {
                        cells[row.optimized_for][column].first += *v;
                        cells[row.optimized_for][column].second += 1;
                    }
        std::map<ObjectiveKind, double> column_best;
        for (const auto& [row_kind, row_cells] : cells)
            for (const auto& [column, sum_count] : row_cells) {
                const double mean = sum_count.first / sum_count.second;
                if (!column_best.count(column) || mean < column_best[column])
                    column_best[column] = mean;
            }
        for (const auto& [row_kind, row_cells] : cells) {
            txt << "  " << to_string(row_kind) << "-min:";
            for (ObjectiveKind column : columns) {
                if (!row_cells.count(column)) continue;
                const auto& sum_count = row_cells.at(column);
                const double mean = sum_count.first / sum_count.second;
                const double best = column_best[column];
                txt << "  " << to_string(column) << "=" << format_double(mean);
                if (best > 0.0)
                    txt << " (+" << format_double((mean - best) / best * 100.0) << "%)";
            }
            txt << "\n";
        }
    }
    write_text_file((fs::path(out_dir) / "benchmark_summary.txt").string(), txt.str());
}

}  // namespace cafs
