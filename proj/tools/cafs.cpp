// Command-line surface: dataset generation, solving, exact oracle runs,
// model export, schedule evaluation and benchmarking.
#include <chrono>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "cafs/benchmark.hpp"
#include "cafs/carbon.hpp"
#include "cafs/core.hpp"
#include "cafs/evaluator.hpp"
#include "cafs/instgen.hpp"
#include "cafs/memetic.hpp"
#include "cafs/milp.hpp"
#include "cafs/serialize.hpp"
#include "cafs/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
    std::uint64_t seed = 1;
    std::string out;
    std::string params;
    int jobs = 1;
    double time_limit = 0.0;  // seconds, 0 = none
};

void add_common(CLI::App* cmd, CommonOptions& common, bool with_params = true) {
    cmd->add_option("--seed", common.seed, "master random seed")->capture_default_str();
    cmd->add_option("--out", common.out, "output directory")->required();
    cmd->add_option("--jobs", common.jobs, "worker threads")->capture_default_str();
    cmd->add_option("--time-limit", common.time_limit, "wall-time budget per search run, seconds");
    if (with_params)
        cmd->add_option("--params", common.params,
                        "parameter profile (m1t1, m1t3, m3t1, m3t3) or key=value file; "
                        "default picks the profile matching the instance shape");
}

std::optional<double> time_limit_of(const CommonOptions& common) {
    if (common.time_limit > 0.0) return common.time_limit;
    return std::nullopt;
}

cafs::MaParams resolve_params(const std::string& spec, const cafs::Instance& inst) {
    if (spec.empty()) return cafs::MaParams::defaults_for(inst);
    for (const char* name : {"m1t1", "m1t3", "m3t1", "m3t3"})
        if (spec == name) return cafs::MaParams::profile(spec);
    return cafs::MaParams::load(spec);
}

std::vector<std::string> dataset_files(const std::string& directory) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() == ".json" && name != "manifest.json")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw cafs::ValidationError("no instance files found in " + directory);
    return files;
}

std::vector<cafs::Instance> load_instances(const std::vector<std::string>& instance_paths,
                                           const std::string& dataset_dir) {
    std::vector<std::string> paths = instance_paths;
    if (!dataset_dir.empty()) {
        const auto found = dataset_files(dataset_dir);
        paths.insert(paths.end(), found.begin(), found.end());
    }
    if (paths.empty())
        throw cafs::ValidationError("no instances given; use --instance or --dataset");
    std::vector<cafs::Instance> instances;
    for (const std::string& path : paths) {
        std::vector<std::string> warnings;
        instances.push_back(cafs::load_instance(path, &warnings));
        for (const std::string& w : warnings)
            std::cerr << "warning: " << path << ": " << w << "\n";
    }
    return instances;
}

json plot_document(const cafs::Instance& inst, const cafs::Schedule& sched,
                   cafs::ObjectiveKind kind, int run, double fitness) {
    json gantt = json::array();
    for (int p = 0; p < inst.job_count(); ++p) {
        const int job = sched.sequence[static_cast<std::size_t>(p)];
        for (int m = 0; m < inst.machines; ++m) {
            const cafs::OperationSpec& op = inst.op(job, m);
            if (op.duration == 0) continue;
            gantt.push_back({{"job", job + 1},
                             {"machine", m + 1},
                             {"start", sched.start_at(job, m)},
                             {"duration", op.duration}});
        }
    }
    const cafs::DemandProfile profile = cafs::demand_profile(inst, sched);
    return json{{"instance", inst.label},
                {"objective", cafs::to_string(kind)},
                {"run", run},
                {"fitness", fitness},
                {"period_hours", inst.period_hours},
                {"gantt", std::move(gantt)},
                {"power_profile",
                 {{"demand", profile.demand},
                  {"onsite_used", profile.onsite_used},
                  {"grid_draw", profile.grid_draw},
                  {"carbon_intensity", inst.carbon_intensity}}}};
}

std::string history_csv(const std::vector<cafs::GenerationStat>& history) {
    std::string csv = "generation,best_fitness,mean_fitness\n";
    for (const cafs::GenerationStat& stat : history)
        csv += std::to_string(stat.generation) + "," + cafs::format_double(stat.best_fitness) +
               "," + cafs::format_double(stat.mean_fitness) + "\n";
    return csv;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const CommonOptions& common, int machines, int horizon, int count,
                 const std::string& label, bool synthetic, const std::string& carbon_csv,
                 const std::string& column_map_path, const std::string& onsite_csv,
                 const std::string& prices_csv, double onsite_scale, int pool_size,
                 int duration_min, int duration_max, double period_hours) {
    cafs::GenConfig config = cafs::GenConfig::for_machines(machines, horizon);
    config.instance_count = count;
    config.rng_seed = common.seed;
    config.label_prefix = label;
    if (pool_size > 0) config.pool_size = pool_size;
    if (duration_min >= 0) config.duration_min = duration_min;
    if (duration_max >= 0) config.duration_max = duration_max;

    cafs::EnergyData energy;
    if (synthetic) {
        energy = cafs::synthetic_energy_year(common.seed, period_hours);
    } else {
        if (carbon_csv.empty() || onsite_csv.empty())
            throw CLI::ValidationError(
                "--carbon-csv/--onsite-csv",
                "required unless --synthetic is given");
        energy.period_hours = period_hours;
        std::map<std::string, std::string> column_map;
        if (!column_map_path.empty()) column_map = cafs::load_column_map(column_map_path);
        cafs::IngestStats mix_stats, onsite_stats;
        const cafs::GenerationMixSeries mix = cafs::ingest_grid_mix(
            carbon_csv, cafs::EmissionFactorTable::defaults(), column_map, &mix_stats);
        energy.carbon = cafs::carbon_intensity(mix, cafs::EmissionFactorTable::defaults());
        energy.onsite = cafs::ingest_onsite(onsite_csv, onsite_scale, &onsite_stats);
        if (mix_stats.gaps_filled + onsite_stats.gaps_filled > 0)
            std::cerr << "warning: carried forward " << mix_stats.gaps_filled << " mix and "
                      << onsite_stats.gaps_filled << " on-site cells\n";
        if (!prices_csv.empty()) energy.prices = cafs::ingest_prices(prices_csv);
    }

    cafs::Rng pool_rng(cafs::derive_seed(common.seed, 0x3001, 0));
    const std::vector<cafs::OperationSpec> pool = cafs::build_operation_pool(config, pool_rng);
    const std::vector<cafs::Instance> instances = cafs::generate_dataset(config, pool, energy);
    const std::string manifest_path = cafs::write_dataset(instances, config, common.out);

    const json manifest = json::parse(cafs::read_text_file(manifest_path));
    std::cout << "wrote " << instances.size() << " instances to " << common.out << "\n"
              << "operations per instance (min/median/max): "
              << manifest["summary"]["operations"]["min"] << "/"
              << manifest["summary"]["operations"]["median"] << "/"
              << manifest["summary"]["operations"]["max"] << "\n"
              << "slack per machine (min/median/max): " << manifest["summary"]["slack"]["min"]
              << "/" << manifest["summary"]["slack"]["median"] << "/"
              << manifest["summary"]["slack"]["max"] << "\n";
    return 0;
}

// ------------------------------------------------------------------- solve

int cmd_solve(const CommonOptions& common, const std::vector<std::string>& instance_paths,
              const std::string& dataset_dir, const std::string& objective_name, int runs,
              bool emit_plot, bool emit_history) {
    using clock = std::chrono::steady_clock;
    const cafs::ObjectiveKind kind = cafs::objective_from_string(objective_name);
    const std::vector<cafs::Instance> instances = load_instances(instance_paths, dataset_dir);
    fs::create_directories(common.out);

    struct Slot {
        cafs::RunRecord record;
        cafs::Schedule schedule;
        std::vector<cafs::GenerationStat> history;
    };
    std::vector<std::vector<Slot>> slots(instances.size(),
                                         std::vector<Slot>(static_cast<std::size_t>(runs)));
    struct Task {
        std::size_t instance_index;
        int run;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (int r = 0; r < runs; ++r) tasks.push_back({i, r});

    cafs::parallel_for(tasks.size(), common.jobs, [&](std::size_t t) {
        const Task task = tasks[t];
        const cafs::Instance& inst = instances[task.instance_index];
        cafs::MaParams params = resolve_params(common.params, inst);
        params.rng_seed = cafs::run_seed(common.seed, task.instance_index, kind, task.run);
        const auto started = clock::now();
        cafs::RunResult result = cafs::run_memetic(inst, params, kind, {time_limit_of(common), 1});
        const std::chrono::duration<double> elapsed = clock::now() - started;
        Slot& slot = slots[task.instance_index][static_cast<std::size_t>(task.run)];
        slot.record = {inst.label,
                       "ma",
                       kind,
                       task.run,
                       result.best_objective.value,
                       result.best_objective.penalty,
                       result.best_schedule.feasible,
                       elapsed.count()};
        slot.schedule = std::move(result.best_schedule);
        slot.history = std::move(result.history);
    });

    std::string csv = "instance,run,objective,value,penalty,feasible,seconds\n";
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const cafs::Instance& inst = instances[i];
        int best_run = 0;
        double best_fitness = std::numeric_limits<double>::infinity();
        for (int r = 0; r < runs; ++r) {
            const Slot& slot = slots[i][static_cast<std::size_t>(r)];
            csv += inst.label;
            csv += "," + std::to_string(r);
            csv += ",";
            csv += cafs::to_string(kind);
            csv += "," + cafs::format_double(slot.record.value);
            csv += "," + cafs::format_double(slot.record.penalty);
            csv += slot.record.feasible ? ",true" : ",false";
            csv += "," + cafs::format_double(slot.record.seconds) + "\n";
            const double fitness = slot.record.value + slot.record.penalty;
            if (fitness < best_fitness) {
                best_fitness = fitness;
                best_run = r;
            }
            if (emit_history)
                cafs::write_text_file(
                    (fs::path(common.out) / ("history_" + inst.label + "_r" + std::to_string(r) + ".csv"))
                        .string(),
                    history_csv(slot.history));
        }
        const Slot& best = slots[i][static_cast<std::size_t>(best_run)];
        cafs::save_schedule(best.schedule,
                            (fs::path(common.out) / ("best_" + inst.label + ".json")).string());
        if (emit_plot) {
            const json doc = plot_document(inst, best.schedule, kind, best_run, best_fitness);
            cafs::write_text_file((fs::path(common.out) / ("plot_" + inst.label + ".json")).string(),
                                  doc.dump(1) + "\n");
        }
        std::cout << inst.label << ": best " << cafs::to_string(kind) << " fitness "
                  << cafs::format_double(best_fitness) << " (run " << best_run << ")\n";
    }
    cafs::write_text_file((fs::path(common.out) / "runs.csv").string(), csv);
    return 0;
}

// ------------------------------------------------------------------ oracle

int cmd_oracle(const CommonOptions& common, const std::string& instance_path,
               const std::string& objective_name, unsigned long long budget) {
    const cafs::ObjectiveKind kind = cafs::objective_from_string(objective_name);
    const cafs::Instance inst = cafs::load_instance(instance_path);
    cafs::OracleLimits limits;
    if (budget > 0) limits.budget = budget;
    const cafs::OracleResult result = cafs::exact_oracle(inst, kind, limits, common.jobs);
    fs::create_directories(common.out);
    const std::string path =
        (fs::path(common.out) / ("oracle_" + inst.label + ".json")).string();
    cafs::save_schedule(result.schedule, path,
                        "enumerated=" + std::to_string(result.enumerated));
    std::cout << inst.label << ": optimal " << cafs::to_string(kind) << " value "
              << cafs::format_double(result.objective.value) << " (enumerated "
              << result.enumerated << " schedules)\n";
    return 0;
}

// ------------------------------------------------------------- export-milp

int cmd_export_milp(const CommonOptions& common, const std::string& instance_path) {
    const cafs::Instance inst = cafs::load_instance(instance_path);
    const cafs::MilpModel model = cafs::build_milp(inst);
    fs::create_directories(common.out);
    const std::string path = (fs::path(common.out) / (inst.label + ".lp")).string();
    cafs::export_lp(model, path);
    std::cout << inst.label << ": " << model.x_count << " start indicators, " << model.s_count
              << " sequencing binaries, " << model.y_count << " on-site variables, "
              << model.tau_count << " start periods, " << model.p_count
              << " power variables -> " << path << "\n";
    return 0;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const std::string& instance_path, const std::string& schedule_path,
                 const std::string& objective_name, const std::string& out) {
    const cafs::ObjectiveKind kind = cafs::objective_from_string(objective_name);
    const cafs::Instance inst = cafs::load_instance(instance_path);
    cafs::Schedule sched = cafs::load_schedule(schedule_path);
    cafs::check_schedule(inst, sched);
    const cafs::Objective objective = cafs::evaluate(inst, sched, kind);
    std::string row = inst.label;
    row += ",";
    row += cafs::to_string(kind);
    row += "," + cafs::format_double(objective.value);
    row += "," + cafs::format_double(objective.penalty);
    row += sched.feasible ? ",true" : ",false";
    std::cout << "instance,objective,value,penalty,feasible\n" << row << "\n";
    if (!out.empty()) {
        fs::create_directories(out);
        cafs::write_text_file((fs::path(out) / "evaluation.csv").string(),
                              "instance,objective,value,penalty,feasible\n" + row + "\n");
    }
    return 0;
}

// --------------------------------------------------------------- benchmark

int cmd_benchmark(const CommonOptions& common, const std::string& dataset_dir,
                  const std::vector<std::string>& objective_names,
                  const std::vector<std::string>& methods, const std::string& external_csv,
                  const std::string& reference, int runs, unsigned long long budget) {
    cafs::BenchmarkOptions options;
    options.objectives.clear();
    for (const std::string& name : objective_names)
        options.objectives.push_back(cafs::objective_from_string(name));
    bool want_ma = false;
    for (const std::string& method : methods) {
        if (method == "ma") want_ma = true;
        else if (method == "oracle") options.run_oracle = true;
        else if (method == "external") {
            if (external_csv.empty())
                throw CLI::ValidationError("--external", "method 'external' needs a results CSV");
        } else {
            throw CLI::ValidationError("--methods", "unknown method '" + method + "'");
        }
    }
    if (!want_ma)
        throw CLI::ValidationError("--methods", "the 'ma' method is required");
    options.external_results = external_csv;
    options.reference_method = reference;
    if (!reference.empty() && reference != "oracle" && reference != "external")
        throw CLI::ValidationError("--reference", "must be 'oracle' or 'external'");
    if (reference == "oracle" && !options.run_oracle)
        throw CLI::ValidationError("--reference", "oracle reference needs --methods oracle");
    if (reference == "external" && external_csv.empty())
        throw CLI::ValidationError("--reference", "external reference needs --external");
    options.runs = runs;
    options.seed = common.seed;
    options.workers = common.jobs;
    options.time_limit_seconds = time_limit_of(common);
    if (budget > 0) options.oracle_limits.budget = budget;
    if (!common.params.empty()) {
        // a fixed profile/file overrides the per-instance default selection
        cafs::Instance probe;  // parameters do not depend on the instance here
        probe.machines = 1;
        probe.horizon = 96;
        options.params = resolve_params(common.params, probe);
    }

    const std::vector<cafs::Instance> instances = load_instances({}, dataset_dir);
    const cafs::BenchmarkReport report = cafs::run_benchmark(instances, options);
    cafs::write_benchmark_report(report, options, common.out);
    std::cout << "benchmarked " << instances.size() << " instances; reports in " << common.out
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"carbon-aware permutation flow-shop scheduling toolkit"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "generate a benchmark instance dataset");
    CommonOptions generate_common;
    int machines = 1, horizon = 96, count = 50;
    std::string label = "inst";
    bool synthetic = false;
    std::string carbon_csv, column_map_path, onsite_csv, prices_csv;
    double onsite_scale = 0.005, period_hours = 0.25;
    int pool_size = 0, duration_min = -1, duration_max = -1;
    add_common(generate, generate_common, false);
    generate->add_option("--machines", machines, "machine count")->capture_default_str();
    generate->add_option("--horizon", horizon, "periods in the planning horizon")->capture_default_str();
    generate->add_option("--count", count, "instances to generate")->capture_default_str();
    generate->add_option("--label", label, "instance label prefix")->capture_default_str();
    generate->add_flag("--synthetic", synthetic, "use the built-in synthetic energy year");
    generate->add_option("--carbon-csv", carbon_csv, "generation-mix CSV (timestamp + per-source kW)");
    generate->add_option("--column-map", column_map_path, "key=value file mapping CSV headers to sources");
    generate->add_option("--onsite-csv", onsite_csv, "on-site generation CSV (timestamp + kW)");
    generate->add_option("--prices-csv", prices_csv, "day-ahead prices CSV (timestamp + currency/MWh)");
    generate->add_option("--onsite-scale", onsite_scale, "scale factor for on-site readings")->capture_default_str();
    generate->add_option("--period-hours", period_hours, "hours per period")->capture_default_str();
    generate->add_option("--pool-size", pool_size, "operation pool size (default 2000)");
    generate->add_option("--duration-min", duration_min, "override duration lower bound");
    generate->add_option("--duration-max", duration_max, "override duration upper bound");

    // solve
    auto* solve = app.add_subcommand("solve", "search schedules with the memetic algorithm");
    CommonOptions solve_common;
    std::vector<std::string> solve_instances;
    std::string solve_dataset, solve_objective = "carbon";
    int solve_runs = 10;
    bool emit_plot = false, emit_history = false;
    add_common(solve, solve_common);
    solve->add_option("--instance", solve_instances, "instance file(s)");
    solve->add_option("--dataset", solve_dataset, "directory of instance files");
    solve->add_option("--objective", solve_objective, "carbon | cost | makespan")->capture_default_str();
    solve->add_option("--runs", solve_runs, "independent seeded runs per instance")->capture_default_str();
    solve->add_flag("--emit-plot", emit_plot, "write per-instance Gantt / power-profile documents");
    solve->add_flag("--emit-history", emit_history, "write per-run convergence CSVs");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exhaustively solve a tiny instance");
    CommonOptions oracle_common;
    std::string oracle_instance, oracle_objective = "carbon";
    unsigned long long oracle_budget = 0;
    add_common(oracle, oracle_common, false);
    oracle->add_option("--instance", oracle_instance, "instance file")->required();
    oracle->add_option("--objective", oracle_objective, "carbon | cost | makespan")->capture_default_str();
    oracle->add_option("--budget", oracle_budget, "multi-machine enumeration budget");

    // export-milp
    auto* export_milp = app.add_subcommand("export-milp", "write the exact model in LP format");
    CommonOptions export_common;
    std::string export_instance;
    add_common(export_milp, export_common, false);
    export_milp->add_option("--instance", export_instance, "instance file")->required();

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate a schedule document");
    std::string eval_instance, eval_schedule, eval_objective = "carbon", eval_out;
    evaluate_cmd->add_option("--instance", eval_instance, "instance file")->required();
    evaluate_cmd->add_option("--schedule", eval_schedule, "schedule document")->required();
    evaluate_cmd->add_option("--objective", eval_objective, "carbon | cost | makespan")->capture_default_str();
    evaluate_cmd->add_option("--out", eval_out, "optional output directory");

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark", "run the full comparison protocol");
    CommonOptions benchmark_common;
    std::string benchmark_dataset, external_csv, reference;
    std::vector<std::string> benchmark_objectives{"carbon"};
    std::vector<std::string> benchmark_methods{"ma"};
    int benchmark_runs = 10;
    unsigned long long benchmark_budget = 0;
    add_common(benchmark, benchmark_common);
    benchmark->add_option("--dataset", benchmark_dataset, "directory of instance files")->required();
    benchmark->add_option("--objectives", benchmark_objectives, "objectives to optimize")
        ->delimiter(',')->capture_default_str();
    benchmark->add_option("--methods", benchmark_methods, "ma, oracle, external")
        ->delimiter(',')->capture_default_str();
    benchmark->add_option("--external", external_csv, "external results CSV (instance,objective,value,seconds)");
    benchmark->add_option("--reference", reference, "gap reference: oracle | external");
    benchmark->add_option("--runs", benchmark_runs, "runs per instance and objective")->capture_default_str();
    benchmark->add_option("--oracle-budget", benchmark_budget, "multi-machine enumeration budget");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(generate_common, machines, horizon, count, label, synthetic,
                                carbon_csv, column_map_path, onsite_csv, prices_csv, onsite_scale,
                                pool_size, duration_min, duration_max, period_hours);
        if (solve->parsed())
            return cmd_solve(solve_common, solve_instances, solve_dataset, solve_objective,
                             solve_runs, emit_plot, emit_history);
        if (oracle->parsed())
            return cmd_oracle(oracle_common, oracle_instance, oracle_objective, oracle_budget);
        if (export_milp->parsed()) return cmd_export_milp(export_common, export_instance);
        if (evaluate_cmd->parsed())
            return cmd_evaluate(eval_instance, eval_schedule, eval_objective, eval_out);
        if (benchmark->parsed())
            return cmd_benchmark(benchmark_common, benchmark_dataset, benchmark_objectives,
                                 benchmark_methods, external_csv, reference, benchmark_runs,
                                 benchmark_budget);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
