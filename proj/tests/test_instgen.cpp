#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "cafs/instgen.hpp"
#include "cafs/serialize.hpp"
#include "test_support.hpp"

using namespace cafs;

TEST_CASE("operation pool honours the sampling bounds") {
    GenConfig config = GenConfig::for_machines(1, 96);
    CHECK(config.pool_size == 2000);
    CHECK(config.duration_min == 2);
    CHECK(config.duration_max == 16);
    Rng rng(1);
    const auto pool = build_operation_pool(config, rng);
    CHECK(pool.size() == 2000);
    for (const OperationSpec& op : pool) {
        CHECK(op.duration >= 2);
        CHECK(op.duration <= 16);
        CHECK(op.duration != 0);
        for (double p : op.power) {
            CHECK(p >= 0.0);
            CHECK(p <= 3250.0);  // 3000 base + 250 jitter
        }
    }

    GenConfig multi = GenConfig::for_machines(3, 96);
    CHECK(multi.duration_min == 0);
    CHECK(multi.duration_max == 8);
    Rng rng2(2);
    const auto multi_pool = build_operation_pool(multi, rng2);
    bool any_dummy = false;
    for (const OperationSpec& op : multi_pool) {
        CHECK(op.duration <= 8);
        if (op.duration == 0) any_dummy = true;
    }
    CHECK(any_dummy);
}

TEST_CASE("synthetic energy year has the documented shape") {
    const EnergyData energy = synthetic_energy_year(7);
    CHECK(energy.periods_per_day() == 96);
    CHECK(energy.day_count() == 365);
    CHECK(energy.carbon.size() == 365u * 96u);
    CHECK(energy.onsite.size() == energy.carbon.size());
    CHECK(energy.prices.size() == energy.carbon.size());
    for (double c : energy.carbon) {
        CHECK(c >= 11.0);  // convex combination of the factor table
        CHECK(c <= 820.0);
    }
    for (double a : energy.onsite) CHECK(a >= 0.0);
    for (std::size_t t = 0; t < energy.prices.size(); t += 4) {
        CHECK(energy.prices[t] > 0.0);
        for (std::size_t q = 1; q < 4; ++q)  // hourly blocks
            CHECK(energy.prices[t + q] == energy.prices[t]);
    }
    // deterministic
    const EnergyData again = synthetic_energy_year(7);
    CHECK(again.carbon == energy.carbon);
    CHECK(again.onsite == energy.onsite);
    CHECK(again.prices == energy.prices);
}

TEST_CASE("generated single-machine dataset meets the structural guarantees") {
    GenConfig config = GenConfig::for_machines(1, 96);
    config.instance_count = 10;
    config.rng_seed = 5;
    config.label_prefix = "t1";
    Rng rng(derive_seed(5, 0x3001, 0));
    const auto pool = build_operation_pool(config, rng);
    const EnergyData energy = synthetic_energy_year(5);
    const auto instances = generate_dataset(config, pool, energy);
    REQUIRE(instances.size() == 10);
    for (const Instance& inst : instances) {
        CHECK_NOTHROW(validate_instance(inst));
        const Schedule fcfs = fcfs_schedule(inst);
        CHECK(fcfs.completion < inst.horizon);  // strict feasibility test
        const SlackVector slack = compute_slack(inst);
        CHECK(slack.of(0) >= 1);
        CHECK(slack.of(0) <= 95);
        CHECK(inst.job_count() >= 1);
        int operations = 0;
        for (const Job& job : inst.jobs)
            for (const OperationSpec& op : job.operations)
                if (op.duration > 0) ++operations;
        CHECK(operations >= 5);
        CHECK(operations <= 25);
        CHECK(inst.prices.has_value());
    }

    // byte-identical regeneration
    const auto repeat = generate_dataset(config, pool, energy);
    REQUIRE(repeat.size() == instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) CHECK(repeat[i] == instances[i]);
}

TEST_CASE("multi-machine jobs always carry at least one real operation") {
    GenConfig config = GenConfig::for_machines(3, 96);
    config.instance_count = 5;
    config.rng_seed = 11;
    Rng rng(derive_seed(11, 0x3001, 0));
    const auto pool = build_operation_pool(config, rng);
    const auto instances = generate_dataset(config, pool, synthetic_energy_year(11));
    for (const Instance& inst : instances) {
        for (const Job& job : inst.jobs) {
            int total = 0;
            for (const OperationSpec& op : job.operations) total += op.duration;
            CHECK(total > 0);
        }
        for (int m = 0; m < inst.machines; ++m) CHECK(compute_slack(inst).of(m) >= 1);
    }
}

TEST_CASE("short historical series are rejected") {
    GenConfig config = GenConfig::for_machines(1, 96);
    Rng rng(1);
    const auto pool = build_operation_pool(config, rng);
    EnergyData short_series;
    short_series.carbon.assign(96, 100.0);
    short_series.onsite.assign(96, 0.0);
    CHECK_THROWS_WITH_AS(generate_dataset(config, pool, short_series),
                         doctest::Contains("365"), ValidationError);
}

TEST_CASE("dataset writer emits loadable files and a manifest") {
    namespace fs = std::filesystem;
    GenConfig config = GenConfig::for_machines(1, 96);
    config.instance_count = 3;
    config.rng_seed = 9;
    config.label_prefix = "mini";
    Rng rng(derive_seed(9, 0x3001, 0));
    const auto pool = build_operation_pool(config, rng);
    const auto instances = generate_dataset(config, pool, synthetic_energy_year(9));
    const fs::path dir = fs::temp_directory_path() / "cafs_dataset_test";
    fs::remove_all(dir);
    const std::string manifest_path = write_dataset(instances, config, dir.string());
    const auto manifest = nlohmann::json::parse(read_text_file(manifest_path));
    CHECK(manifest["seed"] == 9);
    CHECK(manifest["instances"].size() == 3);
    CHECK(manifest["summary"].contains("operations"));
    CHECK(manifest["summary"].contains("slack"));
    for (const auto& row : manifest["instances"]) {
        const Instance inst = load_instance((dir / row["file"].get<std::string>()).string());
        CHECK(inst.job_count() == row["jobs"].get<int>());
    }
    fs::remove_all(dir);
}
