#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "cafs/core.hpp"
#include "cafs/serialize.hpp"
#include "test_support.hpp"

using namespace cafs;

TEST_CASE("worked-example fixture loads with the documented shape") {
    const Instance inst = load_instance(test::data_path("fixtures/worked_example.json"));
    CHECK(inst.machines == 1);
    CHECK(inst.horizon == 96);
    CHECK(inst.job_count() == 5);
    int total = 0;
    std::vector<int> durations;
    for (const Job& job : inst.jobs) {
        durations.push_back(job.operations[0].duration);
        total += job.operations[0].duration;
    }
    CHECK(durations == std::vector<int>{11, 8, 13, 8, 8});
    CHECK(total == 48);
    CHECK(inst.prices.has_value());
}

TEST_CASE("loader names the offending field") {
    Instance inst;
    inst.label = "bad";
    inst.machines = 1;
    inst.horizon = 4;
    inst.jobs.push_back(Job{{OperationSpec{2, {1.0, 1.0}}}});
    inst.carbon_intensity = {1, 1, 1};  // one short
    inst.onsite_available = {0, 0, 0, 0};
    CHECK_THROWS_WITH_AS(validate_instance(inst), doctest::Contains("carbon"), ValidationError);

    inst.carbon_intensity = {1, 1, 1, 1};
    CHECK_NOTHROW(validate_instance(inst));

    SUBCASE("negative power") {
        inst.jobs[0].operations[0].power[1] = -1.0;
        CHECK_THROWS_WITH_AS(validate_instance(inst), doctest::Contains("power"), ValidationError);
    }
    SUBCASE("power length mismatch") {
        inst.jobs[0].operations[0].power.push_back(1.0);
        CHECK_THROWS_WITH_AS(validate_instance(inst), doctest::Contains("power"), ValidationError);
    }
    SUBCASE("operation count mismatch") {
        inst.machines = 2;
        inst.jobs[0].operations.push_back(OperationSpec{});
        inst.jobs.push_back(Job{{OperationSpec{}}});
        CHECK_THROWS_WITH_AS(validate_instance(inst), doctest::Contains("jobs[2]"), ValidationError);
    }
    SUBCASE("negative onsite") {
        inst.onsite_available[2] = -0.5;
        CHECK_THROWS_WITH_AS(validate_instance(inst), doctest::Contains("onsite"), ValidationError);
    }
}

TEST_CASE("malformed file raises a parse error") {
    const std::string path = (std::filesystem::temp_directory_path() / "cafs_bad.json").string();
    write_text_file(path, "{\"label\": \"x\", ");
    CHECK_THROWS_AS(load_instance(path), ParseError);
    write_text_file(path, "{\"label\": \"x\"}");
    CHECK_THROWS_WITH_AS(load_instance(path), doctest::Contains("machines"), ParseError);
    std::remove(path.c_str());
}

TEST_CASE("save then load reproduces the instance exactly") {
    Rng rng(42);
    const std::string path = (std::filesystem::temp_directory_path() / "cafs_rt.json").string();
    for (int trial = 0; trial < 40; ++trial) {
        const Instance inst = test::random_instance(rng);
        save_instance(inst, path);
        const Instance back = load_instance(path);
        CHECK(back == inst);
    }
    std::remove(path.c_str());
}

TEST_CASE("saving to an unwritable location fails") {
    const Instance inst = load_instance(test::data_path("fixtures/worked_example.json"));
    CHECK_THROWS_AS(save_instance(inst, "/nonexistent-dir/sub/inst.json"), std::runtime_error);
}

TEST_CASE("fcfs on the worked example") {
    const Instance inst = load_instance(test::data_path("fixtures/worked_example.json"));
    const Schedule fcfs = fcfs_schedule(inst);
    CHECK(fcfs.sequence == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(fcfs.start_at(0, 0) == 1);
    CHECK(fcfs.start_at(1, 0) == 12);
    CHECK(fcfs.start_at(2, 0) == 20);
    CHECK(fcfs.start_at(3, 0) == 33);
    CHECK(fcfs.start_at(4, 0) == 41);
    CHECK(fcfs.completion == 48);
    CHECK(fcfs.feasible);
}

TEST_CASE("fcfs degenerate shapes") {
    Instance single;
    single.machines = 1;
    single.horizon = 5;
    single.jobs = {Job{{OperationSpec{5, {1, 1, 1, 1, 1}}}}};
    single.carbon_intensity.assign(5, 1.0);
    single.onsite_available.assign(5, 0.0);
    const Schedule a = fcfs_schedule(single);
    CHECK(a.start_at(0, 0) == 1);
    CHECK(a.completion == 5);

    Instance chain;
    chain.machines = 2;
    chain.horizon = 7;
    chain.jobs = {Job{{OperationSpec{3, {1, 1, 1}}, OperationSpec{4, {1, 1, 1, 1}}}}};
    chain.carbon_intensity.assign(7, 1.0);
    chain.onsite_available.assign(7, 0.0);
    const Schedule b = fcfs_schedule(chain);
    CHECK(b.start_at(0, 0) == 1);
    CHECK(b.start_at(0, 1) == 4);
    CHECK(b.completion == 7);
    CHECK(b.feasible);
}

TEST_CASE("fcfs completion on machine 1 is the duration sum") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = test::random_instance(rng);
        const Schedule fcfs = fcfs_schedule(inst);
        check_schedule(inst, fcfs);
        int busy = 0;
        int last_end = 0;
        for (int i = 0; i < inst.job_count(); ++i) {
            busy += inst.op(i, 0).duration;
            if (inst.op(i, 0).duration > 0)
                last_end = std::max(last_end, fcfs.start_at(i, 0) + inst.op(i, 0).duration - 1);
        }
        CHECK(last_end == busy);
    }
}

TEST_CASE("random decoded schedules satisfy the structural invariants") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst = test::random_instance(rng);
        const Schedule sched = test::random_schedule(inst, rng);
        CHECK_NOTHROW(check_schedule(inst, sched));
    }
}

TEST_CASE("loader warns when the fcfs schedule overruns the horizon") {
    Instance inst;
    inst.label = "tight";
    inst.machines = 2;
    inst.horizon = 10;
    inst.jobs = {Job{{OperationSpec{9, std::vector<double>(9, 1.0)}, OperationSpec{1, {1.0}}}},
                 Job{{OperationSpec{1, {1.0}}, OperationSpec{9, std::vector<double>(9, 1.0)}}}};
    inst.carbon_intensity.assign(10, 1.0);
    inst.onsite_available.assign(10, 0.0);
    validate_instance(inst);  // accepted: overrun is a warning, not an error
    const auto warnings = instance_warnings(inst);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("FCFS") != std::string::npos);
}

TEST_CASE("schedule documents round-trip") {
    Rng rng(3);
    const Instance inst = test::random_instance(rng);
    const Schedule sched = test::random_schedule(inst, rng);
    const auto doc = schedule_to_json(sched);
    const Schedule back = schedule_from_json(doc);
    CHECK(back == sched);
    const std::string path = (std::filesystem::temp_directory_path() / "cafs_sched.json").string();
    save_schedule(sched, path, "enumerated=1");
    CHECK(load_schedule(path) == sched);
    std::remove(path.c_str());
}
