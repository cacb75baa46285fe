#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cafs/carbon.hpp"
#include "cafs/evaluator.hpp"
#include "cafs/serialize.hpp"
#include "test_support.hpp"

using namespace cafs;

namespace {

// worked example with the figure's 2-4-5-1-3 sequence, no planned idle
Schedule figure_sequence_asap(const Instance& inst) {
    std::vector<int> sequence{1, 3, 4, 0, 2};
    std::vector<std::vector<int>> pauses{std::vector<int>(6, 0)};
    Schedule sched;
    schedule_from_pauses(inst, sequence, pauses, sched);
    return sched;
}

Instance constant_intensity(Instance inst, double value) {
    for (double& c : inst.carbon_intensity) c = value;
    for (double& a : inst.onsite_available) a = 0.0;
    return inst;
}

}  // namespace

TEST_CASE("demand profile of the worked example") {
    const Instance inst = load_instance(test::data_path("fixtures/worked_example.json"));
    const Schedule sched = figure_sequence_asap(inst);
    const DemandProfile profile = demand_profile(inst, sched);
    CHECK(profile.demand[0] == 2000.0);  // job 2 starts the sequence
    double total = 0.0;
    for (double d : profile.demand) total += d;
    CHECK(total == 73800.0);  // sum of all per-period power requirements
    CHECK(total * inst.period_hours == inst.total_energy_kwh());
}

TEST_CASE("constant intensity makes emissions sequence-independent") {
    const Instance base = load_instance(test::data_path("fixtures/worked_example.json"));
    const Instance inst = constant_intensity(base, 300.0);
    const double expected = 73800.0 * 0.25 * 300.0;  // 5.535 tCO2 in grams
    const Objective fcfs = evaluate(inst, fcfs_schedule(inst), ObjectiveKind::carbon);
    CHECK(fcfs.value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(fcfs.penalty == 0.0);
    Rng rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const Schedule sched = test::random_schedule(inst, rng);
        if (!sched.feasible) continue;
        const Objective objective = evaluate(inst, sched, ObjectiveKind::carbon);
        CHECK(objective.value == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("abundant on-site power zeroes the grid draw") {
    Instance inst = load_instance(test::data_path("fixtures/worked_example.json"));
    for (double& a : inst.onsite_available) a = 10000.0;
    const Schedule sched = fcfs_schedule(inst);
    const DemandProfile profile = demand_profile(inst, sched);
    for (double g : profile.grid_draw) CHECK(g == 0.0);
    CHECK(evaluate(inst, sched, ObjectiveKind::carbon).value == 0.0);
}

TEST_CASE("all-dummy schedule has a zero profile") {
    Instance inst;
    inst.machines = 2;
    inst.horizon = 4;
    inst.jobs = {Job{{OperationSpec{}, OperationSpec{}}}};
    inst.carbon_intensity.assign(4, 100.0);
    inst.onsite_available.assign(4, 0.0);
    const Schedule sched = fcfs_schedule(inst);
    CHECK(sched.completion == 0);
    const DemandProfile profile = demand_profile(inst, sched);
    for (double d : profile.demand) CHECK(d == 0.0);
    CHECK(evaluate(inst, sched, ObjectiveKind::carbon).value == 0.0);
}

TEST_CASE("lateness penalty formula") {
    CHECK(lateness_penalty(100, 96) == 4e10);
    CHECK(lateness_penalty(96, 96) == 0.0);
    CHECK(lateness_penalty(1, 96) == 0.0);
}

TEST_CASE("penalty applies to every objective kind") {
    Instance inst;
    inst.machines = 1;
    inst.horizon = 3;
    inst.jobs = {Job{{OperationSpec{2, {10, 10}}}}, Job{{OperationSpec{2, {10, 10}}}}};
    inst.carbon_intensity.assign(3, 100.0);
    inst.onsite_available.assign(3, 0.0);
    inst.prices = std::vector<double>(3, 0.1);
    // force an overrun: start the second job at period 3
    Schedule sched;
    std::vector<std::vector<int>> pauses{{0, 0, 0}};
    schedule_from_pauses(inst, {0, 1}, pauses, sched);
    CHECK(sched.completion == 4);
    CHECK_FALSE(sched.feasible);
    for (ObjectiveKind kind :
         {ObjectiveKind::carbon, ObjectiveKind::cost, ObjectiveKind::makespan}) {
        const Objective obj = evaluate(inst, sched, kind);
        CHECK(obj.penalty == 1e10);
        CHECK(obj.fitness() == obj.value + 1e10);
    }
    // overrun demand is excluded from the sums: only periods 1..3 count
    const DemandProfile profile = demand_profile(inst, sched);
    CHECK(profile.demand.size() == 3);
    CHECK(profile.demand[2] == 10.0);
}

TEST_CASE("cost without prices is an error") {
    Instance inst;
    inst.machines = 1;
    inst.horizon = 2;
    inst.jobs = {Job{{OperationSpec{1, {5}}}}};
    inst.carbon_intensity.assign(2, 1.0);
    inst.onsite_available.assign(2, 0.0);
    CHECK_THROWS_WITH_AS(evaluate(inst, fcfs_schedule(inst), ObjectiveKind::cost),
                         doctest::Contains("prices"), ValidationError);
}

TEST_CASE("objective identity holds on randomized feasible pairs") {
    Rng rng(99);
    int checked = 0;
    while (checked < 50) {
        const Instance inst = test::random_instance(rng);
        const Schedule sched = test::random_schedule(inst, rng);
        if (!sched.feasible) continue;
        CHECK(objective_identity_check(inst, sched));
        ++checked;
    }
}

TEST_CASE("identity reduces to the emission matrix when on-site is zero") {
    Rng rng(17);
    test::RandomInstanceOptions options;
    options.onsite_scale = 0.0;
    const Instance inst = test::random_instance(rng, options);
    const Schedule sched = fcfs_schedule(inst);
    REQUIRE(sched.feasible);
    const EmissionMatrix matrix = emission_matrix(inst);
    double grid_only = 0.0;
    for (int i = 0; i < inst.job_count(); ++i)
        for (int m = 0; m < inst.machines; ++m) grid_only += matrix.at(i, m, sched.start_at(i, m));
    const double direct = evaluate(inst, sched, ObjectiveKind::carbon).value;
    CHECK(direct == doctest::Approx(grid_only).epsilon(1e-9));
    CHECK(objective_identity_check(inst, sched));
}

TEST_CASE("single placement instance satisfies the identity") {
    Instance inst;
    inst.machines = 1;
    inst.horizon = 3;
    inst.period_hours = 0.25;
    inst.jobs = {Job{{OperationSpec{3, {100, 200, 300}}}}};
    inst.carbon_intensity = {50, 60, 70};
    inst.onsite_available = {20, 20, 20};
    const Schedule sched = fcfs_schedule(inst);
    CHECK(objective_identity_check(inst, sched));
}

TEST_CASE("raising on-site availability never increases emissions") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = test::random_instance(rng);
        const Schedule sched = test::random_schedule(inst, rng);
        const double base = evaluate(inst, sched, ObjectiveKind::carbon).value;
        Instance richer = inst;
        std::uniform_int_distribution<int> period(0, inst.horizon - 1);
        richer.onsite_available[static_cast<std::size_t>(period(rng))] += 500.0;
        const double improved = evaluate(richer, sched, ObjectiveKind::carbon).value;
        CHECK(improved <= base);
    }
}

TEST_CASE("fcfs minimizes makespan on a single machine") {
    Rng rng(31);
    test::RandomInstanceOptions options;
    options.max_machines = 1;
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = test::random_instance(rng, options);
        const double fcfs = evaluate(inst, fcfs_schedule(inst), ObjectiveKind::makespan).fitness();
        for (int s = 0; s < 5; ++s) {
            const Schedule sched = test::random_schedule(inst, rng);
            CHECK(evaluate(inst, sched, ObjectiveKind::makespan).fitness() >= fcfs);
        }
    }
}
