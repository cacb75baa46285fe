// Core domain types for carbon-aware permutation flow-shop scheduling:
// instances (jobs, per-period energy data), schedules, and the FCFS baseline.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cafs {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One processing step of a job on one machine. duration == 0 encodes a dummy
// operation (the job skips that machine); power then stays empty.
struct OperationSpec {
    int duration = 0;           // whole periods
    std::vector<double> power;  // kW drawn in each period, size == duration

    double total_power() const;  // kW-periods
    bool operator==(const OperationSpec&) const = default;
};

struct Job {
    std::vector<OperationSpec> operations;  // one per machine, machine order

    bool operator==(const Job&) const = default;
};

// A scheduling problem over a horizon of `horizon` periods of `period_hours`
// hours each. All per-period series have length == horizon. Periods are
// 1-based throughout, matching t in {1,...,T}.
struct Instance {
    std::string label;
    int machines = 1;            // M
    int horizon = 0;             // T
    double period_hours = 0.25;  // h
    std::vector<Job> jobs;
    std::vector<double> carbon_intensity;        // gCO2eq/kWh
    std::vector<double> onsite_available;        // kW
    std::optional<std::vector<double>> prices;   // currency/kWh

    int job_count() const { return static_cast<int>(jobs.size()); }
    const OperationSpec& op(int job, int machine) const {
        return jobs[static_cast<std::size_t>(job)].operations[static_cast<std::size_t>(machine)];
    }
    // kWh consumed by all operations if every one of them runs to completion
    double total_energy_kwh() const;

    bool operator==(const Instance&) const = default;
};

// Throws ValidationError naming the offending field.
void validate_instance(const Instance& instance);

// Non-fatal observations (e.g. the FCFS schedule overruns the horizon).
std::vector<std::string> instance_warnings(const Instance& instance);

// Decoded solution: one job sequence shared by all machines plus a start
// period per operation. `completion` is the last busy period anywhere
// (0 when every operation is a dummy); feasible means completion <= horizon.
struct Schedule {
    int machine_count = 0;
    std::vector<int> sequence;  // job indices, 0-based internally
    std::vector<int> start;     // start[job * machine_count + machine], 1-based period
    int completion = 0;
    bool feasible = false;

    int start_at(int job, int machine) const {
        return start[static_cast<std::size_t>(job * machine_count + machine)];
    }
    int& start_at(int job, int machine) {
        return start[static_cast<std::size_t>(job * machine_count + machine)];
    }

    bool operator==(const Schedule&) const = default;
};

// Jobs in index order, every operation as early as machine availability and
// precedence allow. May return an infeasible schedule (completion > horizon).
Schedule fcfs_schedule(const Instance& instance);

// Chains starts for a fixed sequence and per-machine pause vectors
// (machines * (N+1) entries each, machine-major). Shared by the decoder,
// the FCFS baseline and the exhaustive oracle.
void schedule_from_pauses(const Instance& instance, const std::vector<int>& sequence,
                          const std::vector<std::vector<int>>& pauses, Schedule& out);

// Throws ValidationError if `schedule` violates precedence, per-machine
// non-overlap, or the shared-sequence property.
void check_schedule(const Instance& instance, const Schedule& schedule);

}  // namespace cafs
