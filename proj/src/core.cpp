#include "cafs/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cafs {

double OperationSpec::total_power() const {
    return std::accumulate(power.begin(), power.end(), 0.0);
}

double Instance::total_energy_kwh() const {
    double kw_periods = 0.0;
    for (const auto& job : jobs)
        for (const auto& op : job.operations) kw_periods += op.total_power();
    return kw_periods * period_hours;
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

std::string field(const char* name, int i, int m = -1) {
    std::ostringstream os;
    os << name << "[" << i + 1 << "]";
    if (m >= 0) os << "[" << m + 1 << "]";
    return os.str();
}

void check_series(const std::vector<double>& series, int horizon, const std::string& name) {
    require(static_cast<int>(series.size()) == horizon,
            name + ": length " + std::to_string(series.size()) + " != horizon " +
                std::to_string(horizon));
    for (std::size_t t = 0; t < series.size(); ++t)
        require(series[t] >= 0.0,
                name + "[" + std::to_string(t + 1) + "]: negative value");
}

}  // namespace

void validate_instance(const Instance& inst) {
    require(inst.machines >= 1, "machines: must be >= 1");
    require(inst.horizon >= 1, "horizon: must be >= 1");
    require(inst.period_hours > 0.0, "period_hours: must be > 0");
    require(!inst.jobs.empty(), "jobs: at least one job required");
    for (int i = 0; i < inst.job_count(); ++i) {
        const Job& job = inst.jobs[static_cast<std::size_t>(i)];
        require(static_cast<int>(job.operations.size()) == inst.machines,
                field("jobs", i) + ": " + std::to_string(job.operations.size()) +
                    " operations, expected " + std::to_string(inst.machines));
        for (int m = 0; m < inst.machines; ++m) {
            const OperationSpec& op = job.operations[static_cast<std::size_t>(m)];
            require(op.duration >= 0, field("jobs", i, m) + ".duration: negative");
            require(static_cast<int>(op.power.size()) == op.duration,
                    field("jobs", i, m) + ".power: length " + std::to_string(op.power.size()) +
                        " != duration " + std::to_string(op.duration));
            for (double p : op.power)
                require(p >= 0.0, field("jobs", i, m) + ".power: negative value");
        }
    }
    check_series(inst.carbon_intensity, inst.horizon, "carbon");
    check_series(inst.onsite_available, inst.horizon, "onsite");
    if (inst.prices) check_series(*inst.prices, inst.horizon, "prices");
}

std::vector<std::string> instance_warnings(const Instance& inst) {
    std::vector<std::string> warnings;
    Schedule fcfs = fcfs_schedule(inst);
    if (!fcfs.feasible)
        warnings.push_back("FCFS schedule completes in period " +
                           std::to_string(fcfs.completion) + " > horizon " +
                           std::to_string(inst.horizon));
    return warnings;
}

void schedule_from_pauses(const Instance& inst, const std::vector<int>& sequence,
                          const std::vector<std::vector<int>>& pauses, Schedule& out) {
    const int n = inst.job_count();
    const int machines = inst.machines;
    out.machine_count = machines;
    out.sequence = sequence;
    out.start.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(machines), 0);
    int completion = 0;
    for (int m = 0; m < machines; ++m) {
        const std::vector<int>& machine_pauses = pauses[static_cast<std::size_t>(m)];
        int cursor = 0;  // last period the machine is considered occupied through
        for (int p = 0; p < n; ++p) {
            const int job = sequence[static_cast<std::size_t>(p)];
            const int duration = inst.op(job, m).duration;
            int start = cursor + machine_pauses[static_cast<std::size_t>(p)] + 1;
            const int precedence_bound =
                m > 0 ? out.start_at(job, m - 1) + inst.op(job, m - 1).duration : 1;
            if (duration == 0) {
                // zero-width markers stay inside their feasible window so
                // every feasible schedule remains expressible with the
                // per-operation start indicators
                int remaining = 0;
                for (int l = m; l < machines; ++l) remaining += inst.op(job, l).duration;
                start = std::min(start, inst.horizon + 1 - remaining);
                start = std::max(start, cursor + 1);
            }
            start = std::max(start, precedence_bound);
            out.start_at(job, m) = start;
            cursor = start + duration - 1;
            if (duration > 0) completion = std::max(completion, cursor);
        }
    }
    out.completion = completion;
    out.feasible = completion <= inst.horizon;
}

Schedule fcfs_schedule(const Instance& inst) {
    const int n = inst.job_count();
    std::vector<int> sequence(static_cast<std::size_t>(n));
    std::iota(sequence.begin(), sequence.end(), 0);
    std::vector<std::vector<int>> pauses(
        static_cast<std::size_t>(inst.machines),
        std::vector<int>(static_cast<std::size_t>(n) + 1, 0));
    Schedule out;
    schedule_from_pauses(inst, sequence, pauses, out);
    return out;
}

void check_schedule(const Instance& inst, const Schedule& sched) {
    const int n = inst.job_count();
    require(sched.machine_count == inst.machines, "schedule: machine count mismatch");
    require(static_cast<int>(sched.sequence.size()) == n, "schedule: sequence size != job count");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int job : sched.sequence) {
        require(job >= 0 && job < n, "schedule: sequence entry out of range");
        require(!seen[static_cast<std::size_t>(job)], "schedule: sequence repeats a job");
        seen[static_cast<std::size_t>(job)] = 1;
    }
    for (int m = 0; m < inst.machines; ++m) {
        int prev_end = 0;  // end period of the previous operation in sequence order
        for (int p = 0; p < n; ++p) {
            const int job = sched.sequence[static_cast<std::size_t>(p)];
            const int start = sched.start_at(job, m);
            const int duration = inst.op(job, m).duration;
            require(start >= 1, "schedule: start before period 1");
            require(start > prev_end,
                    "schedule: overlap on machine " + std::to_string(m + 1) +
                        " at sequence position " + std::to_string(p + 1));
            if (m > 0) {
                const int pred_end =
                    sched.start_at(job, m - 1) + inst.op(job, m - 1).duration - 1;
                require(start >= pred_end + 1,
                        "schedule: precedence violated for job " + std::to_string(job + 1) +
                            " on machine " + std::to_string(m + 1));
            }
            if (duration > 0) prev_end = start + duration - 1;
            // dummy operations keep the sequence point but occupy no periods
            else prev_end = std::max(prev_end, start - 1);
        }
    }
}

}  // namespace cafs
