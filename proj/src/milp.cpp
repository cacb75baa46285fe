#include "cafs/milp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cafs/memetic.hpp"
#include "cafs/serialize.hpp"
#include "cafs/util.hpp"

namespace cafs {

namespace {

std::string var_name(const char* stem, int a, int b = -1, int c = -1) {
    std::string name = stem;
    name += "_" + std::to_string(a);
    if (b >= 0) name += "_" + std::to_string(b);
    if (c >= 0) name += "_" + std::to_string(c);
    return name;
}

}  // namespace

MilpModel build_milp(const Instance& inst) {
    const int n = inst.job_count();
    const int machines = inst.machines;
    const int horizon = inst.horizon;
    const EmissionMatrix emissions = emission_matrix(inst);  // also rejects empty windows

    MilpModel model;
    model.label = inst.label;
    model.machine_count = machines;
    model.windows.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(machines));
    model.x_offset.assign(model.windows.size(), -1);
    std::vector<int> p_offset(model.windows.size(), -1);

    // x variables, window-major
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < machines; ++m) {
            const StartWindow w = start_window(inst, i, m);
            model.windows[static_cast<std::size_t>(i * machines + m)] = w;
            model.x_offset[static_cast<std::size_t>(i * machines + m)] =
                static_cast<int>(model.variables.size());
            for (int t = w.earliest; t <= w.latest; ++t)
                model.variables.push_back({var_name("x", i + 1, m + 1, t), true});
        }
    }
    model.x_count = static_cast<int>(model.variables.size());

    std::vector<int> s_index(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            s_index[static_cast<std::size_t>(i * n + j)] = static_cast<int>(model.variables.size());
            model.variables.push_back({var_name("s", i + 1, j + 1), true});
        }
    }
    model.s_count = static_cast<int>(model.variables.size()) - model.x_count;

    model.y_first = static_cast<int>(model.variables.size());
    for (int t = 1; t <= horizon; ++t) model.variables.push_back({var_name("y", t), false});
    model.y_count = horizon;

    std::vector<int> tau_index(model.windows.size());
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < machines; ++m) {
            tau_index[static_cast<std::size_t>(i * machines + m)] =
                static_cast<int>(model.variables.size());
            model.variables.push_back({var_name("tau", i + 1, m + 1), false});
        }
    model.tau_count = n * machines;

    // p variables only where an operation can draw power
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < machines; ++m) {
            const OperationSpec& op = inst.op(i, m);
            if (op.duration == 0) continue;
            const StartWindow w = model.windows[static_cast<std::size_t>(i * machines + m)];
            p_offset[static_cast<std::size_t>(i * machines + m)] =
                static_cast<int>(model.variables.size());
            for (int t = w.earliest; t <= w.latest + op.duration - 1; ++t)
                model.variables.push_back({var_name("p", i + 1, m + 1, t), false});
        }
    }
    model.p_count = static_cast<int>(model.variables.size()) - model.y_first - model.y_count -
                    model.tau_count;

    // objective: grid-only emissions of chosen starts minus on-site savings
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < machines; ++m) {
            const StartWindow w = model.windows[static_cast<std::size_t>(i * machines + m)];
            const int x0 = model.x_offset[static_cast<std::size_t>(i * machines + m)];
            for (int t = w.earliest; t <= w.latest; ++t)
                model.objective.push_back({x0 + (t - w.earliest), emissions.at(i, m, t)});
        }
    }
    for (int t = 1; t <= horizon; ++t)
        model.objective.push_back(
            {model.y_first + (t - 1),
             -inst.carbon_intensity[static_cast<std::size_t>(t - 1)] * inst.period_hours});

    auto window_of = [&](int i, int m) {
        return model.windows[static_cast<std::size_t>(i * machines + m)];
    };
    auto x_at = [&](int i, int m, int t) {
        const StartWindow w = window_of(i, m);
        return model.x_offset[static_cast<std::size_t>(i * machines + m)] + (t - w.earliest);
    };
    auto tau_at = [&](int i, int m) { return tau_index[static_cast<std::size_t>(i * machines + m)]; };

    // each operation starts exactly once inside its window
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < machines; ++m) {
            LinRow row{var_name("assign", i + 1, m + 1), {}, 'E', 1.0};
            const StartWindow w = window_of(i, m);
            for (int t = w.earliest; t <= w.latest; ++t) row.terms.push_back({x_at(i, m, t), 1.0});
            model.rows.push_back(std::move(row));
        }
    }

    // start period variables follow the chosen indicator
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < machines; ++m) {
            LinRow row{var_name("start_def", i + 1, m + 1), {}, 'E', 0.0};
            row.terms.push_back({tau_at(i, m), 1.0});
            const StartWindow w = window_of(i, m);
            for (int t = w.earliest; t <= w.latest; ++t)
                row.terms.push_back({x_at(i, m, t), -static_cast<double>(t)});
            model.rows.push_back(std::move(row));
        }
    }

    // per-period power draw of each operation
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < machines; ++m) {
            const OperationSpec& op = inst.op(i, m);
            if (op.duration == 0) continue;
            const StartWindow w = window_of(i, m);
            const int p0 = p_offset[static_cast<std::size_t>(i * machines + m)];
            for (int t = w.earliest; t <= w.latest + op.duration - 1; ++t) {
                LinRow row{var_name("power_def", i + 1, m + 1, t), {}, 'E', 0.0};
                row.terms.push_back({p0 + (t - w.earliest), 1.0});
                const int k_lo = std::max(1, t - w.latest + 1);
                const int k_hi = std::min(op.duration, t - w.earliest + 1);
                for (int k = k_lo; k <= k_hi; ++k)
                    row.terms.push_back(
                        {x_at(i, m, t - k + 1), -op.power[static_cast<std::size_t>(k - 1)]});
                model.rows.push_back(std::move(row));
            }
        }
    }

    // precedence between consecutive operations of a job
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m + 1 < machines; ++m) {
            LinRow row{var_name("prec", i + 1, m + 1), {}, 'G',
                       static_cast<double>(inst.op(i, m).duration)};
            row.terms.push_back({tau_at(i, m + 1), 1.0});
            row.terms.push_back({tau_at(i, m), -1.0});
            model.rows.push_back(std::move(row));
        }
    }

    // shared sequence on every machine
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int s = s_index[static_cast<std::size_t>(i * n + j)];
            for (int m = 0; m < machines; ++m) {
                LinRow before{var_name("seq_before", i + 1, j + 1, m + 1), {}, 'G',
                              static_cast<double>(inst.op(j, m).duration)};
                before.terms.push_back({tau_at(i, m), 1.0});
                before.terms.push_back({tau_at(j, m), -1.0});
                before.terms.push_back({s, static_cast<double>(horizon)});
                model.rows.push_back(std::move(before));

                LinRow after{var_name("seq_after", i + 1, j + 1, m + 1), {}, 'G',
                             static_cast<double>(inst.op(i, m).duration - horizon)};
                after.terms.push_back({tau_at(j, m), 1.0});
                after.terms.push_back({tau_at(i, m), -1.0});
                after.terms.push_back({s, -static_cast<double>(horizon)});
                model.rows.push_back(std::move(after));
            }
        }
    }

    // on-site use limited by demand and by availability
    for (int t = 1; t <= horizon; ++t) {
        LinRow use{var_name("onsite_use", t), {}, 'L', 0.0};
        use.terms.push_back({model.y_first + (t - 1), 1.0});
        for (int i = 0; i < n; ++i) {
            for (int m = 0; m < machines; ++m) {
                const OperationSpec& op = inst.op(i, m);
                if (op.duration == 0) continue;
                const StartWindow w = window_of(i, m);
                if (t < w.earliest || t > w.latest + op.duration - 1) continue;
                const int p0 = p_offset[static_cast<std::size_t>(i * machines + m)];
                use.terms.push_back({p0 + (t - w.earliest), -1.0});
            }
        }
        model.rows.push_back(std::move(use));

        LinRow cap{var_name("onsite_cap", t), {}, 'L',
                   inst.onsite_available[static_cast<std::size_t>(t - 1)]};
        cap.terms.push_back({model.y_first + (t - 1), 1.0});
        model.rows.push_back(std::move(cap));
    }

    return model;
}

namespace {

void append_term(std::string& line, bool first, double coef, const std::string& name) {
    if (coef < 0.0) {
        line += first ? "- " : " - ";
    } else if (!first) {
        line += " + ";
    }
    const double magnitude = std::abs(coef);
    if (magnitude != 1.0) {
        line += format_double(magnitude);
        line += " ";
    }
    line += name;
}

void flush_wrapped(std::string& out, std::string& line) {
    out += line;
    out += "\n";
    line.clear();
}

void append_expression(std::string& out, std::string& line, const MilpModel& model,
                       const std::vector<LinTerm>& terms) {
    bool first = true;
    for (const LinTerm& term : terms) {
        if (term.coef == 0.0) continue;
        if (line.size() > 200) {
            out += line;
            out += "\n";
            line = "   ";
        }
        append_term(line, first, term.coef, model.variables[static_cast<std::size_t>(term.var)].name);
        first = false;
    }
    if (first) line += "0 ";  // empty expression guard
}

}  // namespace

std::string lp_text(const MilpModel& model) {
    std::string out;
    out += "\\ " + (model.label.empty() ? std::string("model") : model.label) + "\n";
    out += "Minimize\n";
    std::string line = " obj: ";
    append_expression(out, line, model, model.objective);
    flush_wrapped(out, line);
    out += "Subject To\n";
    for (const LinRow& row : model.rows) {
        line = " " + row.name + ": ";
        append_expression(out, line, model, row.terms);
        switch (row.sense) {
            case 'E': line += " = "; break;
            case 'L': line += " <= "; break;
            case 'G': line += " >= "; break;
        }
        line += format_double(row.rhs);
        flush_wrapped(out, line);
    }
    out += "Binaries\n";
    line = " ";
    for (const MilpVariable& var : model.variables) {
        if (!var.binary) continue;
        if (line.size() > 200) flush_wrapped(out, line), line = " ";
        if (line.size() > 1) line += " ";
        line += var.name;
    }
    if (line.size() > 1) flush_wrapped(out, line);
    out += "End\n";
    return out;
}

void export_lp(const MilpModel& model, const std::string& path) {
    write_text_file(path, lp_text(model));
}

double objective_at(const MilpModel& model, const Instance& inst, const Schedule& sched) {
    std::vector<double> values(model.variables.size(), 0.0);
    for (int i = 0; i < inst.job_count(); ++i) {
        for (int m = 0; m < inst.machines; ++m) {
            const StartWindow w = model.windows[static_cast<std::size_t>(i * inst.machines + m)];
            const int start = sched.start_at(i, m);
            if (start < w.earliest || start > w.latest)
                throw ValidationError("schedule starts job " + std::to_string(i + 1) +
                                      " on machine " + std::to_string(m + 1) +
                                      " outside its feasible window");
            values[static_cast<std::size_t>(
                model.x_offset[static_cast<std::size_t>(i * inst.machines + m)] +
                (start - w.earliest))] = 1.0;
        }
    }
    const DemandProfile profile = demand_profile(inst, sched);
    for (int t = 1; t <= inst.horizon; ++t)
        values[static_cast<std::size_t>(model.y_first + t - 1)] =
            profile.onsite_used[static_cast<std::size_t>(t - 1)];
    double total = 0.0;
    for (const LinTerm& term : model.objective)
        total += term.coef * values[static_cast<std::size_t>(term.var)];
    return total;
}

namespace {

double binomial_estimate(int n, int k) {
    double result = 1.0;
    for (int j = 1; j <= k; ++j) result *= static_cast<double>(n - k + j) / static_cast<double>(j);
    return result;
}

struct Candidate {
    double fitness = std::numeric_limits<double>::infinity();
    Schedule schedule;
    bool valid = false;

    // exact-value ties break toward the smaller (sequence, start) pair
    bool beats(const Candidate& other) const {
        if (!valid) return false;
        if (!other.valid) return true;
        if (fitness != other.fitness) return fitness < other.fitness;
        if (schedule.sequence != other.schedule.sequence)
            return schedule.sequence < other.schedule.sequence;
        return schedule.start < other.schedule.start;
    }
};

// Enumerates integer compositions of `total` into `slots` parts,
// lexicographically, invoking fn once per composition held in `current`.
template <typename Fn>
void for_each_composition(int slots, int total, std::vector<int>& current, int slot, Fn&& fn) {
    if (slot == slots - 1) {
        current[static_cast<std::size_t>(slot)] = total;
        fn();
        return;
    }
    for (int c = 0; c <= total; ++c) {
        current[static_cast<std::size_t>(slot)] = c;
        for_each_composition(slots, total - c, current, slot + 1, fn);
    }
}

}  // namespace

double oracle_enumeration_estimate(const Instance& inst) {
    const SlackVector slack = compute_slack(inst);
    const int n = inst.job_count();
    double permutations = 1.0;
    for (int i = 2; i <= n; ++i) permutations *= static_cast<double>(i);
    double total = permutations;
    for (int m = 0; m < inst.machines; ++m) {
        if (slack.of(m) < 0) return 0.0;
        total *= binomial_estimate(slack.of(m) + n, n);
        if (!std::isfinite(total)) return std::numeric_limits<double>::infinity();
    }
    return total;
}

OracleResult exact_oracle(const Instance& inst, ObjectiveKind kind, const OracleLimits& limits,
                          int workers) {
    const SlackVector slack = compute_slack(inst);
    if (!slack.nonnegative())
        throw ValidationError("instance '" + inst.label +
                              "' is infeasible: negative slack on some machine");
    const int n = inst.job_count();

    if (inst.machines == 1) {
        if (n > limits.single_machine_max_jobs || slack.of(0) > limits.single_machine_max_slack)
            throw OracleRefusal("oracle refuses single-machine instance '" + inst.label + "': " +
                                std::to_string(n) + " jobs, slack " + std::to_string(slack.of(0)) +
                                " (limits: " + std::to_string(limits.single_machine_max_jobs) +
                                " jobs, slack " + std::to_string(limits.single_machine_max_slack) +
                                ")");
    } else {
        const double estimate = oracle_enumeration_estimate(inst);
        if (estimate > static_cast<double>(limits.budget))
            throw OracleRefusal("oracle refuses instance '" + inst.label + "': about " +
                                format_double(estimate) + " schedules exceed the budget of " +
                                std::to_string(limits.budget));
    }

    // shard over the job placed first; each worker scans the permutations of
    // the remaining jobs in lexicographic order
    std::vector<Candidate> best_per_shard(static_cast<std::size_t>(n));
    std::vector<unsigned long long> count_per_shard(static_cast<std::size_t>(n), 0);

    parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t shard) {
        ScheduleEvaluator evaluator(inst, kind);
        Candidate best;
        unsigned long long count = 0;
        std::vector<int> sequence(static_cast<std::size_t>(n));
        sequence[0] = static_cast<int>(shard);
        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
            if (i != static_cast<int>(shard)) rest.push_back(i);
        std::vector<std::vector<int>> pauses(
            static_cast<std::size_t>(inst.machines),
            std::vector<int>(static_cast<std::size_t>(n) + 1, 0));
        Schedule scratch;

        auto evaluate_current = [&] {
            schedule_from_pauses(inst, sequence, pauses, scratch);
            const double fitness = evaluator.fitness(scratch);
            ++count;
            Candidate candidate{fitness, scratch, true};
            if (candidate.beats(best)) best = std::move(candidate);
        };

        // nested composition scan, machine-major
        auto scan_machines = [&](auto&& self, int machine) -> void {
            if (machine == inst.machines) {
                evaluate_current();
                return;
            }
            for_each_composition(n + 1, slack.of(machine), pauses[static_cast<std::size_t>(machine)],
                                 0, [&] { self(self, machine + 1); });
        };

        do {
            std::copy(rest.begin(), rest.end(), sequence.begin() + 1);
            scan_machines(scan_machines, 0);
        } while (std::next_permutation(rest.begin(), rest.end()));

        best_per_shard[shard] = std::move(best);
        count_per_shard[shard] = count;
    });

    Candidate best;
    unsigned long long total = 0;
    for (std::size_t shard = 0; shard < best_per_shard.size(); ++shard) {
        total += count_per_shard[shard];
        if (best_per_shard[shard].beats(best)) best = std::move(best_per_shard[shard]);
    }

    OracleResult result;
    result.schedule = std::move(best.schedule);
    result.objective = ScheduleEvaluator(inst, kind).objective(result.schedule);
    result.enumerated = total;
    return result;
}

}  // namespace cafs
