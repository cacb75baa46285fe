#include "cafs/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "cafs/carbon.hpp"

namespace cafs {

const char* to_string(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::carbon: return "carbon";
        case ObjectiveKind::cost: return "cost";
        case ObjectiveKind::makespan: return "makespan";
    }
    return "?";
}

ObjectiveKind objective_from_string(const std::string& name) {
    if (name == "carbon") return ObjectiveKind::carbon;
    if (name == "cost") return ObjectiveKind::cost;
    if (name == "makespan") return ObjectiveKind::makespan;
    throw ValidationError("unknown objective '" + name + "'");
}

double lateness_penalty(int completion, int horizon) {
    return std::max(0, completion - horizon) * kLatenessPenaltyWeight;
}

namespace {

// Adds every operation's power into demand[0..T-1]; periods past the horizon
// are dropped.
void accumulate_demand(const Instance& inst, const Schedule& sched, std::vector<double>& demand) {
    const int horizon = inst.horizon;
    std::fill(demand.begin(), demand.end(), 0.0);
    for (int i = 0; i < inst.job_count(); ++i) {
        for (int m = 0; m < inst.machines; ++m) {
            const OperationSpec& op = inst.op(i, m);
            if (op.duration == 0) continue;
            const int start = sched.start_at(i, m);
            const int last = std::min(start + op.duration - 1, horizon);
            for (int t = start; t <= last; ++t)
                demand[static_cast<std::size_t>(t - 1)] += op.power[static_cast<std::size_t>(t - start)];
        }
    }
}

}  // namespace

DemandProfile demand_profile(const Instance& inst, const Schedule& sched) {
    DemandProfile profile;
    profile.demand.assign(static_cast<std::size_t>(inst.horizon), 0.0);
    accumulate_demand(inst, sched, profile.demand);
    profile.onsite_used.resize(profile.demand.size());
    profile.grid_draw.resize(profile.demand.size());
    for (std::size_t t = 0; t < profile.demand.size(); ++t) {
        profile.onsite_used[t] = std::min(profile.demand[t], inst.onsite_available[t]);
        profile.grid_draw[t] = profile.demand[t] - profile.onsite_used[t];
    }
    return profile;
}

ScheduleEvaluator::ScheduleEvaluator(const Instance& inst, ObjectiveKind kind)
    : inst_(&inst), kind_(kind), rate_(nullptr),
      demand_(static_cast<std::size_t>(inst.horizon), 0.0) {
    if (kind == ObjectiveKind::carbon) {
        rate_ = &inst.carbon_intensity;
    } else if (kind == ObjectiveKind::cost) {
        if (!inst.prices)
            throw ValidationError("instance '" + inst.label +
                                  "' has no prices series; cost objective unavailable");
        rate_ = &*inst.prices;
    }
}

double ScheduleEvaluator::fitness(const Schedule& sched) {
    return objective(sched).fitness();
}

Objective ScheduleEvaluator::objective(const Schedule& sched) {
    Objective result;
    result.kind = kind_;
    result.penalty = lateness_penalty(sched.completion, inst_->horizon);
    if (kind_ == ObjectiveKind::makespan) {
        result.value = sched.completion;
        return result;
    }
    accumulate_demand(*inst_, sched, demand_);
    const double h = inst_->period_hours;
    double total = 0.0;
    for (std::size_t t = 0; t < demand_.size(); ++t) {
        const double grid = std::max(demand_[t] - inst_->onsite_available[t], 0.0);
        total += (*rate_)[t] * grid * h;
    }
    result.value = total;
    return result;
}

Objective evaluate(const Instance& inst, const Schedule& sched, ObjectiveKind kind) {
    return ScheduleEvaluator(inst, kind).objective(sched);
}

bool objective_identity_check(const Instance& inst, const Schedule& sched) {
    const EmissionMatrix matrix = emission_matrix(inst);
    double grid_only = 0.0;
    for (int i = 0; i < inst.job_count(); ++i)
        for (int m = 0; m < inst.machines; ++m)
            grid_only += matrix.at(i, m, sched.start_at(i, m));
    const DemandProfile profile = demand_profile(inst, sched);
    double saved = 0.0;
    for (std::size_t t = 0; t < profile.onsite_used.size(); ++t)
        saved += inst.carbon_intensity[t] * profile.onsite_used[t] * inst.period_hours;
    const double decomposed = grid_only - saved;
    const double direct = evaluate(inst, sched, ObjectiveKind::carbon).value;
    const double scale = std::max({std::abs(decomposed), std::abs(direct), 1.0});
    return std::abs(decomposed - direct) <= 1e-6 * scale;
}

}  // namespace cafs
