// Schedule evaluation: power demand over time, netting against on-site
// availability, and the carbon / cost / makespan objectives with the
// lateness penalty.
#pragma once

#include <string>
#include <vector>

#include "cafs/core.hpp"

namespace cafs {

enum class ObjectiveKind { carbon, cost, makespan };

const char* to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(const std::string& name);

constexpr double kLatenessPenaltyWeight = 1e10;

// max(0, completion - horizon) * 1e10
double lateness_penalty(int completion, int horizon);

struct Objective {
    ObjectiveKind kind = ObjectiveKind::carbon;
    double value = 0.0;    // grams, currency, or periods
    double penalty = 0.0;  // lateness penalty, 0 iff completion <= horizon
    double fitness() const { return value + penalty; }
};

// Total kW drawn per period, split into on-site-covered and grid-drawn power.
// Demand of periods past the horizon is not represented; it only matters for
// the lateness penalty.
struct DemandProfile {
    std::vector<double> demand;       // index 0 = period 1
    std::vector<double> onsite_used;  // y_t = min(demand_t, A_t)
    std::vector<double> grid_draw;    // demand_t - y_t
};

DemandProfile demand_profile(const Instance& instance, const Schedule& schedule);

// carbon: sum_t C_t * grid_draw_t * h; cost: same with prices; makespan: the
// completion period. Throws ValidationError for cost without a price series.
Objective evaluate(const Instance& instance, const Schedule& schedule, ObjectiveKind kind);

// Checks that the precomputed-emission-matrix decomposition
// sum E[i][m][start] - sum_t C_t * y_t * h agrees with direct per-period
// evaluation of the carbon objective (1e-6 relative). Feasible schedules only.
bool objective_identity_check(const Instance& instance, const Schedule& schedule);

// Reusable evaluator for hot loops: owns the scratch demand buffer, so
// repeated fitness calls allocate nothing. Stateless between calls and cheap
// to copy; give each worker thread its own.
class ScheduleEvaluator {
public:
    ScheduleEvaluator(const Instance& instance, ObjectiveKind kind);
    double fitness(const Schedule& schedule);
    Objective objective(const Schedule& schedule);
    ObjectiveKind kind() const { return kind_; }

private:
    const Instance* inst_;
    ObjectiveKind kind_;
    const std::vector<double>* rate_;  // carbon intensity or prices, null for makespan
    std::vector<double> demand_;
};

}  // namespace cafs
