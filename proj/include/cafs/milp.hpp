// Exact formulation of the scheduling problem: start-indicator binaries over
// precomputed feasible windows, sequencing binaries, on-site-use variables,
// LP-format export, and an exhaustive oracle for tiny instances.
#pragma once

#include <string>
#include <vector>

#include "cafs/carbon.hpp"
#include "cafs/core.hpp"
#include "cafs/evaluator.hpp"

namespace cafs {

struct LinTerm {
    int var = 0;
    double coef = 0.0;
};

struct LinRow {
    std::string name;
    std::vector<LinTerm> terms;
    char sense = 'E';  // 'E' ==, 'L' <=, 'G' >=
    double rhs = 0.0;
};

struct MilpVariable {
    std::string name;
    bool binary = false;
};

struct MilpModel {
    std::string label;
    std::vector<MilpVariable> variables;
    std::vector<LinTerm> objective;  // minimized
    std::vector<LinRow> rows;

    int x_count = 0, s_count = 0, y_count = 0, tau_count = 0, p_count = 0;

    // window bookkeeping for evaluating the model at a concrete schedule
    int machine_count = 0;
    std::vector<StartWindow> windows;   // job-major
    std::vector<int> x_offset;          // first x variable of each window
    int y_first = 0;
};

// Builds the model with objective  sum E[i][m][t] x - sum C_t h y_t  and the
// assignment, start-definition, power-definition, precedence, sequencing and
// on-site-capacity rows. Throws ValidationError when an operation has an
// empty start window.
MilpModel build_milp(const Instance& instance);

// Deterministic LP-format text; variables are named x_i_m_t, s_i_j, y_t,
// tau_i_m and p_i_m_t with 1-based indices.
std::string lp_text(const MilpModel& model);
void export_lp(const MilpModel& model, const std::string& path);

// Objective value of the model at the indicator encoding of `schedule`
// (x set from the start periods, y from the netted demand profile). The
// schedule must start every operation inside its window.
double objective_at(const MilpModel& model, const Instance& instance, const Schedule& schedule);

struct OracleLimits {
    int single_machine_max_jobs = 6;
    int single_machine_max_slack = 20;
    unsigned long long budget = 10'000'000;  // multi-machine schedule evaluations
};

// Raised instead of returning a truncated "optimum".
class OracleRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleResult {
    Schedule schedule;
    Objective objective;
    unsigned long long enumerated = 0;
};

// Enumerates job permutations x per-machine integer pause compositions (the
// space the decoder reaches; start times chain through precedence exactly as
// in decoding) and returns the minimum-fitness schedule. Ties break toward
// the lexicographically smallest sequence, then start matrix, independent of
// worker count.
OracleResult exact_oracle(const Instance& instance, ObjectiveKind kind,
                          const OracleLimits& limits = {}, int workers = 1);

// Number of schedules exact_oracle would evaluate (saturates at +inf).
double oracle_enumeration_estimate(const Instance& instance);

}  // namespace cafs
