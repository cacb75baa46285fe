// Dual random-key memetic search: a job-priority key array plus per-machine
// pause key arrays, evolved with controlled swap crossover, nonuniform
// mutation, adjacent-swap local search and elitist selection.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cafs/core.hpp"
#include "cafs/evaluator.hpp"
#include "cafs/util.hpp"

namespace cafs {

// Genome: N job keys summing to one, and per machine N+1 pause keys summing
// to one (pause before, between and after the N operations).
struct Individual {
    std::vector<double> job_keys;    // size N
    std::vector<double> pause_keys;  // machine-major, size M * (N + 1)
    std::optional<double> fitness;

    std::span<double> pause_row(int machine, int jobs) {
        return {pause_keys.data() + static_cast<std::size_t>(machine) *
                                        static_cast<std::size_t>(jobs + 1),
                static_cast<std::size_t>(jobs + 1)};
    }
    std::span<const double> pause_row(int machine, int jobs) const {
        return {pause_keys.data() + static_cast<std::size_t>(machine) *
                                        static_cast<std::size_t>(jobs + 1),
                static_cast<std::size_t>(jobs + 1)};
    }

    bool same_genome(const Individual& other) const {
        return job_keys == other.job_keys && pause_keys == other.pause_keys;
    }
};

// Throws ValidationError when a key is negative or an array drifts off
// unit sum by more than 1e-9.
void check_individual(const Individual& individual, int jobs, int machines);

struct MaParams {
    int population = 250;                 // rho
    int generations = 100;                // gamma
    double crossover_rate = 0.5851;       // xi, fraction of offspring from crossover
    double crossover_prob_jobs = 0.3779;  // chi_j, per-gene swap probability
    double crossover_prob_pauses = 0.1041;
    double mutation_prob_jobs = 0.1662;   // pi_j, per-gene mutation probability
    double mutation_prob_pauses = 0.1985;
    double mutation_step_jobs = 0.0564;   // sigma_j, noise standard deviation
    double mutation_step_pauses = 0.1873;
    std::uint64_t rng_seed = 1;

    void validate() const;  // throws ValidationError

    // Tuned defaults per dataset class: m1t1, m1t3, m3t1, m3t3.
    static MaParams profile(const std::string& name);
    // Picks the profile matching the instance shape (machine count, horizon).
    static MaParams defaults_for(const Instance& instance);
    // key = value file using the field names above (rng_seed optional).
    static MaParams load(const std::string& path);
};

// Idle budget per machine: horizon minus total processing time. Search
// requires every entry >= 0.
struct SlackVector {
    std::vector<int> per_machine;

    bool nonnegative() const;
    int of(int machine) const { return per_machine[static_cast<std::size_t>(machine)]; }
};

SlackVector compute_slack(const Instance& instance);

// Largest-remainder integerization of key shares: result sums to `slack`
// exactly, remainders win extra units in descending order, ties to the
// lowest index.
std::vector<int> allocate_pauses(std::span<const double> keys, int slack);

// Rescales to unit sum; an all-zero array resets to the uniform vector.
void normalize_or_uniform(std::span<double> keys);

// Decodes genomes into schedules. Owns scratch buffers; one per thread.
class Decoder {
public:
    Decoder(const Instance& instance, const SlackVector& slack);
    void decode(const Individual& individual, Schedule& out);

private:
    const Instance* inst_;
    const SlackVector* slack_;
    std::vector<int> order_;
    std::vector<std::vector<int>> pauses_;
    std::vector<double> quota_;
    std::vector<std::pair<double, int>> remainder_;

    void allocate_into(std::span<const double> keys, int slack, std::vector<int>& out);
};

Schedule decode(const Individual& individual, const Instance& instance, const SlackVector& slack);

// Genome whose decode reproduces the FCFS schedule: strictly ascending job
// keys, pause mass entirely on the trailing slot.
Individual encode_fcfs(const Instance& instance);

// rho - 1 random individuals (uniform job keys, exponential pause keys, all
// normalized) plus the FCFS seed, each with fitness evaluated. Throws when
// some machine has negative slack.
std::vector<Individual> init_population(const Instance& instance, const MaParams& params,
                                        ObjectiveKind kind);

// Swaps keys at masked positions between two genomes and renormalizes each
// key array. Exposed as the deterministic core of `crossover`.
void apply_key_swaps(Individual& a, Individual& b, const std::vector<char>& job_mask,
                     const std::vector<char>& pause_mask);

// Controlled swap crossover: each job key swaps with probability chi_j, each
// pause key with probability chi_p; children are renormalized. Offspring
// fitness is left unset.
std::pair<Individual, Individual> crossover(const Individual& parent_a, const Individual& parent_b,
                                            const MaParams& params, Rng& rng);

// Nonuniform mutation: per-gene probability pi, additive N(0, sigma) noise,
// negatives clipped to zero, arrays renormalized. Clears cached fitness.
void mutate(Individual& individual, const MaParams& params, Rng& rng);

// First-improvement scan over adjacent sequence positions; on improvement the
// two jobs' keys are exchanged and the cached fitness updated. Returns true
// if a swap was applied. `individual.fitness` must be set.
bool local_search(Individual& individual, Decoder& decoder, ScheduleEvaluator& evaluator,
                  Schedule& scratch);

struct GenerationStat {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
};

struct RunResult {
    Schedule best_schedule;
    Objective best_objective;
    std::vector<GenerationStat> history;  // entry 0 is the initial population
};

struct RunOptions {
    std::optional<double> time_limit_seconds;
    int workers = 1;
};

// The full generational loop. Bit-reproducible for a fixed rng_seed,
// independent of `workers`.
RunResult run_memetic(const Instance& instance, const MaParams& params, ObjectiveKind kind,
                      const RunOptions& options = {});

}  // namespace cafs
