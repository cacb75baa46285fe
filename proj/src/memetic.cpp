#include "cafs/memetic.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <numeric>

#include "cafs/serialize.hpp"

namespace cafs {

void check_individual(const Individual& ind, int jobs, int machines) {
    if (static_cast<int>(ind.job_keys.size()) != jobs)
        throw ValidationError("individual: job key count != job count");
    if (static_cast<int>(ind.pause_keys.size()) != machines * (jobs + 1))
        throw ValidationError("individual: pause key count != machines * (jobs + 1)");
    auto check_array = [](std::span<const double> keys, const std::string& name) {
        double sum = 0.0;
        for (double k : keys) {
            if (k < 0.0) throw ValidationError("individual: negative key in " + name);
            sum += k;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError("individual: " + name + " sums to " + format_double(sum));
    };
    check_array(ind.job_keys, "job keys");
    for (int m = 0; m < machines; ++m)
        check_array(ind.pause_row(m, jobs), "pause keys of machine " + std::to_string(m + 1));
}

void MaParams::validate() const {
    if (population < 2) throw ValidationError("population: must be >= 2");
    if (generations < 1) throw ValidationError("generations: must be >= 1");
    auto rate = [](double v, const char* name) {
        if (v < 0.0 || v > 1.0)
            throw ValidationError(std::string(name) + ": must lie in [0, 1]");
    };
    rate(crossover_rate, "crossover_rate");
    rate(crossover_prob_jobs, "crossover_prob_jobs");
    rate(crossover_prob_pauses, "crossover_prob_pauses");
    rate(mutation_prob_jobs, "mutation_prob_jobs");
    rate(mutation_prob_pauses, "mutation_prob_pauses");
    if (mutation_step_jobs < 0.0) throw ValidationError("mutation_step_jobs: must be >= 0");
    if (mutation_step_pauses < 0.0) throw ValidationError("mutation_step_pauses: must be >= 0");
}

MaParams MaParams::profile(const std::string& name) {
    MaParams p;
    if (name == "m1t1") {
        p.crossover_rate = 0.5851;
        p.crossover_prob_jobs = 0.3779;
        p.crossover_prob_pauses = 0.1041;
        p.mutation_prob_jobs = 0.1662;
        p.mutation_prob_pauses = 0.1985;
        p.mutation_step_jobs = 0.0564;
        p.mutation_step_pauses = 0.1873;
    } else if (name == "m1t3") {
        p.crossover_rate = 0.5565;
        p.crossover_prob_jobs = 0.1168;
        p.crossover_prob_pauses = 0.4627;
        p.mutation_prob_jobs = 0.0589;
        p.mutation_prob_pauses = 0.0227;
        p.mutation_step_jobs = 0.0168;
        p.mutation_step_pauses = 0.1832;
    } else if (name == "m3t1") {
        p.crossover_rate = 0.8273;
        p.crossover_prob_jobs = 0.3596;
        p.crossover_prob_pauses = 0.2963;
        p.mutation_prob_jobs = 0.0679;
        p.mutation_prob_pauses = 0.0330;
        p.mutation_step_jobs = 0.1039;
        p.mutation_step_pauses = 0.1959;
    } else if (name == "m3t3") {
        p.crossover_rate = 0.8203;
        p.crossover_prob_jobs = 0.4297;
        p.crossover_prob_pauses = 0.0681;
        p.mutation_prob_jobs = 0.0113;
        p.mutation_prob_pauses = 0.0084;
        p.mutation_step_jobs = 0.0050;
        p.mutation_step_pauses = 0.1901;
    } else {
        throw ValidationError("unknown parameter profile '" + name +
                              "' (expected m1t1, m1t3, m3t1 or m3t3)");
    }
    return p;
}

MaParams MaParams::defaults_for(const Instance& inst) {
    const bool multi = inst.machines > 1;
    const bool long_horizon = inst.horizon > 96;
    return profile(std::string(multi ? "m3" : "m1") + (long_horizon ? "t3" : "t1"));
}

MaParams MaParams::load(const std::string& path) {
    MaParams p;
    const std::string text = read_text_file(path);
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string key, value;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            throw ParseError(path + ": line " + std::to_string(line_no) + " is not 'key = value'");
        }
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        key = trim(line.substr(0, eq));
        value = trim(line.substr(eq + 1));
        try {
            if (key == "population") p.population = std::stoi(value);
            else if (key == "generations") p.generations = std::stoi(value);
            else if (key == "crossover_rate") p.crossover_rate = std::stod(value);
            else if (key == "crossover_prob_jobs") p.crossover_prob_jobs = std::stod(value);
            else if (key == "crossover_prob_pauses") p.crossover_prob_pauses = std::stod(value);
            else if (key == "mutation_prob_jobs") p.mutation_prob_jobs = std::stod(value);
            else if (key == "mutation_prob_pauses") p.mutation_prob_pauses = std::stod(value);
            else if (key == "mutation_step_jobs") p.mutation_step_jobs = std::stod(value);
            else if (key == "mutation_step_pauses") p.mutation_step_pauses = std::stod(value);
            else if (key == "rng_seed") p.rng_seed = std::stoull(value);
            else throw ParseError(path + ": unknown parameter '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ParseError(path + ": bad value for '" + key + "'");
        }
    }
    p.validate();
    return p;
}

SlackVector compute_slack(const Instance& inst) {
    SlackVector slack;
    slack.per_machine.resize(static_cast<std::size_t>(inst.machines));
    for (int m = 0; m < inst.machines; ++m) {
        int busy = 0;
        for (int i = 0; i < inst.job_count(); ++i) busy += inst.op(i, m).duration;
        slack.per_machine[static_cast<std::size_t>(m)] = inst.horizon - busy;
    }
    return slack;
}

bool SlackVector::nonnegative() const {
    return std::all_of(per_machine.begin(), per_machine.end(), [](int s) { return s >= 0; });
}

void normalize_or_uniform(std::span<double> keys) {
    double sum = 0.0;
    for (double k : keys) sum += k;
    if (sum <= 0.0) {
        const double uniform = 1.0 / static_cast<double>(keys.size());
        for (double& k : keys) k = uniform;
        return;
    }
    for (double& k : keys) k /= sum;
}

namespace {

// Shared by allocate_pauses and Decoder::allocate_into.
void largest_remainder(std::span<const double> keys, int slack, std::vector<double>& quota,
                       std::vector<std::pair<double, int>>& remainder, std::vector<int>& out) {
    const std::size_t slots = keys.size();
    out.assign(slots, 0);
    if (slack <= 0) return;
    double sum = 0.0;
    for (double k : keys) sum += k;
    quota.resize(slots);
    remainder.resize(slots);
    int allocated = 0;
    for (std::size_t j = 0; j < slots; ++j) {
        const double share = sum > 0.0 ? keys[j] / sum : 1.0 / static_cast<double>(slots);
        quota[j] = share * static_cast<double>(slack);
        const double floored = std::floor(quota[j]);
        out[j] = static_cast<int>(floored);
        allocated += out[j];
        remainder[j] = {quota[j] - floored, static_cast<int>(j)};
    }
    int deficit = slack - allocated;
    std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t j = 0; deficit > 0 && j < slots; ++j, --deficit)
        ++out[static_cast<std::size_t>(remainder[j].second)];
}

}  // namespace

std::vector<int> allocate_pauses(std::span<const double> keys, int slack) {
    std::vector<double> quota;
    std::vector<std::pair<double, int>> remainder;
    std::vector<int> out;
    largest_remainder(keys, slack, quota, remainder, out);
    return out;
}

Decoder::Decoder(const Instance& inst, const SlackVector& slack) : inst_(&inst), slack_(&slack) {
    order_.resize(static_cast<std::size_t>(inst.job_count()));
    pauses_.assign(static_cast<std::size_t>(inst.machines),
                   std::vector<int>(static_cast<std::size_t>(inst.job_count()) + 1, 0));
}

void Decoder::allocate_into(std::span<const double> keys, int slack, std::vector<int>& out) {
    largest_remainder(keys, slack, quota_, remainder_, out);
}

void Decoder::decode(const Individual& ind, Schedule& out) {
    const int n = inst_->job_count();
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
        const double ka = ind.job_keys[static_cast<std::size_t>(a)];
        const double kb = ind.job_keys[static_cast<std::size_t>(b)];
        if (ka != kb) return ka < kb;
        return a < b;  // ties break toward the lower job index
    });
    for (int m = 0; m < inst_->machines; ++m)
        allocate_into(ind.pause_row(m, n), slack_->of(m), pauses_[static_cast<std::size_t>(m)]);
    schedule_from_pauses(*inst_, order_, pauses_, out);
}

Schedule decode(const Individual& ind, const Instance& inst, const SlackVector& slack) {
    Schedule out;
    Decoder(inst, slack).decode(ind, out);
    return out;
}

Individual encode_fcfs(const Instance& inst) {
    const int n = inst.job_count();
    Individual ind;
    ind.job_keys.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ind.job_keys[static_cast<std::size_t>(i)] = i + 1;
    normalize_or_uniform(ind.job_keys);
    ind.pause_keys.assign(static_cast<std::size_t>(inst.machines) * (static_cast<std::size_t>(n) + 1), 0.0);
    for (int m = 0; m < inst.machines; ++m) ind.pause_row(m, n).back() = 1.0;
    return ind;
}

std::vector<Individual> init_population(const Instance& inst, const MaParams& params,
                                        ObjectiveKind kind) {
    params.validate();
    const SlackVector slack = compute_slack(inst);
    if (!slack.nonnegative())
        throw ValidationError("instance '" + inst.label +
                              "' is infeasible: negative slack on some machine");
    const int n = inst.job_count();
    const std::size_t pause_len =
        static_cast<std::size_t>(inst.machines) * (static_cast<std::size_t>(n) + 1);
    std::vector<Individual> population;
    population.reserve(static_cast<std::size_t>(params.population));
    Rng rng(derive_seed(params.rng_seed, 0x1717, 0));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::exponential_distribution<double> exponential(1.0);
    for (int p = 0; p + 1 < params.population; ++p) {
        Individual ind;
        ind.job_keys.resize(static_cast<std::size_t>(n));
        for (double& k : ind.job_keys) k = uniform(rng);
        normalize_or_uniform(ind.job_keys);
        ind.pause_keys.resize(pause_len);
        for (double& k : ind.pause_keys) k = exponential(rng);
        for (int m = 0; m < inst.machines; ++m) normalize_or_uniform(ind.pause_row(m, n));
        population.push_back(std::move(ind));
    }
    population.push_back(encode_fcfs(inst));
    Decoder decoder(inst, slack);
    ScheduleEvaluator evaluator(inst, kind);
    Schedule scratch;
    for (Individual& ind : population) {
        decoder.decode(ind, scratch);
        ind.fitness = evaluator.fitness(scratch);
    }
    return population;
}

void apply_key_swaps(Individual& a, Individual& b, const std::vector<char>& job_mask,
                     const std::vector<char>& pause_mask) {
    const int n = static_cast<int>(a.job_keys.size());
    const int machines = static_cast<int>(a.pause_keys.size()) / (n + 1);
    bool jobs_touched = false;
    for (std::size_t j = 0; j < job_mask.size(); ++j) {
        if (!job_mask[j]) continue;
        std::swap(a.job_keys[j], b.job_keys[j]);
        jobs_touched = true;
    }
    std::vector<char> row_touched(static_cast<std::size_t>(machines), 0);
    for (std::size_t j = 0; j < pause_mask.size(); ++j) {
        if (!pause_mask[j]) continue;
        std::swap(a.pause_keys[j], b.pause_keys[j]);
        row_touched[j / static_cast<std::size_t>(n + 1)] = 1;
    }
    // untouched arrays keep their exact bits
    if (jobs_touched) {
        normalize_or_uniform(a.job_keys);
        normalize_or_uniform(b.job_keys);
    }
    for (int m = 0; m < machines; ++m) {
        if (!row_touched[static_cast<std::size_t>(m)]) continue;
        normalize_or_uniform(a.pause_row(m, n));
        normalize_or_uniform(b.pause_row(m, n));
    }
    a.fitness.reset();
    b.fitness.reset();
}

std::pair<Individual, Individual> crossover(const Individual& parent_a, const Individual& parent_b,
                                            const MaParams& params, Rng& rng) {
    Individual a = parent_a;
    Individual b = parent_b;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<char> job_mask(a.job_keys.size());
    for (auto& bit : job_mask) bit = coin(rng) < params.crossover_prob_jobs;
    std::vector<char> pause_mask(a.pause_keys.size());
    for (auto& bit : pause_mask) bit = coin(rng) < params.crossover_prob_pauses;
    apply_key_swaps(a, b, job_mask, pause_mask);
    return {std::move(a), std::move(b)};
}

void mutate(Individual& ind, const MaParams& params, Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    auto perturb = [&](std::span<double> keys, double probability, double step) {
        std::normal_distribution<double> noise(0.0, step);
        bool touched = false;
        for (double& k : keys) {
            if (coin(rng) >= probability) continue;
            k = std::max(0.0, k + noise(rng));
            touched = true;
        }
        if (touched) normalize_or_uniform(keys);
    };
    if (params.mutation_step_jobs > 0.0)
        perturb(ind.job_keys, params.mutation_prob_jobs, params.mutation_step_jobs);
    const int n = static_cast<int>(ind.job_keys.size());
    const int machines = static_cast<int>(ind.pause_keys.size()) / (n + 1);
    if (params.mutation_step_pauses > 0.0)
        for (int m = 0; m < machines; ++m)
            perturb(ind.pause_row(m, n), params.mutation_prob_pauses, params.mutation_step_pauses);
    ind.fitness.reset();
}

bool local_search(Individual& ind, Decoder& decoder, ScheduleEvaluator& evaluator,
                  Schedule& scratch) {
    decoder.decode(ind, scratch);
    const double current = ind.fitness.value();
    const std::vector<int> sequence = scratch.sequence;
    for (std::size_t p = 0; p + 1 < sequence.size(); ++p) {
        const int job_a = sequence[p];
        const int job_b = sequence[p + 1];
        std::swap(ind.job_keys[static_cast<std::size_t>(job_a)],
                  ind.job_keys[static_cast<std::size_t>(job_b)]);
        decoder.decode(ind, scratch);
        const double trial = evaluator.fitness(scratch);
        if (trial < current) {
            ind.fitness = trial;
            return true;
        }
        std::swap(ind.job_keys[static_cast<std::size_t>(job_a)],
                  ind.job_keys[static_cast<std::size_t>(job_b)]);
    }
    return false;
}

namespace {

int crossover_child_count(const MaParams& params) {
    // nearest even integer so crossover always emits whole child pairs
    const double exact = params.crossover_rate * params.population;
    int n = 2 * static_cast<int>(std::lround(exact / 2.0));
    if (n < 0) n = 0;
    if (n > params.population) n = params.population - params.population % 2;
    return n;
}

double mean_fitness(const std::vector<Individual>& population) {
    double sum = 0.0;
    for (const Individual& ind : population) sum += ind.fitness.value();
    return sum / static_cast<double>(population.size());
}

}  // namespace

RunResult run_memetic(const Instance& inst, const MaParams& params, ObjectiveKind kind,
                      const RunOptions& options) {
    using clock = std::chrono::steady_clock;
    const auto start_time = clock::now();
    auto out_of_time = [&] {
        if (!options.time_limit_seconds) return false;
        const std::chrono::duration<double> elapsed = clock::now() - start_time;
        return elapsed.count() >= *options.time_limit_seconds;
    };

    const SlackVector slack = compute_slack(inst);
    std::vector<Individual> population = init_population(inst, params, kind);
    std::stable_sort(population.begin(), population.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness < b.fitness; });

    RunResult result;
    result.history.push_back({0, population.front().fitness.value(), mean_fitness(population)});

    const int rho = params.population;
    const int n_crossover = crossover_child_count(params);
    const int n_pairs = n_crossover / 2;
    const int n_elite = rho - n_crossover;

    std::vector<Individual> offspring(static_cast<std::size_t>(rho));
    std::vector<std::pair<int, int>> parents(static_cast<std::size_t>(n_pairs));

    for (int gen = 1; gen <= params.generations; ++gen) {
        if (out_of_time()) break;

        // parent pairs come from a dedicated per-generation stream so that
        // offspring substreams stay order-independent
        Rng pair_rng(derive_seed(params.rng_seed, 0x9a9a, static_cast<std::uint64_t>(gen)));
        std::uniform_int_distribution<int> pick(0, rho - 1);
        for (auto& pair : parents) {
            pair.first = pick(pair_rng);
            do {
                pair.second = pick(pair_rng);
            } while (pair.second == pair.first);
        }

        const int tasks = n_pairs + n_elite;
        parallel_for(static_cast<std::size_t>(tasks), options.workers, [&](std::size_t task) {
            Decoder decoder(inst, slack);
            ScheduleEvaluator evaluator(inst, kind);
            Schedule scratch;
            Rng rng(derive_seed(params.rng_seed, static_cast<std::uint64_t>(gen) << 20,
                                static_cast<std::uint64_t>(task)));
            auto finish = [&](Individual& child, std::size_t slot) {
                mutate(child, params, rng);
                decoder.decode(child, scratch);
                child.fitness = evaluator.fitness(scratch);
                local_search(child, decoder, evaluator, scratch);
                offspring[slot] = std::move(child);
            };
            if (task < static_cast<std::size_t>(n_pairs)) {
                const auto& [pa, pb] = parents[task];
                auto [child_a, child_b] =
                    crossover(population[static_cast<std::size_t>(pa)],
                              population[static_cast<std::size_t>(pb)], params, rng);
                finish(child_a, 2 * task);
                finish(child_b, 2 * task + 1);
            } else {
                // elitist share: copies of the current generation's best
                const std::size_t rank = task - static_cast<std::size_t>(n_pairs);
                Individual copy = population[rank];
                finish(copy, static_cast<std::size_t>(n_crossover) + rank);
            }
        });

        population.insert(population.end(), std::make_move_iterator(offspring.begin()),
                          std::make_move_iterator(offspring.end()));
        std::stable_sort(population.begin(), population.end(),
                         [](const Individual& a, const Individual& b) { return a.fitness < b.fitness; });
        population.resize(static_cast<std::size_t>(rho));
        result.history.push_back({gen, population.front().fitness.value(), mean_fitness(population)});
    }

    const Individual& best = population.front();
    result.best_schedule = decode(best, inst, slack);
    result.best_objective = ScheduleEvaluator(inst, kind).objective(result.best_schedule);
    return result;
}

}  // namespace cafs
