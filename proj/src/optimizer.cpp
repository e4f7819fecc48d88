#include "flywheel/optimizer.hpp"

#include "flywheel/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace flywheel {

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                fn(i);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(count);
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

double unit_draw(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

} // namespace

ProblemConfig ProblemConfig::with_uniform_bounds(int n, double lower, double upper) {
    ProblemConfig cfg;
    cfg.lower_bounds.assign(static_cast<std::size_t>(n), lower);
    cfg.upper_bounds.assign(static_cast<std::size_t>(n), upper);
    return cfg;
}

void ProblemConfig::validate(std::size_t n_variables) const {
    auto fail = [](const std::string& m) { throw ParameterError("problem config: " + m); };
    if (lower_bounds.size() != n_variables || upper_bounds.size() != n_variables) {
        fail("expected " + std::to_string(n_variables) + " lower and upper bounds");
    }
    for (std::size_t i = 0; i < n_variables; ++i) {
        if (!(lower_bounds[i] <= upper_bounds[i]) || !std::isfinite(lower_bounds[i]) ||
            !std::isfinite(upper_bounds[i])) {
            fail("bounds for variable " + std::to_string(i + 1) + " are not an ordered finite interval");
        }
    }
    if (!(penalty_constant > 0.0)) {
        fail("penalty_constant must be positive");
    }
    if (population_size < 2) {
        fail("population_size must be at least 2");
    }
    if (max_iterations < 0) {
        fail("max_iterations must be non-negative");
    }
    if (max_stall_generations < 1) {
        fail("max_stall_generations must be at least 1");
    }
    if (!(function_tolerance > 0.0)) {
        fail("function_tolerance must be positive");
    }
}

double penalty(const Constraints& g, const ProblemConfig& config) {
    const double cp = config.penalty_constant;
    double total = 0.0;
    if (g.g1 > 0.0) {
        total += cp;
    }
    if (g.g2 > 0.0) {
        total += config.penalty_form == PenaltyForm::exponent ? cp * cp : cp;
    }
    return total;
}

FlywheelProblem::FlywheelProblem(const FlywheelSpec& spec, const SolverOptions& options)
    : model_(spec), solver_(spec, options) {}

Constraints FlywheelProblem::evaluate_constraints(std::span<const double> x) const {
    return {model_.mass(x) - spec().max_mass, solver_.max_von_mises(x) - spec().allowable_stress};
}

Evaluation FlywheelProblem::evaluate(std::span<const double> x, const ProblemConfig& config) const {
    Evaluation ev;
    ev.mass = model_.mass(x);
    ev.kinetic_energy = model_.kinetic_energy(x);
    ev.max_stress = solver_.max_von_mises(x);
    ev.constraints = {ev.mass - spec().max_mass, ev.max_stress - spec().allowable_stress};
    ev.objective = -ev.kinetic_energy + penalty(ev.constraints, config);
    return ev;
}

double FlywheelProblem::penalized_objective(std::span<const double> x, const ProblemConfig& config) const {
    return evaluate(x, config).objective;
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
    case StopReason::max_iterations:
        return "max_iterations";
    case StopReason::stalled:
        return "stalled";
    }
    return "unknown";
}

std::size_t Population::best_index() const {
    return static_cast<std::size_t>(std::min_element(objectives.begin(), objectives.end()) - objectives.begin());
}

std::size_t Population::worst_index() const {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < objectives.size(); ++i) {
        if (objectives[i] > objectives[worst]) {
            worst = i;
        }
    }
    return worst;
}

JayaDraws JayaDraws::sample(std::size_t candidates, std::size_t variables, RandomDraws mode, std::mt19937_64& rng) {
    JayaDraws d;
    d.mode = mode;
    const std::size_t count = mode == RandomDraws::per_variable ? variables : candidates * variables;
    d.r1.resize(count);
    d.r2.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        d.r1[i] = unit_draw(rng);
        d.r2[i] = unit_draw(rng);
    }
    return d;
}

double JayaDraws::r1_at(std::size_t candidate, std::size_t variable, std::size_t variables) const {
    return mode == RandomDraws::per_variable ? r1[variable] : r1[candidate * variables + variable];
}

double JayaDraws::r2_at(std::size_t candidate, std::size_t variable, std::size_t variables) const {
    return mode == RandomDraws::per_variable ? r2[variable] : r2[candidate * variables + variable];
}

std::vector<double> jaya_move(std::span<const double> x, std::span<const double> best, std::span<const double> worst,
                              std::span<const double> r1, std::span<const double> r2, std::span<const double> lower,
                              std::span<const double> upper) {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double ax = std::abs(x[j]);
        const double moved = x[j] + r1[j] * (best[j] - ax) - r2[j] * (worst[j] - ax);
        out[j] = std::clamp(moved, lower[j], upper[j]);
    }
    return out;
}

std::size_t jaya_step(Population& population, const Objective& objective, const ProblemConfig& config,
                      const JayaDraws& draws, unsigned threads) {
    const std::size_t pop = population.size();
    if (pop < 2 || population.objectives.size() != pop) {
        throw ParameterError("jaya_step needs an evaluated population of at least two candidates");
    }
    const std::size_t m = population.members.front().size();
    const std::vector<double> best = population.members[population.best_index()];
    const std::vector<double> worst = population.members[population.worst_index()];

    std::vector<std::vector<double>> trials(pop);
    std::vector<double> r1(m), r2(m);
    for (std::size_t k = 0; k < pop; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            r1[j] = draws.r1_at(k, j, m);
            r2[j] = draws.r2_at(k, j, m);
        }
        trials[k] = jaya_move(population.members[k], best, worst, r1, r2, config.lower_bounds, config.upper_bounds);
    }

    std::vector<double> trial_f(pop);
    std::vector<char> evaluated(pop, 0);
    parallel_for(pop, threads, [&](std::size_t k) {
        // The objective is deterministic; an unmoved candidate cannot improve.
        if (trials[k] == population.members[k]) {
            return;
        }
        trial_f[k] = objective(trials[k]);
        evaluated[k] = 1;
    });

    std::size_t evaluations = 0;
    for (std::size_t k = 0; k < pop; ++k) {
        if (!evaluated[k]) {
            continue;
        }
        ++evaluations;
        if (trial_f[k] < population.objectives[k]) {
            population.members[k] = std::move(trials[k]);
            population.objectives[k] = trial_f[k];
        }
    }
    return evaluations;
}

std::size_t jaya_step(Population& population, const Objective& objective, const ProblemConfig& config,
                      std::mt19937_64& rng, unsigned threads) {
    const std::size_t m = population.members.empty() ? 0 : population.members.front().size();
    const JayaDraws draws = JayaDraws::sample(population.size(), m, config.random_draws, rng);
    return jaya_step(population, objective, config, draws, threads);
}

Population initial_population(const Objective& objective, const ProblemConfig& config, std::mt19937_64& rng,
                              unsigned threads) {
    const std::size_t m = config.lower_bounds.size();
    Population population;
    population.members.resize(static_cast<std::size_t>(config.population_size));
    for (auto& x : population.members) {
        x.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double lo = config.lower_bounds[j];
            const double hi = config.upper_bounds[j];
            x[j] = lo + (hi - lo) * unit_draw(rng);
        }
    }
    population.objectives.resize(population.members.size());
    parallel_for(population.members.size(), threads,
                 [&](std::size_t k) { population.objectives[k] = objective(population.members[k]); });
    return population;
}

double stall_measure(double f, double f_prev) { return std::abs(f - f_prev) / std::max(1.0, std::abs(f)); }

RunResult run(const FlywheelProblem& problem, const ProblemConfig& config) {
    config.validate(problem.dimension());
    const unsigned threads = resolve_threads(config.threads);
    const Objective objective = [&](std::span<const double> x) { return problem.penalized_objective(x, config); };

    std::mt19937_64 rng(config.random_seed);
    Population population = initial_population(objective, config, rng, threads);

    RunResult result;
    result.evaluations = population.size();
    double previous = population.objectives[population.best_index()];
    result.history.push_back(previous);

    int stall = 0;
    for (int it = 1; it <= config.max_iterations; ++it) {
        result.evaluations += jaya_step(population, objective, config, rng, threads);
        const double current = population.objectives[population.best_index()];
        result.history.push_back(current);
        result.iterations_run = it;
        stall = stall_measure(current, previous) <= config.function_tolerance ? stall + 1 : 0;
        previous = current;
        if (stall > config.max_stall_generations) {
            result.stop_reason = StopReason::stalled;
            break;
        }
    }

    const std::size_t best = population.best_index();
    result.best_x = population.members[best];
    const Evaluation ev = problem.evaluate(result.best_x, config);
    result.best_objective = population.objectives[best];
    result.kinetic_energy = ev.kinetic_energy;
    result.mass = ev.mass;
    result.max_stress = ev.max_stress;
    return result;
}

RunResult run(const FlywheelSpec& spec, const ProblemConfig& config, const SolverOptions& options) {
    return run(FlywheelProblem(spec, options), config);
}

unsigned resolve_threads(unsigned requested) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (const char* env = std::getenv("FLYWHEEL_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) {
            n = std::min(n, static_cast<unsigned>(cap));
        }
    }
    return n;
}

} // namespace flywheel
