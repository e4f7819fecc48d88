#pragma once

#include "flywheel/flywheel_model.hpp"
#include "flywheel/stress_solver.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace flywheel {

/// How violated constraints are charged.
enum class PenaltyForm {
    per_constraint,  // CP for each violated constraint
    exponent,        // CP^B for violated constraint B (B = 1 mass, 2 stress)
};

/// Granularity of the two Jaya random numbers.
enum class RandomDraws {
    per_variable,   // one (r1, r2) pair per variable per generation, shared by all candidates
    per_candidate,  // a fresh pair per variable per candidate
};

struct ProblemConfig {
    std::vector<double> lower_bounds;
    std::vector<double> upper_bounds;
    double penalty_constant = 1e8;
    PenaltyForm penalty_form = PenaltyForm::per_constraint;
    int population_size = 1000;
    int max_iterations = 500;
    int max_stall_generations = 50;
    double function_tolerance = 1e-6;
    std::uint64_t random_seed = 1;
    RandomDraws random_draws = RandomDraws::per_candidate;
    unsigned threads = 1;  // 0 = hardware concurrency

    /// Uniform bounds for `n` variables (defaults: 0.01 m to 0.06 m).
    static ProblemConfig with_uniform_bounds(int n, double lower = 0.01, double upper = 0.06);

    /// Throws ParameterError. LB == UB is allowed (a pinned variable); LB > UB is not.
    void validate(std::size_t n_variables) const;
};

struct Constraints {
    double g1 = 0.0;  // mass - max_mass, kg
    double g2 = 0.0;  // max Von-Mises - allowable, Pa

    bool feasible() const noexcept { return g1 <= 0.0 && g2 <= 0.0; }
};

struct Evaluation {
    double mass = 0.0;
    double kinetic_energy = 0.0;
    double max_stress = 0.0;
    Constraints constraints;
    double objective = 0.0;
};

/// Static penalty for the given constraint values.
double penalty(const Constraints& g, const ProblemConfig& config);

/// Binds a flywheel model and a stress solver into a thread-safe objective.
class FlywheelProblem {
public:
    explicit FlywheelProblem(const FlywheelSpec& spec, const SolverOptions& options = {});

    const FlywheelModel& model() const noexcept { return model_; }
    const StressSolver& solver() const noexcept { return solver_; }
    const FlywheelSpec& spec() const noexcept { return model_.spec(); }
    std::size_t dimension() const noexcept { return model_.radii().size(); }

    Constraints evaluate_constraints(std::span<const double> x) const;
    Evaluation evaluate(std::span<const double> x, const ProblemConfig& config) const;
    double penalized_objective(std::span<const double> x, const ProblemConfig& config) const;

private:
    FlywheelModel model_;
    StressSolver solver_;
};

enum class StopReason { max_iterations, stalled };

std::string_view to_string(StopReason reason);

struct RunResult {
    std::vector<double> best_x;
    double best_objective = 0.0;
    double kinetic_energy = 0.0;
    double mass = 0.0;
    double max_stress = 0.0;
    std::vector<double> history;  // best objective after initialisation (entry 0) and each generation
    int iterations_run = 0;
    StopReason stop_reason = StopReason::max_iterations;
    std::uint64_t evaluations = 0;
};

struct Population {
    std::vector<std::vector<double>> members;
    std::vector<double> objectives;

    std::size_t size() const noexcept { return members.size(); }
    /// Lowest-index candidate with the smallest / largest objective.
    std::size_t best_index() const;
    std::size_t worst_index() const;
};

/// Random numbers for one generation. With per-variable draws r1/r2 hold one value per
/// variable; with per-candidate draws they are candidate-major, population x variables.
struct JayaDraws {
    RandomDraws mode = RandomDraws::per_variable;
    std::vector<double> r1;
    std::vector<double> r2;

    static JayaDraws sample(std::size_t candidates, std::size_t variables, RandomDraws mode, std::mt19937_64& rng);
    double r1_at(std::size_t candidate, std::size_t variable, std::size_t variables) const;
    double r2_at(std::size_t candidate, std::size_t variable, std::size_t variables) const;
};

using Objective = std::function<double(std::span<const double>)>;

/// x' = x + r1 (best - |x|) - r2 (worst - |x|), clamped to the bounds.
std::vector<double> jaya_move(std::span<const double> x, std::span<const double> best, std::span<const double> worst,
                              std::span<const double> r1, std::span<const double> r2, std::span<const double> lower,
                              std::span<const double> upper);

/// One Jaya generation with explicit random numbers. Trials replace their parent only
/// when strictly better. Evaluations may run on `threads` workers; the outcome does not
/// depend on the thread count. Returns the number of objective evaluations.
std::size_t jaya_step(Population& population, const Objective& objective, const ProblemConfig& config,
                      const JayaDraws& draws, unsigned threads = 1);

/// Same, drawing the random numbers from `rng`.
std::size_t jaya_step(Population& population, const Objective& objective, const ProblemConfig& config,
                      std::mt19937_64& rng, unsigned threads = 1);

/// Uniform random population within the bounds, evaluated.
Population initial_population(const Objective& objective, const ProblemConfig& config, std::mt19937_64& rng,
                              unsigned threads = 1);

/// Relative change used by the stall counter: |f - f_prev| / max(1, |f|).
double stall_measure(double f, double f_prev);

RunResult run(const FlywheelProblem& problem, const ProblemConfig& config);
RunResult run(const FlywheelSpec& spec, const ProblemConfig& config, const SolverOptions& options = {});

/// Resolved worker count: `requested` (0 = hardware), capped by FLYWHEEL_THREADS when set.
unsigned resolve_threads(unsigned requested);

} // namespace flywheel
