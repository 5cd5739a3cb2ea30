#pragma once

// Bounded population metaheuristics: global-best PSO and SHADE differential
// evolution. Both call a per-candidate objective hook and stop when the
// evaluation budget is spent.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mfid/core.hpp"

namespace mfid::optimizers {

/// Value returned by the objective hook. `hf` marks evaluations that ran the
/// high-fidelity model; the rest are counted as skipped (RB).
struct Evaluation {
    double fitness = 0.0;
    bool hf = true;
};

using Objective = std::function<Evaluation(std::span<const double>)>;

struct TraceEntry {
    int eval_index = 0;  // 1-based
    double fitness = 0.0;
    bool hf = true;
    double best_so_far = 0.0;
};

struct OptimizationResult {
    Vector x_best;
    double f_best = 0.0;
    std::vector<TraceEntry> trace;
};

enum class Init { uniform, lhs };

struct PsoConfig {
    int swarm = 10;
    double inertia = 0.8;
    double cognitive = 1.0;
    double social = 1.0;
    double velocity_clamp = 0.5;  // fraction of the box width
    Init init = Init::uniform;
    /// Optional starting positions (size swarm); velocities then start at zero.
    std::vector<Vector> initial_positions;

    void validate() const;
};

struct ShadeMemory {
    Vector f;
    Vector cr;
};

struct ShadeConfig {
    int population = 10;
    double archive_factor = 2.6;
    int memory_size = 4;
    double p_best = 0.11;
    Init init = Init::uniform;
    std::vector<Vector> initial_population;
    /// Called after every memory update.
    std::function<void(const ShadeMemory&)> on_memory_update;

    void validate() const;
};

/// Throws std::invalid_argument when the budget cannot cover the initial swarm.
OptimizationResult pso_run(const Objective& objective, const Bounds& bounds, const PsoConfig& cfg,
                           EvaluationBudget& budget, std::uint64_t seed);

OptimizationResult shade_run(const Objective& objective, const Bounds& bounds, const ShadeConfig& cfg,
                             EvaluationBudget& budget, std::uint64_t seed);

/// Takes mutant[j] where u_j < cr or j == j_rand, target[j] otherwise.
Vector binomial_crossover(std::span<const double> target, std::span<const double> mutant, double cr,
                          std::size_t j_rand, std::mt19937_64& rng);

/// Midpoint-to-bound repair relative to the parent.
Vector repair_midpoint(std::span<const double> mutant, std::span<const double> parent, const Bounds& bounds);

constexpr int kInnerBudget = 800;

/// Surrogate-only SHADE run used by boundary refinement: population equals
/// the dimension, 800 evaluations.
OptimizationResult refinement_inner_run(const std::function<double(std::span<const double>)>& objective,
                                        const Bounds& bounds, std::uint64_t seed);

void write_trace_csv(const std::vector<TraceEntry>& trace, const std::string& path);
std::vector<TraceEntry> read_trace_csv(const std::string& path);

}  // namespace mfid::optimizers
