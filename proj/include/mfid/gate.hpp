#pragma once

// Surrogate screening of candidate designs: a candidate whose predicted
// summary M_info is farther than omega = c * cv_rmse from T_info receives
// the penalty lambda * exp(delta) instead of a high-fidelity evaluation.

#include <memory>
#include <span>
#include <string>

#include "mfid/core.hpp"
#include "mfid/optimizers.hpp"
#include "mfid/surrogate.hpp"

namespace mfid::gate {

enum class InputAdapter { identity, downsample_80_to_20 };

InputAdapter adapter_for(Problem p);

struct GateConfig {
    double c = 1.0;
    double lambda = 2.0;
    std::shared_ptr<const surrogate::SurrogateModel> model;
    TargetSpec target;
    InputAdapter adapter = InputAdapter::identity;

    double omega() const;
    /// Throws std::invalid_argument unless c > 0, lambda > 0, a model is
    /// attached and omega > 0.
    void validate() const;
};

enum class GatePath { penalized, hf };

struct GatedResult {
    double fitness = 0.0;
    GatePath path = GatePath::hf;
    double delta = 0.0;
    double m_info = 0.0;
    bool hf_failed = false;  // HF evaluator threw; penalized at delta = omega
};

double penalty(double delta, double lambda = 2.0);

/// Surrogate input for a design vector: identity or the 80 -> 20 boundary
/// downsampling. Throws std::invalid_argument on a length mismatch.
Vector adapt_input(std::span<const double> x, InputAdapter adapter);

/// Gate decision and fitness without touching any budget.
GatedResult screen(std::span<const double> x, const GateConfig& cfg, const PerformanceEvaluator& hf);

/// screen() followed by one budget tick (HF or skipped). Throws
/// BudgetExhausted when no evaluations remain.
GatedResult gated_objective(std::span<const double> x, const GateConfig& cfg, const PerformanceEvaluator& hf,
                            EvaluationBudget& budget);

/// Optimizer hook running the gate; the optimizer does the budget ticks.
optimizers::Objective gated_hook(const GateConfig& cfg, const PerformanceEvaluator& hf);

/// Optimizer hook that always runs the HF evaluator. Evaluator failures are
/// scored with `failure_fitness` and still count as HF runs.
optimizers::Objective hf_hook(const TargetSpec& target, const PerformanceEvaluator& hf, double failure_fitness);

}  // namespace mfid::gate
