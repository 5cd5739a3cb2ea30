#include "mfid/gate.hpp"

#include <cmath>

#include "mfid/diffusion.hpp"

namespace mfid::gate {

InputAdapter adapter_for(Problem p)
{
    return p == Problem::sfr ? InputAdapter::downsample_80_to_20 : InputAdapter::identity;
}

double GateConfig::omega() const
{
    return model ? c * model->cv_rmse : 0.0;
}

void GateConfig::validate() const
{
    if (!(c > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("gate: c and lambda must be positive");
    if (!model)
        throw std::invalid_argument("gate: no surrogate model attached");
    if (!(omega() > 0.0) || !std::isfinite(omega()))
        throw std::invalid_argument("gate: omega = c * cv_rmse must be positive and finite");
    if (target.values.empty())
        throw std::invalid_argument("gate: empty target");
}

double penalty(double delta, double lambda)
{
    return lambda * std::exp(delta);
}

Vector adapt_input(std::span<const double> x, InputAdapter adapter)
{
    if (adapter == InputAdapter::identity)
        return Vector(x.begin(), x.end());
    if (x.size() != 80)
        throw std::invalid_argument("adapt_input: expected an 80-value boundary, got " + std::to_string(x.size()));
    return diffusion::downsample_bc(x);
}

GatedResult screen(std::span<const double> x, const GateConfig& cfg, const PerformanceEvaluator& hf)
{
    GatedResult r;
    r.m_info = cfg.model->predict(adapt_input(x, cfg.adapter));
    r.delta = std::abs(r.m_info - cfg.target.info);
    const double omega = cfg.omega();
    if (r.delta > omega) {
        r.path = GatePath::penalized;
        r.fitness = penalty(r.delta, cfg.lambda);
        return r;
    }
    try {
        r.fitness = rmse_objective(hf.evaluate(x), cfg.target.values);
        r.path = GatePath::hf;
    } catch (const EvaluationError&) {
        r.hf_failed = true;
        r.path = GatePath::penalized;
        r.delta = omega;
        r.fitness = penalty(omega, cfg.lambda);
    }
    return r;
}

GatedResult gated_objective(std::span<const double> x, const GateConfig& cfg, const PerformanceEvaluator& hf,
                            EvaluationBudget& budget)
{
    if (budget.exhausted())
        throw BudgetExhausted();
    const GatedResult r = screen(x, cfg, hf);
    budget.tick(r.path == GatePath::penalized);
    return r;
}

optimizers::Objective gated_hook(const GateConfig& cfg, const PerformanceEvaluator& hf)
{
    cfg.validate();
    return [&cfg, &hf](std::span<const double> x) {
        const GatedResult r = screen(x, cfg, hf);
        return optimizers::Evaluation{r.fitness, r.path == GatePath::hf};
    };
}

optimizers::Objective hf_hook(const TargetSpec& target, const PerformanceEvaluator& hf, double failure_fitness)
{
    return [&target, &hf, failure_fitness](std::span<const double> x) {
        try {
            return optimizers::Evaluation{rmse_objective(hf.evaluate(x), target.values), true};
        } catch (const EvaluationError&) {
            return optimizers::Evaluation{failure_fitness, true};
        }
    };
}

}  // namespace mfid::gate
