#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mfid/diffusion.hpp"
#include "mfid/gate.hpp"

using namespace mfid;
using namespace mfid::gate;

namespace {

// Surrogate whose prediction is `value` for every input.
std::shared_ptr<const surrogate::SurrogateModel> constant_model(std::size_t dim, double value, double cv_rmse)
{
    surrogate::MlpConfig c;
    c.widths = {3};
    c.dropout = {0.0};
    auto m = surrogate::initialize(dim, c, 1);
    for (auto& l : m.layers) {
        l.weights.setZero();
        l.bias.setZero();
    }
    m.label_mean = value;
    m.cv_rmse = cv_rmse;
    return std::make_shared<const surrogate::SurrogateModel>(std::move(m));
}

// Surrogate predicting the mean of its input.
std::shared_ptr<const surrogate::SurrogateModel> mean_model(std::size_t dim, double cv_rmse)
{
    surrogate::MlpConfig c;
    c.widths = {1};
    c.dropout = {0.0};
    c.activation = surrogate::Activation::linear;
    auto m = surrogate::initialize(dim, c, 1);
    m.layers[0].weights.setConstant(1.0 / static_cast<double>(dim));
    m.layers[0].bias.setZero();
    m.layers[1].weights.setConstant(1.0);
    m.layers[1].bias.setZero();
    m.cv_rmse = cv_rmse;
    return std::make_shared<const surrogate::SurrogateModel>(std::move(m));
}

class FixedEvaluator : public PerformanceEvaluator {
public:
    explicit FixedEvaluator(Vector out) : out_(std::move(out)) {}
    Vector evaluate(std::span<const double>) const override
    {
        ++calls;
        return out_;
    }
    mutable int calls = 0;

private:
    Vector out_;
};

class FailingEvaluator : public PerformanceEvaluator {
public:
    Vector evaluate(std::span<const double>) const override { throw EvaluationError("solver crashed"); }
};

// Performance equals the design itself.
class EchoEvaluator : public PerformanceEvaluator {
public:
    Vector evaluate(std::span<const double> x) const override { return Vector(x.begin(), x.end()); }
};

GateConfig config(double m_info, double t_info, double cv_rmse, double c = 1.0)
{
    GateConfig g;
    g.c = c;
    g.model = constant_model(2, m_info, cv_rmse);
    g.target.values = {t_info, t_info};
    g.target.info = t_info;
    return g;
}

}  // namespace

TEST_CASE("penalty for delta = 1 is 2e")
{
    CHECK(std::abs(penalty(1.0) - 2.0 * std::numbers::e) <= 1e-9);
    CHECK(std::abs(penalty(1.0) - 5.43656365691809) <= 1e-9);
    CHECK(penalty(0.0, 3.0) == 3.0);
}

TEST_CASE("delta inside omega runs HF")
{
    const GateConfig g = config(5.0, 5.3, 0.61);
    CHECK(g.omega() == doctest::Approx(0.61));
    const FixedEvaluator hf({5.0, 5.6});
    EvaluationBudget budget(10);
    const GatedResult r = gated_objective(Vector{0.0, 0.0}, g, hf, budget);
    CHECK(r.path == GatePath::hf);
    CHECK(r.m_info == doctest::Approx(5.0));
    CHECK(r.delta == doctest::Approx(0.3));
    CHECK(r.fitness == doctest::Approx(0.3));
    CHECK(hf.calls == 1);
    CHECK(budget.hf_count() == 1);
    CHECK(budget.rb() == 0);
}

TEST_CASE("delta beyond omega is penalized without HF")
{
    const GateConfig g = config(5.0, 6.0, 0.61);
    const FixedEvaluator hf({0.0, 0.0});
    EvaluationBudget budget(10);
    const GatedResult r = gated_objective(Vector{0.0, 0.0}, g, hf, budget);
    CHECK(r.path == GatePath::penalized);
    CHECK(r.delta == 1.0);
    CHECK(std::abs(r.fitness - 2.0 * std::numbers::e) <= 1e-9);
    CHECK(hf.calls == 0);
    CHECK(budget.rb() == 1);
    CHECK(budget.hf_count() == 0);
}

TEST_CASE("branch boundary: delta equal to omega takes HF")
{
    const FixedEvaluator hf({1.0, 1.0});
    // exact binary values: delta = 0.5 = omega
    const GateConfig g = config(5.0, 5.5, 0.5);
    CHECK(screen(Vector{0, 0}, g, hf).path == GatePath::hf);

    // sweep neighbours of the boundary in ulps on both sides
    for (int side : {-1, 1}) {
        double t = 5.5;
        for (int k = 0; k < 40; ++k) {
            t = std::nextafter(t, side > 0 ? 10.0 : 0.0);
            const GateConfig gk = config(5.0, t, 0.5);
            const GatedResult r = screen(Vector{0, 0}, gk, hf);
            CHECK((r.path == GatePath::penalized) == (r.delta > gk.omega()));
            if (side < 0)
                CHECK(r.path == GatePath::hf);
            else
                CHECK(r.path == GatePath::penalized);
        }
    }
    // a grid of deltas on both sides of omega for several c values
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        for (int k = -50; k <= 50; ++k) {
            const GateConfig gk = config(3.0, 3.0 + 0.5 * c + k * 1e-3, 0.5, c);
            const GatedResult r = screen(Vector{0, 0}, gk, hf);
            CHECK((r.path == GatePath::penalized) == (r.delta > gk.omega()));
            if (r.path == GatePath::penalized) {
                CHECK(r.fitness == penalty(r.delta));
                CHECK(r.fitness >= penalty(gk.omega()));
                CHECK(r.fitness > 2.0);
            }
        }
    }
}

TEST_CASE("HF failure falls back to the penalty at delta = omega")
{
    const GateConfig g = config(5.0, 5.1, 0.4);
    const FailingEvaluator hf;
    EvaluationBudget budget(3);
    const GatedResult r = gated_objective(Vector{0.0, 0.0}, g, hf, budget);
    CHECK(r.hf_failed);
    CHECK(r.path == GatePath::penalized);
    CHECK(r.delta == g.omega());
    CHECK(r.fitness == penalty(g.omega()));
    CHECK(budget.rb() == 1);
}

TEST_CASE("budget is checked and ticked")
{
    const GateConfig g = config(5.0, 5.0, 0.4);
    const FixedEvaluator hf({5.0, 5.0});
    EvaluationBudget budget(2);
    gated_objective(Vector{0, 0}, g, hf, budget);
    gated_objective(Vector{0, 0}, g, hf, budget);
    CHECK(budget.consumed() == 2);
    CHECK_THROWS_AS(gated_objective(Vector{0, 0}, g, hf, budget), BudgetExhausted);
    CHECK(hf.calls == 2);
}

TEST_CASE("gate decision is a pure function")
{
    GateConfig g;
    g.model = mean_model(3, 0.2);
    g.target = TargetSpec::make({1.0, 2.0, 3.0}, Reduction::max);
    const EchoEvaluator hf;
    for (const Vector& x : {Vector{3.0, 2.9, 3.1}, Vector{0.0, 0.0, 0.1}, Vector{2.9, 2.9, 2.9}}) {
        const GatedResult a = screen(x, g, hf);
        const GatedResult b = screen(x, g, hf);
        CHECK(a.path == b.path);
        CHECK(a.fitness == b.fitness);
        CHECK(a.delta == b.delta);
    }
    CHECK(screen(Vector{3.0, 2.9, 3.1}, g, hf).path == GatePath::hf);
    CHECK(screen(Vector{0.0, 0.0, 0.1}, g, hf).path == GatePath::penalized);
}

TEST_CASE("adapt_input")
{
    const Vector x{1.0, -2.0, 3.5};
    CHECK(adapt_input(x, InputAdapter::identity) == x);
    const Vector seven = adapt_input(Vector(80, 7.0), InputAdapter::downsample_80_to_20);
    REQUIRE(seven.size() == 20);
    for (double v : seven)
        CHECK(v == doctest::Approx(7.0));
    Vector ramp(80);
    for (int i = 0; i < 80; ++i)
        ramp[i] = 0.37 * i + std::sin(i);
    CHECK(adapt_input(ramp, InputAdapter::downsample_80_to_20) == diffusion::downsample_bc(ramp));
    CHECK_THROWS_AS(adapt_input(Vector(20, 1.0), InputAdapter::downsample_80_to_20), std::invalid_argument);
    CHECK(adapter_for(Problem::sfr) == InputAdapter::downsample_80_to_20);
    CHECK(adapter_for(Problem::aid) == InputAdapter::identity);
}

TEST_CASE("config validation")
{
    GateConfig g = config(1.0, 1.0, 0.5);
    CHECK_NOTHROW(g.validate());
    g.c = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = config(1.0, 1.0, 0.0);
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = config(1.0, 1.0, 0.5);
    g.model.reset();
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("huge c reproduces the always-HF run exactly")
{
    GateConfig g;
    g.c = 1e9;
    g.model = mean_model(3, 0.3);
    g.target = TargetSpec::make({0.2, -0.4, 0.7}, Reduction::mean);
    const EchoEvaluator hf;
    const Bounds b = Bounds::uniform(3, -1.0, 1.0);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        EvaluationBudget be(200), bv(200);
        const auto enhanced = optimizers::shade_run(gated_hook(g, hf), b, {}, be, seed);
        const auto vanilla = optimizers::shade_run(hf_hook(g.target, hf, 1e6), b, {}, bv, seed);
        REQUIRE(enhanced.trace.size() == vanilla.trace.size());
        for (std::size_t i = 0; i < enhanced.trace.size(); ++i) {
            CHECK(enhanced.trace[i].fitness == vanilla.trace[i].fitness);
            CHECK(enhanced.trace[i].hf);
        }
        CHECK(be.rb() == 0);
        CHECK(enhanced.x_best == vanilla.x_best);
    }
}

TEST_CASE("gated PSO run keeps hf_count + rb = consumed")
{
    GateConfig g;
    g.c = 1.0;
    g.model = mean_model(3, 0.1);
    g.target = TargetSpec::make({0.5, 0.5, 0.5}, Reduction::mean);
    const EchoEvaluator hf;
    EvaluationBudget budget(200);
    const auto r = optimizers::pso_run(gated_hook(g, hf), Bounds::uniform(3, -1, 1), {}, budget, 4);
    CHECK(budget.consumed() == 200);
    CHECK(budget.hf_count() + budget.rb() == 200);
    CHECK(budget.rb() > 0);
    int hf_rows = 0;
    for (const auto& t : r.trace)
        hf_rows += t.hf;
    CHECK(hf_rows == budget.hf_count());
}
