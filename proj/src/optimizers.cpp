#include "mfid/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "mfid/dataset.hpp"
#include "mfid/io.hpp"

namespace mfid::optimizers {

namespace {

// Evaluates x, ticks the budget and appends to the trace.
class Recorder {
public:
    Recorder(const Objective& objective, const Bounds& bounds, EvaluationBudget& budget)
        : objective_(objective), bounds_(bounds), budget_(budget)
    {
    }

    bool done() const { return budget_.exhausted(); }

    double evaluate(const Vector& x)
    {
        if (!bounds_.contains(x))
            throw std::logic_error("optimizer produced a candidate outside the bounds");
        const Evaluation e = objective_(x);
        budget_.tick(!e.hf);
        if (e.fitness < result.f_best || result.trace.empty()) {
            result.f_best = e.fitness;
            result.x_best = x;
        }
        result.trace.push_back({budget_.consumed(), e.fitness, e.hf, result.f_best});
        return e.fitness;
    }

    OptimizationResult result;

private:
    const Objective& objective_;
    const Bounds& bounds_;
    EvaluationBudget& budget_;
};

std::vector<Vector> initial_points(const Bounds& bounds, int n, Init init, const std::vector<Vector>& given,
                                   std::mt19937_64& rng)
{
    if (!given.empty()) {
        if (given.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("initial population size does not match the configuration");
        for (const Vector& x : given)
            validate_design(x, &bounds);
        return given;
    }
    if (init == Init::lhs)
        return dataset::lhs_sample(bounds, static_cast<std::size_t>(n), rng);
    std::vector<Vector> pts(static_cast<std::size_t>(n), Vector(bounds.dim()));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Vector& x : pts)
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = std::min(bounds.lower[j] + u(rng) * (bounds.upper[j] - bounds.lower[j]), bounds.upper[j]);
    return pts;
}

void require_budget(const EvaluationBudget& budget, int n)
{
    if (budget.remaining() < n)
        throw std::invalid_argument("budget of " + std::to_string(budget.remaining()) +
                                    " evaluations cannot cover an initial population of " + std::to_string(n));
}

}  // namespace

void PsoConfig::validate() const
{
    if (swarm < 2)
        throw std::invalid_argument("pso: swarm size must be at least 2");
    if (inertia < 0 || cognitive < 0 || social < 0 || !(velocity_clamp > 0))
        throw std::invalid_argument("pso: coefficients must be non-negative");
}

void ShadeConfig::validate() const
{
    if (population < 4)
        throw std::invalid_argument("shade: population must be at least 4");
    if (memory_size < 1)
        throw std::invalid_argument("shade: memory size must be at least 1");
    if (!(p_best > 0 && p_best <= 1) || archive_factor < 0)
        throw std::invalid_argument("shade: invalid p-best fraction or archive factor");
}

OptimizationResult pso_run(const Objective& objective, const Bounds& bounds, const PsoConfig& cfg,
                           EvaluationBudget& budget, std::uint64_t seed)
{
    cfg.validate();
    require_budget(budget, cfg.swarm);
    const std::size_t m = bounds.dim();
    const auto n = static_cast<std::size_t>(cfg.swarm);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    Vector vmax(m);
    for (std::size_t j = 0; j < m; ++j)
        vmax[j] = cfg.velocity_clamp * (bounds.upper[j] - bounds.lower[j]);

    std::vector<Vector> x = initial_points(bounds, cfg.swarm, cfg.init, cfg.initial_positions, rng);
    std::vector<Vector> v(n, Vector(m, 0.0));
    if (cfg.initial_positions.empty())
        for (Vector& vi : v)
            for (std::size_t j = 0; j < m; ++j)
                vi[j] = (2.0 * u(rng) - 1.0) * vmax[j];

    Recorder rec(objective, bounds, budget);
    std::vector<Vector> pbest = x;
    Vector pbest_f(n);
    for (std::size_t i = 0; i < n; ++i)
        pbest_f[i] = rec.evaluate(x[i]);
    std::size_t g = static_cast<std::size_t>(std::min_element(pbest_f.begin(), pbest_f.end()) - pbest_f.begin());

    while (!rec.done()) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double r1 = u(rng), r2 = u(rng);
                double vel = cfg.inertia * v[i][j] + cfg.cognitive * r1 * (pbest[i][j] - x[i][j]) +
                             cfg.social * r2 * (pbest[g][j] - x[i][j]);
                vel = std::clamp(vel, -vmax[j], vmax[j]);
                double pos = x[i][j] + vel;
                if (pos < bounds.lower[j] || pos > bounds.upper[j]) {
                    pos = std::clamp(pos, bounds.lower[j], bounds.upper[j]);
                    vel = 0.0;
                }
                x[i][j] = pos;
                v[i][j] = vel;
            }
        }
        for (std::size_t i = 0; i < n && !rec.done(); ++i) {
            const double f = rec.evaluate(x[i]);
            if (f < pbest_f[i]) {
                pbest_f[i] = f;
                pbest[i] = x[i];
            }
        }
        g = static_cast<std::size_t>(std::min_element(pbest_f.begin(), pbest_f.end()) - pbest_f.begin());
    }
    return std::move(rec.result);
}

Vector binomial_crossover(std::span<const double> target, std::span<const double> mutant, double cr,
                          std::size_t j_rand, std::mt19937_64& rng)
{
    if (target.size() != mutant.size() || j_rand >= target.size())
        throw std::invalid_argument("binomial_crossover: size mismatch");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector trial(target.begin(), target.end());
    for (std::size_t j = 0; j < trial.size(); ++j)
        if (u(rng) < cr || j == j_rand)
            trial[j] = mutant[j];
    return trial;
}

Vector repair_midpoint(std::span<const double> mutant, std::span<const double> parent, const Bounds& bounds)
{
    Vector out(mutant.begin(), mutant.end());
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (out[j] < bounds.lower[j])
            out[j] = 0.5 * (bounds.lower[j] + parent[j]);
        else if (out[j] > bounds.upper[j])
            out[j] = 0.5 * (bounds.upper[j] + parent[j]);
    }
    return out;
}

OptimizationResult shade_run(const Objective& objective, const Bounds& bounds, const ShadeConfig& cfg,
                             EvaluationBudget& budget, std::uint64_t seed)
{
    cfg.validate();
    require_budget(budget, cfg.population);
    const std::size_t m = bounds.dim();
    const auto np = static_cast<std::size_t>(cfg.population);
    const auto archive_cap = static_cast<std::size_t>(std::lround(cfg.archive_factor * cfg.population));
    const auto p_count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(cfg.p_best * cfg.population)), 2, np);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<Vector> pop = initial_points(bounds, cfg.population, cfg.init, cfg.initial_population, rng);
    Recorder rec(objective, bounds, budget);
    Vector fit(np);
    for (std::size_t i = 0; i < np; ++i)
        fit[i] = rec.evaluate(pop[i]);

    ShadeMemory memory{Vector(static_cast<std::size_t>(cfg.memory_size), 0.5),
                       Vector(static_cast<std::size_t>(cfg.memory_size), 0.5)};
    std::size_t k = 0;
    std::vector<Vector> archive;

    std::vector<std::size_t> rank(np);
    std::vector<Vector> trials(np);
    Vector f_used(np), cr_used(np);
    while (!rec.done()) {
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });

        for (std::size_t i = 0; i < np; ++i) {
            const std::size_t r = std::uniform_int_distribution<std::size_t>(0, memory.f.size() - 1)(rng);
            double cr = std::normal_distribution<double>(memory.cr[r], 0.1)(rng);
            cr = std::clamp(cr, 0.0, 1.0);
            double f = 0.0;
            std::cauchy_distribution<double> cauchy(memory.f[r], 0.1);
            do
                f = cauchy(rng);
            while (f <= 0.0);
            f = std::min(f, 1.0);

            const std::size_t pb = rank[std::uniform_int_distribution<std::size_t>(0, p_count - 1)(rng)];
            std::size_t r1 = 0;
            do
                r1 = std::uniform_int_distribution<std::size_t>(0, np - 1)(rng);
            while (r1 == i);
            std::size_t r2 = 0;
            do
                r2 = std::uniform_int_distribution<std::size_t>(0, np + archive.size() - 1)(rng);
            while (r2 == i || r2 == r1);
            const Vector& x2 = r2 < np ? pop[r2] : archive[r2 - np];

            Vector mutant(m);
            for (std::size_t j = 0; j < m; ++j)
                mutant[j] = pop[i][j] + f * (pop[pb][j] - pop[i][j]) + f * (pop[r1][j] - x2[j]);
            mutant = repair_midpoint(mutant, pop[i], bounds);
            const std::size_t j_rand = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
            trials[i] = binomial_crossover(pop[i], mutant, cr, j_rand, rng);
            f_used[i] = f;
            cr_used[i] = cr;
        }

        Vector s_f, s_cr, weight;
        for (std::size_t i = 0; i < np && !rec.done(); ++i) {
            const double ft = rec.evaluate(trials[i]);
            if (ft <= fit[i]) {
                if (ft < fit[i]) {
                    archive.push_back(pop[i]);
                    s_f.push_back(f_used[i]);
                    s_cr.push_back(cr_used[i]);
                    weight.push_back(fit[i] - ft);
                }
                pop[i] = std::move(trials[i]);
                fit[i] = ft;
            }
        }
        while (archive.size() > archive_cap) {
            const std::size_t victim = std::uniform_int_distribution<std::size_t>(0, archive.size() - 1)(rng);
            archive[victim] = std::move(archive.back());
            archive.pop_back();
        }

        if (!s_f.empty()) {
            const double wsum = std::accumulate(weight.begin(), weight.end(), 0.0);
            auto lehmer = [&](const Vector& s) {
                double num = 0.0, den = 0.0;
                for (std::size_t t = 0; t < s.size(); ++t) {
                    const double w = wsum > 0.0 ? weight[t] / wsum : 1.0 / static_cast<double>(s.size());
                    num += w * s[t] * s[t];
                    den += w * s[t];
                }
                return std::pair{num, den};
            };
            const auto [fn, fd] = lehmer(s_f);
            const auto [cn, cd] = lehmer(s_cr);
            if (fd > 0.0)
                memory.f[k] = fn / fd;
            if (cd > 0.0)
                memory.cr[k] = cn / cd;
            k = (k + 1) % memory.f.size();
            if (cfg.on_memory_update)
                cfg.on_memory_update(memory);
        }
    }
    return std::move(rec.result);
}

OptimizationResult refinement_inner_run(const std::function<double(std::span<const double>)>& objective,
                                        const Bounds& bounds, std::uint64_t seed)
{
    ShadeConfig cfg;
    cfg.population = static_cast<int>(bounds.dim());
    EvaluationBudget budget(kInnerBudget);
    const Objective hook = [&](std::span<const double> x) { return Evaluation{objective(x), false}; };
    return shade_run(hook, bounds, cfg, budget, seed);
}

void write_trace_csv(const std::vector<TraceEntry>& trace, const std::string& path)
{
    std::ostringstream os;
    os << "eval_index,fitness,hf_flag,best_so_far\n";
    for (const TraceEntry& t : trace)
        os << t.eval_index << ',' << io::format_double(t.fitness) << ',' << (t.hf ? 1 : 0) << ','
           << io::format_double(t.best_so_far) << '\n';
    io::write_text(path, os.str());
}

std::vector<TraceEntry> read_trace_csv(const std::string& path)
{
    std::istringstream is(io::read_text(path));
    std::string line;
    std::getline(is, line);
    if (line.rfind("eval_index,fitness,hf_flag,best_so_far", 0) != 0)
        throw std::runtime_error(path + ": not a trace file");
    std::vector<TraceEntry> out;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const Vector v = io::parse_csv_doubles(line);
        if (v.size() != 4)
            throw std::runtime_error(path + ": malformed trace row");
        out.push_back({static_cast<int>(v[0]), v[1], v[2] != 0.0, v[3]});
    }
    return out;
}

}  // namespace mfid::optimizers
