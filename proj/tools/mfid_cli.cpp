// mfid command line: dataset, train, refine, optimize, report, oracle.
// Errors go to stderr as one JSON object; the exit code is nonzero.

#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mfid/dataset.hpp"
#include "mfid/diffusion.hpp"
#include "mfid/harness.hpp"
#include "mfid/io.hpp"
#include "mfid/refine.hpp"
#include "mfid/surrogate.hpp"

using namespace mfid;

namespace {

int fail(const std::string& kind, const std::string& message, int code)
{
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return code;
}

void cmd_dataset(const std::string& problem_name, std::size_t n, std::uint64_t seed, const std::string& out,
                 const std::string& evaluator)
{
    const Problem problem = parse_problem(problem_name);
    dataset::Dataset d;
    if (problem == Problem::sfr) {
        d = dataset::build_dataset(problem, n, dataset::sfr_label(), seed);
    } else {
        harness::Paths paths;
        paths.evaluator = evaluator;
        const Bounds b = harness::original_bounds(problem);
        d = dataset::build_dataset(problem, n,
                                   dataset::aid_label(std::make_shared<const airfoil::SplineBasis>(),
                                                      harness::make_solver(paths)),
                                   seed, &b);
    }
    dataset::save_csv(d, out);
    std::cout << out << '\n';
}

void cmd_train(const std::string& data_path, const std::string& out, std::uint64_t seed, int folds)
{
    const dataset::Dataset d = dataset::load_csv(data_path);
    const surrogate::SurrogateModel m =
        surrogate::fit_with_cv(d, surrogate::MlpConfig::for_problem(d.meta.problem), folds, seed);
    surrogate::save_model(m, out);
    std::cout << out << " cv_rmse=" << io::format_double(m.cv_rmse) << '\n';
}

void cmd_refine(const std::string& problem_name, const std::string& target_name, const std::string& model_path,
                double eta, int solutions, std::uint64_t seed, const std::string& out,
                const std::string& solutions_out, const std::string& evaluator)
{
    const Problem problem = parse_problem(problem_name);
    harness::Paths paths;
    paths.evaluator = evaluator;
    const harness::TargetRecord target = harness::make_target(problem, target_name, harness::make_solver(paths));
    const surrogate::SurrogateModel model = surrogate::load_model(model_path);
    const harness::Refinement r = harness::refine_for_target(model, target, eta, solutions, seed);
    refine::save_refined(r.refined, harness::original_bounds(problem), out);
    if (!solutions_out.empty())
        refine::save_solutions(r.solutions, solutions_out);
    std::cout << out << " pruning=" << io::format_double(r.refined.pruning_fraction) << '\n';
}

void cmd_optimize(const std::string& config_path)
{
    harness::ExperimentConfig cfg = harness::load_config(config_path);
    harness::apply_env_overrides(cfg);
    const harness::SummaryReport s = harness::run_experiment(cfg);
    const harness::Aggregate& a = s.aggregate;
    std::cout << "runs=" << a.runs << " degenerate=" << a.degenerate
              << " mean_fitness=" << io::format_double(a.mean_fitness)
              << " median_fitness=" << io::format_double(a.median_fitness)
              << " mean_rb=" << io::format_double(a.mean_rb) << '\n';
}

void cmd_report(const std::vector<std::string>& inputs, const std::string& out)
{
    std::vector<harness::SummaryReport> reports;
    for (const std::string& p : inputs)
        reports.push_back(harness::read_report_json(p));
    const std::string table = harness::plot_table(reports);
    if (out.empty())
        std::cout << table;
    else
        io::write_text(out, table);
}

void cmd_oracle(double s0, double t, double diffusivity, int terms, const std::string& out)
{
    const diffusion::Grid grid = diffusion::Grid::high_fidelity();
    diffusion::DiffusionConfig cfg;
    cfg.diffusivity = diffusivity;
    cfg.t_max = t;
    const diffusion::ScalarField f = diffusion::solve(grid, Vector(static_cast<std::size_t>(grid.nx), s0), cfg);
    std::ostringstream os;
    os << "y,analytic,hf_mid_column\n";
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y_center(j);
        os << io::format_double(y) << ','
           << io::format_double(diffusion::slab_series(y, t, diffusivity, grid.height, s0, terms)) << ','
           << io::format_double(f.at(grid.nx / 2, j)) << '\n';
    }
    if (out.empty())
        std::cout << os.str();
    else
        io::write_text(out, os.str());
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-fidelity inverse design with surrogate gating and boundary refinement"};
    app.require_subcommand(1);

    std::string problem = "sfr", out, evaluator;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    auto* ds = app.add_subcommand("dataset", "Build an LF dataset (CSV plus metadata JSON)");
    ds->add_option("--problem", problem, "sfr or aid")->check(CLI::IsMember({"sfr", "aid"}));
    ds->add_option("-n,--n", n, "Number of samples")->required();
    ds->add_option("--seed", seed);
    ds->add_option("-o,--out", out)->required();
    ds->add_option("--evaluator", evaluator, "External AID evaluator executable");

    std::string data_path;
    int folds = harness::kCvFolds;
    auto* tr = app.add_subcommand("train", "Train the surrogate with k-fold cv_rmse");
    tr->add_option("--data", data_path)->required();
    tr->add_option("-o,--out", out)->required();
    tr->add_option("--seed", seed);
    tr->add_option("--folds", folds)->check(CLI::Range(2, 100));

    std::string target, model_path, solutions_out;
    double eta = 1.3;
    int solutions = harness::kRefineSolutions;
    auto* rf = app.add_subcommand("refine", "Refine the design-space bounds for a target");
    rf->add_option("--problem", problem)->check(CLI::IsMember({"sfr", "aid"}));
    rf->add_option("--target", target)->required();
    rf->add_option("--model", model_path)->required();
    rf->add_option("--eta", eta);
    rf->add_option("--solutions", solutions)->check(CLI::PositiveNumber);
    rf->add_option("--seed", seed);
    rf->add_option("-o,--out", out)->required();
    rf->add_option("--solutions-out", solutions_out, "CSV of the collected solutions");
    rf->add_option("--evaluator", evaluator);

    std::string config_path;
    auto* op = app.add_subcommand("optimize", "Run an experiment from an INI config");
    op->add_option("config", config_path)->required();

    std::vector<std::string> inputs;
    auto* rp = app.add_subcommand("report", "Merge summary JSON files into a plot table");
    rp->add_option("inputs", inputs)->required();
    rp->add_option("-o,--out", out);

    double s0 = 10.0, t = 0.1, diffusivity = 1.0;
    int terms = 200;
    auto* orc = app.add_subcommand("oracle", "Analytic slab solution next to the HF solve");
    orc->add_option("--s0", s0);
    orc->add_option("--t", t)->check(CLI::PositiveNumber);
    orc->add_option("--diffusivity", diffusivity)->check(CLI::PositiveNumber);
    orc->add_option("--terms", terms)->check(CLI::PositiveNumber);
    orc->add_option("-o,--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*ds)
            cmd_dataset(problem, n, seed, out, evaluator);
        else if (*tr)
            cmd_train(data_path, out, seed, folds);
        else if (*rf)
            cmd_refine(problem, target, model_path, eta, solutions, seed, out, solutions_out, evaluator);
        else if (*op)
            cmd_optimize(config_path);
        else if (*rp)
            cmd_report(inputs, out);
        else if (*orc)
            cmd_oracle(s0, t, diffusivity, terms, out);
    } catch (const std::invalid_argument& e) {
        return fail("invalid_argument", e.what(), 2);
    } catch (const EvaluationError& e) {
        return fail("evaluation_error", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("runtime_error", e.what(), 1);
    }
    return 0;
}
