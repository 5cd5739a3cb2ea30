#include "mfid/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "mfid/dataset.hpp"
#include "mfid/diffusion.hpp"
#include "mfid/gate.hpp"
#include "mfid/io.hpp"

namespace mfid::harness {

namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::uint64_t kDatasetStream = 1000;
constexpr std::uint64_t kTrainStream = 2000;
constexpr std::uint64_t kRefineStream = 3000;

bool file_exists(const std::string& path)
{
    return !path.empty() && fs::exists(path);
}

std::string to_string(BoundsMode b)
{
    return b == BoundsMode::refined ? "refined" : "original";
}

BoundsMode parse_bounds_mode(const std::string& s)
{
    if (s == "refined")
        return BoundsMode::refined;
    if (s == "original")
        return BoundsMode::original;
    throw std::invalid_argument("unknown bounds mode '" + s + "'");
}

bool parse_bool(const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "no")
        return false;
    throw std::invalid_argument("expected a boolean, got '" + s + "'");
}

template <class T>
T parse_number(const std::string& key, const std::string& s)
{
    std::size_t used = 0;
    T v{};
    try {
        if constexpr (std::is_same_v<T, double>)
            v = std::stod(s, &used);
        else
            v = static_cast<T>(std::stoull(s, &used));
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad value for " + key + ": '" + s + "'");
    }
    if (used != s.size())
        throw std::invalid_argument("config: bad value for " + key + ": '" + s + "'");
    return v;
}

int dim_for(Problem p)
{
    return p == Problem::sfr ? 20 : airfoil::kDesignDim;
}

std::string experiment_tag(const ExperimentConfig& cfg)
{
    std::string tag = to_string(cfg.problem) + "_" + cfg.target + "_" + to_string(cfg.optimizer) + "_" +
                      (cfg.enhanced ? "enhanced" : "vanilla");
    if (cfg.enhanced) {
        tag += "_c" + io::format_double(cfg.c) + "_n" + std::to_string(cfg.n);
        if (cfg.bounds == BoundsMode::original)
            tag += "_orig";
    }
    return tag;
}

}  // namespace

std::string to_string(Optimizer o)
{
    return o == Optimizer::pso ? "pso" : "de";
}

Optimizer parse_optimizer(const std::string& s)
{
    if (s == "pso" || s == "PSO")
        return Optimizer::pso;
    if (s == "de" || s == "DE" || s == "shade")
        return Optimizer::de;
    throw std::invalid_argument("unknown optimizer '" + s + "'");
}

void ExperimentConfig::validate() const
{
    static const std::set<std::size_t> sizes{500, 1000, 5000, 15000};
    if (!sizes.contains(n))
        throw std::invalid_argument("config: n must be one of 500, 1000, 5000, 15000");
    const auto names = target_names(problem);
    if (std::find(names.begin(), names.end(), target) == names.end())
        throw std::invalid_argument("config: target '" + target + "' does not belong to " + to_string(problem));
    if (!(c > 0.0))
        throw std::invalid_argument("config: c must be positive");
    if (!(eta >= 1.0) || !std::isfinite(eta))
        throw std::invalid_argument("config: eta must be >= 1");
    if (tsb < 10)
        throw std::invalid_argument("config: tsb must cover one population (10)");
    if (repeats < 1)
        throw std::invalid_argument("config: repeats must be >= 1");
    if (workers < 1)
        throw std::invalid_argument("config: workers must be >= 1");
    if (paths.output_dir.empty())
        throw std::invalid_argument("config: empty output directory");
}

ExperimentConfig parse_config(const std::string& text)
{
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    const auto version = tree.get_optional<std::string>("schema_version");
    if (!version)
        throw std::invalid_argument("config: missing schema_version");
    if (parse_number<int>("schema_version", *version) != kSchemaVersion)
        throw std::invalid_argument("config: unsupported schema_version " + *version);

    ExperimentConfig cfg;
    bool has_problem = false;
    for (const auto& [key, node] : tree) {
        if (key == "schema_version")
            continue;
        if (key == "experiment") {
            for (const auto& [k, v] : node) {
                const std::string s = v.data();
                if (k == "problem") {
                    cfg.problem = parse_problem(s);
                    has_problem = true;
                } else if (k == "optimizer") {
                    cfg.optimizer = parse_optimizer(s);
                } else if (k == "enhanced") {
                    cfg.enhanced = parse_bool(s);
                } else if (k == "target") {
                    cfg.target = s;
                } else if (k == "n") {
                    cfg.n = parse_number<std::size_t>(k, s);
                } else if (k == "c") {
                    cfg.c = parse_number<double>(k, s);
                } else if (k == "eta") {
                    cfg.eta = parse_number<double>(k, s);
                } else if (k == "tsb") {
                    cfg.tsb = parse_number<int>(k, s);
                } else if (k == "repeats") {
                    cfg.repeats = parse_number<int>(k, s);
                } else if (k == "seed") {
                    cfg.seed = parse_number<std::uint64_t>(k, s);
                } else if (k == "workers") {
                    cfg.workers = parse_number<int>(k, s);
                } else if (k == "bounds") {
                    cfg.bounds = parse_bounds_mode(s);
                } else {
                    throw std::invalid_argument("config: unknown key experiment." + k);
                }
            }
        } else if (key == "paths") {
            for (const auto& [k, v] : node) {
                const std::string s = v.data();
                if (k == "dataset")
                    cfg.paths.dataset = s;
                else if (k == "model")
                    cfg.paths.model = s;
                else if (k == "refined")
                    cfg.paths.refined = s;
                else if (k == "output_dir")
                    cfg.paths.output_dir = s;
                else if (k == "evaluator")
                    cfg.paths.evaluator = s;
                else
                    throw std::invalid_argument("config: unknown key paths." + k);
            }
        } else {
            throw std::invalid_argument("config: unknown entry '" + key + "'");
        }
    }
    if (!has_problem)
        throw std::invalid_argument("config: experiment.problem is required");
    if (!tree.get_child_optional("experiment.target"))
        cfg.target = target_names(cfg.problem).front();
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    return parse_config(io::read_text(path));
}

std::string to_ini(const ExperimentConfig& cfg)
{
    std::ostringstream os;
    os << "schema_version = " << kSchemaVersion << "\n\n[experiment]\n"
       << "problem = " << to_string(cfg.problem) << "\n"
       << "optimizer = " << to_string(cfg.optimizer) << "\n"
       << "enhanced = " << (cfg.enhanced ? "true" : "false") << "\n"
       << "target = " << cfg.target << "\n"
       << "n = " << cfg.n << "\n"
       << "c = " << io::format_double(cfg.c) << "\n"
       << "eta = " << io::format_double(cfg.eta) << "\n"
       << "tsb = " << cfg.tsb << "\n"
       << "repeats = " << cfg.repeats << "\n"
       << "seed = " << cfg.seed << "\n"
       << "workers = " << cfg.workers << "\n"
       << "bounds = " << to_string(cfg.bounds) << "\n\n[paths]\n"
       << "dataset = " << cfg.paths.dataset << "\n"
       << "model = " << cfg.paths.model << "\n"
       << "refined = " << cfg.paths.refined << "\n"
       << "output_dir = " << cfg.paths.output_dir << "\n"
       << "evaluator = " << cfg.paths.evaluator << "\n";
    return os.str();
}

void apply_env_overrides(ExperimentConfig& cfg)
{
    const std::pair<const char*, std::string*> vars[] = {
        {"MFID_DATASET", &cfg.paths.dataset},
        {"MFID_MODEL", &cfg.paths.model},
        {"MFID_REFINED", &cfg.paths.refined},
        {"MFID_OUTPUT_DIR", &cfg.paths.output_dir},
        {"MFID_EVALUATOR", &cfg.paths.evaluator},
    };
    for (const auto& [name, field] : vars)
        if (const char* v = std::getenv(name))
            *field = v;
}

TargetRecord sfr_target(const std::string& name, const Vector& hf_bc)
{
    if (hf_bc.size() != 80)
        throw std::invalid_argument("sfr_target: expected 80 boundary values");
    const diffusion::ProbeEvaluator hf(diffusion::Grid::high_fidelity());
    TargetRecord t;
    t.name = name;
    t.problem = Problem::sfr;
    t.spec = TargetSpec::make(hf.evaluate(hf_bc), Reduction::max);
    t.ground_truth = hf_bc;
    return t;
}

TargetRecord aid_target(const std::string& name, const airfoil::AirfoilDesign& design,
                        const airfoil::SplineBasis& basis, const airfoil::CpSolver& solver)
{
    const airfoil::CpDistribution d = airfoil::external_evaluate(design, airfoil::Fidelity::high, basis, solver);
    Vector values = d.cp;
    for (double& v : values)
        v = -v;
    TargetRecord t;
    t.name = name;
    t.problem = Problem::aid;
    t.spec = TargetSpec::make(std::move(values), Reduction::max);
    t.ground_truth = design.to_vector();
    t.locations = d.s;
    return t;
}

std::vector<std::string> target_names(Problem problem)
{
    if (problem == Problem::sfr)
        return {"sinusoidal", "linear"};
    return {"naca2410"};
}

TargetRecord make_target(Problem problem, const std::string& kind, std::shared_ptr<const airfoil::CpSolver> solver)
{
    if (problem == Problem::sfr) {
        const Vector b = refine::linspace(0.0, 1.0, 80);
        Vector bc(80);
        if (kind == "sinusoidal") {
            for (int i = 0; i < 80; ++i)
                bc[i] = 8.0 + 4.0 * std::sin(2.0 * std::numbers::pi * b[i]);
        } else if (kind == "linear") {
            for (int i = 0; i < 80; ++i)
                bc[i] = 2.0 + 10.0 * b[i];
        } else {
            throw std::invalid_argument("unknown SFR target '" + kind + "'");
        }
        return sfr_target(kind, bc);
    }
    if (kind != "naca2410")
        throw std::invalid_argument("unknown AID target '" + kind + "'");
    if (!solver)
        solver = std::make_shared<const airfoil::MockCpSolver>();
    const airfoil::SplineBasis basis;
    const auto design = airfoil::fit_surfaces(basis, airfoil::naca4(0.02, 0.4, 0.10, 160)).coefficients;
    return aid_target(kind, design, basis, *solver);
}

Bounds original_bounds(Problem problem)
{
    if (problem == Problem::sfr)
        return Bounds::uniform(80, 0.0, 30.0);
    const airfoil::SplineBasis basis;
    return airfoil::original_bounds(airfoil::fit_baseline(basis).coefficients);
}

std::shared_ptr<const airfoil::CpSolver> make_solver(const Paths& paths)
{
    if (paths.evaluator.empty())
        return std::make_shared<const airfoil::MockCpSolver>();
    return std::make_shared<const airfoil::ProcessCpSolver>(std::vector<std::string>{paths.evaluator});
}

std::shared_ptr<const PerformanceEvaluator> hf_evaluator(const TargetRecord& target,
                                                         std::shared_ptr<const airfoil::CpSolver> solver)
{
    if (target.problem == Problem::sfr)
        return std::make_shared<const diffusion::ProbeEvaluator>(diffusion::Grid::high_fidelity());
    if (!solver)
        solver = std::make_shared<const airfoil::MockCpSolver>();
    return std::make_shared<const airfoil::NegatedCpEvaluator>(std::make_shared<const airfoil::SplineBasis>(),
                                                               std::move(solver), airfoil::Fidelity::high,
                                                               target.locations);
}

Aggregate aggregate(const std::vector<RunRecord>& runs)
{
    Aggregate a;
    Vector f;
    double rb = 0.0;
    for (const RunRecord& r : runs) {
        rb += r.rb;
        if (r.degenerate)
            ++a.degenerate;
        else
            f.push_back(r.final_fitness);
    }
    a.runs = f.size();
    if (!runs.empty())
        a.mean_rb = rb / static_cast<double>(runs.size());
    if (f.empty())
        return a;
    double sum = 0.0;
    for (double v : f)
        sum += v;
    a.mean_fitness = sum / static_cast<double>(f.size());
    double ss = 0.0;
    for (double v : f)
        ss += (v - a.mean_fitness) * (v - a.mean_fitness);
    a.std_fitness = std::sqrt(ss / static_cast<double>(f.size()));
    std::sort(f.begin(), f.end());
    const std::size_t m = f.size() / 2;
    a.median_fitness = f.size() % 2 ? f[m] : 0.5 * (f[m - 1] + f[m]);
    return a;
}

dataset::Dataset ensure_dataset(const ExperimentConfig& cfg, const airfoil::CpSolver& solver)
{
    if (file_exists(cfg.paths.dataset)) {
        dataset::Dataset d = dataset::load_csv(cfg.paths.dataset);
        if (d.dim() != static_cast<std::size_t>(dim_for(cfg.problem)))
            throw std::invalid_argument("dataset " + cfg.paths.dataset + " does not match problem " +
                                        to_string(cfg.problem));
        return d;
    }
    const std::uint64_t seed = split_seed(cfg.seed, kDatasetStream);
    dataset::Dataset d;
    if (cfg.problem == Problem::sfr) {
        d = dataset::build_dataset(Problem::sfr, cfg.n, dataset::sfr_label(), seed);
    } else {
        auto basis = std::make_shared<const airfoil::SplineBasis>();
        const std::shared_ptr<const airfoil::CpSolver> s(&solver, [](const airfoil::CpSolver*) {});
        const Bounds b = original_bounds(Problem::aid);
        d = dataset::build_dataset(Problem::aid, cfg.n, dataset::aid_label(basis, s), seed, &b);
    }
    if (!cfg.paths.dataset.empty())
        dataset::save_csv(d, cfg.paths.dataset);
    return d;
}

surrogate::SurrogateModel ensure_model(const ExperimentConfig& cfg, const airfoil::CpSolver& solver)
{
    if (file_exists(cfg.paths.model)) {
        surrogate::SurrogateModel m = surrogate::load_model(cfg.paths.model);
        if (m.input_dim() != static_cast<std::size_t>(dim_for(cfg.problem)))
            throw std::invalid_argument("model " + cfg.paths.model + " does not match problem " +
                                        to_string(cfg.problem));
        return m;
    }
    const dataset::Dataset d = ensure_dataset(cfg, solver);
    surrogate::SurrogateModel m = surrogate::fit_with_cv(d, surrogate::MlpConfig::for_problem(cfg.problem), kCvFolds,
                                                         split_seed(cfg.seed, kTrainStream));
    if (!cfg.paths.model.empty())
        surrogate::save_model(m, cfg.paths.model);
    return m;
}

Refinement refine_for_target(const surrogate::SurrogateModel& model, const TargetRecord& target, double eta,
                             int n_solutions, std::uint64_t seed)
{
    Refinement out;
    if (target.problem == Problem::sfr) {
        out.solutions =
            refine::collect_solutions(model, target.spec, Bounds::uniform(20, 0.0, 30.0), n_solutions, seed);
        out.refined = refine::sfr_refine(out.solutions);
    } else {
        const Bounds original = original_bounds(Problem::aid);
        out.solutions = refine::collect_solutions(model, target.spec, original, n_solutions, seed);
        out.refined = refine::aid_refine(out.solutions, eta, original);
    }
    return out;
}

refine::RefinedBounds ensure_refined(const ExperimentConfig& cfg, const surrogate::SurrogateModel& model,
                                     const TargetRecord& target)
{
    const Bounds original = original_bounds(cfg.problem);
    if (file_exists(cfg.paths.refined)) {
        refine::RefinedBounds r = refine::load_refined(cfg.paths.refined);
        if (!r.bounds.nested_in(original))
            throw std::invalid_argument("refined bounds " + cfg.paths.refined + " do not fit problem " +
                                        to_string(cfg.problem));
        return r;
    }
    const refine::RefinedBounds r =
        refine_for_target(model, target, cfg.eta, kRefineSolutions, split_seed(cfg.seed, kRefineStream)).refined;
    if (!cfg.paths.refined.empty())
        refine::save_refined(r, original, cfg.paths.refined);
    return r;
}

SummaryReport run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto solver = make_solver(cfg.paths);
    const TargetRecord target = make_target(cfg.problem, cfg.target, solver);
    const auto hf = hf_evaluator(target, solver);
    const Bounds original = original_bounds(cfg.problem);

    SummaryReport report;
    report.config = cfg;
    Bounds bounds = original;
    gate::GateConfig gate_cfg;
    if (cfg.enhanced) {
        const auto model = std::make_shared<const surrogate::SurrogateModel>(ensure_model(cfg, *solver));
        gate_cfg.c = cfg.c;
        gate_cfg.model = model;
        gate_cfg.target = target.spec;
        gate_cfg.adapter = gate::adapter_for(cfg.problem);
        gate_cfg.validate();
        report.omega = gate_cfg.omega();
        if (cfg.bounds == BoundsMode::refined) {
            const refine::RefinedBounds r = ensure_refined(cfg, *model, target);
            bounds = r.bounds;
            report.pruning_fraction = r.pruning_fraction;
        }
    }

    fs::create_directories(cfg.paths.output_dir);
    const std::string tag = experiment_tag(cfg);
    report.runs.resize(static_cast<std::size_t>(cfg.repeats));

    auto run_one = [&](int r) {
        RunRecord rec;
        rec.repeat = r;
        rec.seed = split_seed(cfg.seed, static_cast<std::uint64_t>(r));
        const optimizers::Objective objective =
            cfg.enhanced ? gate::gated_hook(gate_cfg, *hf) : gate::hf_hook(target.spec, *hf, kHfFailureFitness);
        EvaluationBudget budget(cfg.tsb);
        const optimizers::OptimizationResult res =
            cfg.optimizer == Optimizer::pso
                ? optimizers::pso_run(objective, bounds, optimizers::PsoConfig{}, budget, rec.seed)
                : optimizers::shade_run(objective, bounds, optimizers::ShadeConfig{}, budget, rec.seed);
        rec.consumed = budget.consumed();
        rec.hf_count = budget.hf_count();
        rec.rb = budget.rb();
        rec.degenerate = true;
        for (const optimizers::TraceEntry& e : res.trace) {
            if (!e.hf)
                continue;
            if (rec.degenerate || e.fitness < rec.final_fitness)
                rec.final_fitness = e.fitness;
            rec.degenerate = false;
        }
        char index[16];
        std::snprintf(index, sizeof index, "%02d", r);
        rec.trace = "trace_" + tag + "_r" + index + ".csv";
        optimizers::write_trace_csv(res.trace, (fs::path(cfg.paths.output_dir) / rec.trace).string());
        report.runs[static_cast<std::size_t>(r)] = rec;
    };

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int r = next++; r < cfg.repeats; r = next++) {
            try {
                run_one(r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const int n_workers = std::min(cfg.workers, cfg.repeats);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    report.aggregate = aggregate(report.runs);
    emit_report(report, cfg.paths.output_dir, "summary_" + tag);
    return report;
}

std::string report_json(const SummaryReport& report)
{
    const ExperimentConfig& c = report.config;
    json j;
    j["format"] = "mfid-summary";
    j["version"] = kSchemaVersion;
    j["config"] = {{"problem", to_string(c.problem)},
                   {"optimizer", to_string(c.optimizer)},
                   {"enhanced", c.enhanced},
                   {"target", c.target},
                   {"n", c.n},
                   {"c", c.c},
                   {"eta", c.eta},
                   {"tsb", c.tsb},
                   {"repeats", c.repeats},
                   {"seed", c.seed},
                   {"bounds", to_string(c.bounds)}};
    j["omega"] = report.omega;
    j["pruning_fraction"] = report.pruning_fraction;
    const Aggregate& a = report.aggregate;
    j["aggregate"] = {{"runs", a.runs},
                      {"degenerate", a.degenerate},
                      {"mean_fitness", a.mean_fitness},
                      {"std_fitness", a.std_fitness},
                      {"median_fitness", a.median_fitness},
                      {"mean_rb", a.mean_rb}};
    json rows = json::array();
    for (const RunRecord& r : report.runs)
        rows.push_back({{"repeat", r.repeat},
                        {"seed", r.seed},
                        {"final_fitness", r.degenerate ? json(nullptr) : json(r.final_fitness)},
                        {"degenerate", r.degenerate},
                        {"consumed", r.consumed},
                        {"hf_count", r.hf_count},
                        {"rb", r.rb},
                        {"trace", r.trace}});
    j["runs"] = rows;
    return j.dump(2) + "\n";
}

SummaryReport read_report_json(const std::string& path)
{
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("summary " + path + ": " + e.what());
    }
    if (j.value("format", "") != "mfid-summary")
        throw std::runtime_error("summary " + path + ": not an mfid summary");
    SummaryReport s;
    const json& c = j.at("config");
    s.config.problem = parse_problem(c.at("problem").get<std::string>());
    s.config.optimizer = parse_optimizer(c.at("optimizer").get<std::string>());
    s.config.enhanced = c.at("enhanced").get<bool>();
    s.config.target = c.at("target").get<std::string>();
    s.config.n = c.at("n").get<std::size_t>();
    s.config.c = c.at("c").get<double>();
    s.config.eta = c.at("eta").get<double>();
    s.config.tsb = c.at("tsb").get<int>();
    s.config.repeats = c.at("repeats").get<int>();
    s.config.seed = c.at("seed").get<std::uint64_t>();
    s.config.bounds = parse_bounds_mode(c.at("bounds").get<std::string>());
    s.omega = j.at("omega").get<double>();
    s.pruning_fraction = j.at("pruning_fraction").get<double>();
    for (const json& r : j.at("runs")) {
        RunRecord rec;
        rec.repeat = r.at("repeat").get<int>();
        rec.seed = r.at("seed").get<std::uint64_t>();
        rec.degenerate = r.at("degenerate").get<bool>();
        if (!rec.degenerate)
            rec.final_fitness = r.at("final_fitness").get<double>();
        rec.consumed = r.at("consumed").get<int>();
        rec.hf_count = r.at("hf_count").get<int>();
        rec.rb = r.at("rb").get<int>();
        rec.trace = r.at("trace").get<std::string>();
        s.runs.push_back(rec);
    }
    const json& a = j.at("aggregate");
    s.aggregate.runs = a.at("runs").get<std::size_t>();
    s.aggregate.degenerate = a.at("degenerate").get<std::size_t>();
    s.aggregate.mean_fitness = a.at("mean_fitness").get<double>();
    s.aggregate.std_fitness = a.at("std_fitness").get<double>();
    s.aggregate.median_fitness = a.at("median_fitness").get<double>();
    s.aggregate.mean_rb = a.at("mean_rb").get<double>();
    return s;
}

namespace {

const char* kPlotHeader = "problem,target,optimizer,mode,n,c,eta,tsb,runs,mean_fitness,std_fitness,median_fitness,mean_rb\n";

std::string plot_row(const SummaryReport& r)
{
    const ExperimentConfig& c = r.config;
    const Aggregate& a = r.aggregate;
    std::ostringstream os;
    os << to_string(c.problem) << ',' << c.target << ',' << to_string(c.optimizer) << ','
       << (c.enhanced ? "enhanced" : "vanilla") << ',' << c.n << ',' << io::format_double(c.c) << ','
       << io::format_double(c.eta) << ',' << c.tsb << ',' << a.runs << ',' << io::format_double(a.mean_fitness)
       << ',' << io::format_double(a.std_fitness) << ',' << io::format_double(a.median_fitness) << ','
       << io::format_double(a.mean_rb) << '\n';
    return os.str();
}

}  // namespace

std::string plot_table(const std::vector<SummaryReport>& reports)
{
    std::vector<const SummaryReport*> sorted;
    for (const SummaryReport& r : reports)
        sorted.push_back(&r);
    auto key = [](const SummaryReport* r) {
        const ExperimentConfig& c = r->config;
        return std::tuple(to_string(c.problem), c.target, to_string(c.optimizer), c.enhanced, c.n, c.c);
    };
    std::stable_sort(sorted.begin(), sorted.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
    std::string out = kPlotHeader;
    for (const SummaryReport* r : sorted)
        out += plot_row(*r);
    return out;
}

std::string emit_report(const SummaryReport& report, const std::string& dir, const std::string& stem)
{
    if (report.runs.empty())
        throw std::invalid_argument("emit_report: no runs");
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "repeat,seed,final_fitness,degenerate,consumed,hf_count,rb,trace\n";
    for (const RunRecord& r : report.runs)
        csv << r.repeat << ',' << r.seed << ',' << (r.degenerate ? "" : io::format_double(r.final_fitness)) << ','
            << (r.degenerate ? 1 : 0) << ',' << r.consumed << ',' << r.hf_count << ',' << r.rb << ',' << r.trace
            << '\n';
    const fs::path base = fs::path(dir) / stem;
    io::write_text(base.string() + ".csv", csv.str());
    io::write_text(base.string() + "_plot.csv", plot_table({report}));
    const std::string json_path = base.string() + ".json";
    io::write_text(json_path, report_json(report));
    return json_path;
}

}  // namespace mfid::harness
