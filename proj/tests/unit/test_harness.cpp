#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include "mfid/harness.hpp"
#include "mfid/io.hpp"

using namespace mfid;
using namespace mfid::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("mfid_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Untrained SFR-shaped surrogate; only its cv_rmse matters for the gate.
std::string stub_model(const fs::path& dir, double cv_rmse)
{
    surrogate::MlpConfig c;
    c.widths = {8};
    c.dropout = {0.0};
    surrogate::SurrogateModel m = surrogate::initialize(20, c, 3);
    m.cv_rmse = cv_rmse;
    const std::string path = (dir / "model.json").string();
    surrogate::save_model(m, path);
    return path;
}

ExperimentConfig small_config(const fs::path& dir)
{
    ExperimentConfig cfg;
    cfg.problem = Problem::sfr;
    cfg.target = "sinusoidal";
    cfg.n = 500;
    cfg.tsb = 20;
    cfg.repeats = 2;
    cfg.seed = 11;
    cfg.paths.output_dir = (dir / "out").string();
    return cfg;
}

RunRecord row(double f, int rb, bool degenerate = false)
{
    RunRecord r;
    r.final_fitness = f;
    r.rb = rb;
    r.degenerate = degenerate;
    return r;
}

}  // namespace

TEST_CASE("config text round trips through to_ini")
{
    ExperimentConfig cfg;
    cfg.problem = Problem::aid;
    cfg.optimizer = Optimizer::de;
    cfg.enhanced = true;
    cfg.target = "naca2410";
    cfg.n = 5000;
    cfg.c = 0.25;
    cfg.eta = 1.1;
    cfg.tsb = 150;
    cfg.repeats = 7;
    cfg.seed = 99;
    cfg.bounds = BoundsMode::original;
    cfg.paths.model = "m.json";
    cfg.paths.output_dir = "runs";
    const ExperimentConfig back = parse_config(to_ini(cfg));
    CHECK(to_ini(back) == to_ini(cfg));
    CHECK(back.c == 0.25);
    CHECK(back.problem == Problem::aid);
    CHECK(back.bounds == BoundsMode::original);
}

TEST_CASE("config rejects bad files and invalid combinations")
{
    const std::string ok = "schema_version = 1\n[experiment]\nproblem = sfr\n";
    CHECK(parse_config(ok).target == "sinusoidal");
    CHECK(parse_config("schema_version = 1\n[experiment]\nproblem = aid\n").target == "naca2410");
    CHECK_THROWS_AS(parse_config("[experiment]\nproblem = sfr\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("schema_version = 2\n[experiment]\nproblem = sfr\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(ok + "colour = red\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(ok + "c = fast\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("schema_version = 1\n[experiment]\noptimizer = de\n"), std::invalid_argument);

    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.n = 700;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.problem = Problem::aid;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // SFR target on AID
    cfg = {};
    cfg.c = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.tsb = 5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.repeats = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.eta = 0.9;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("environment overrides touch paths only")
{
    ExperimentConfig cfg;
    cfg.c = 3.0;
    ::setenv("MFID_MODEL", "/tmp/other_model.json", 1);
    ::setenv("MFID_OUTPUT_DIR", "/tmp/other_out", 1);
    apply_env_overrides(cfg);
    ::unsetenv("MFID_MODEL");
    ::unsetenv("MFID_OUTPUT_DIR");
    CHECK(cfg.paths.model == "/tmp/other_model.json");
    CHECK(cfg.paths.output_dir == "/tmp/other_out");
    CHECK(cfg.paths.dataset.empty());
    CHECK(cfg.c == 3.0);
}

TEST_CASE("SFR targets")
{
    const TargetRecord zero = sfr_target("zero", Vector(80, 0.0));
    CHECK(zero.spec.values == Vector(30, 0.0));
    CHECK(zero.spec.info == 0.0);

    // zero initial field: at t = 0.1 no probe reaches the boundary value
    const TargetRecord flat = sfr_target("flat", Vector(80, 7.0));
    CHECK(flat.spec.info < 7.0);
    CHECK(flat.spec.info > 0.0);

    for (const std::string& kind : target_names(Problem::sfr)) {
        const TargetRecord t = make_target(Problem::sfr, kind);
        CHECK(t.ground_truth.size() == 80);
        CHECK(t.spec.values.size() == 30);
        CHECK(t.spec.info == *std::max_element(t.spec.values.begin(), t.spec.values.end()));
        CHECK(original_bounds(Problem::sfr).contains(t.ground_truth));
    }
    const TargetRecord lin = make_target(Problem::sfr, "linear");
    CHECK(lin.ground_truth.front() == doctest::Approx(2.0));
    CHECK(lin.ground_truth.back() == doctest::Approx(12.0));
    CHECK_THROWS_AS(make_target(Problem::sfr, "naca2410"), std::invalid_argument);
    CHECK_THROWS_AS(sfr_target("short", Vector(20, 1.0)), std::invalid_argument);
}

TEST_CASE("AID target uses negated Cp at its own locations")
{
    const TargetRecord t = make_target(Problem::aid, "naca2410");
    REQUIRE(t.spec.values.size() == 300);
    CHECK(t.locations.size() == 300);
    CHECK(t.ground_truth.size() == 30);
    CHECK(original_bounds(Problem::aid).contains(t.ground_truth));
    const auto hf = hf_evaluator(t);
    const Vector again = hf->evaluate(t.ground_truth);
    CHECK(rmse_objective(again, t.spec.values) < 1e-12);
    CHECK(t.spec.info == *std::max_element(t.spec.values.begin(), t.spec.values.end()));
    CHECK(t.spec.info > 0.0);  // suction peak, -Cp_min
}

TEST_CASE("aggregate statistics")
{
    const Aggregate a = aggregate({row(1.0, 3), row(3.0, 5), row(2.0, 1), row(9.0, 7, true)});
    CHECK(a.runs == 3);
    CHECK(a.degenerate == 1);
    CHECK(a.mean_fitness == doctest::Approx(2.0));
    CHECK(a.std_fitness == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(a.median_fitness == 2.0);
    CHECK(a.mean_rb == doctest::Approx(4.0));
    CHECK(aggregate({row(1.0, 0), row(4.0, 0)}).median_fitness == 2.5);
    CHECK(aggregate({row(0.0, 2, true)}).runs == 0);
}

TEST_CASE("reports: empty runs are rejected and JSON round trips")
{
    const fs::path dir = scratch("report");
    SummaryReport empty;
    CHECK_THROWS_AS(emit_report(empty, dir.string()), std::invalid_argument);

    SummaryReport s;
    s.config.c = 0.5;
    s.omega = 0.123;
    s.runs = {row(0.25, 3), row(0.5, 0), row(0.0, 20, true)};
    for (int i = 0; i < 3; ++i) {
        s.runs[i].repeat = i;
        s.runs[i].consumed = 20;
        s.runs[i].hf_count = 20 - s.runs[i].rb;
        s.runs[i].seed = split_seed(1, i);
    }
    s.aggregate = aggregate(s.runs);
    const std::string path = emit_report(s, dir.string());
    const SummaryReport back = read_report_json(path);
    CHECK(report_json(back) == report_json(s));
    CHECK(back.aggregate.mean_fitness == s.aggregate.mean_fitness);
    CHECK(back.aggregate.mean_rb == s.aggregate.mean_rb);
    CHECK(aggregate(back.runs).median_fitness == back.aggregate.median_fitness);
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "summary_plot.csv"));
}

TEST_CASE("plot table is sorted by configuration")
{
    SummaryReport a, b, c;
    a.config.c = 2.0;
    b.config.c = 0.5;
    c.config.optimizer = Optimizer::de;
    const std::string table = plot_table({a, b, c});
    const auto first = table.find("sfr,sinusoidal,de");
    const auto half = table.find(",0.5,");
    const auto two = table.find(",2,");
    CHECK(first < half);
    CHECK(half < two);
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);
}

TEST_CASE("vanilla experiment: rows, budget and byte-identical reruns")
{
    const fs::path dir = scratch("vanilla");
    ExperimentConfig cfg = small_config(dir);
    const SummaryReport s = run_experiment(cfg);
    REQUIRE(s.runs.size() == 2);
    for (const RunRecord& r : s.runs) {
        CHECK(r.consumed == 20);
        CHECK(r.hf_count == 20);
        CHECK(r.rb == 0);
        CHECK_FALSE(r.degenerate);
        const auto trace = optimizers::read_trace_csv((fs::path(cfg.paths.output_dir) / r.trace).string());
        CHECK(trace.size() == 20);
        CHECK(r.final_fitness == trace.back().best_so_far);
    }
    CHECK(s.runs[0].seed != s.runs[1].seed);

    const std::string json_path =
        (fs::path(cfg.paths.output_dir) / "summary_sfr_sinusoidal_pso_vanilla.json").string();
    const std::string first = io::read_text(json_path);
    cfg.workers = 2;
    run_experiment(cfg);
    CHECK(io::read_text(json_path) == first);
}

TEST_CASE("enhanced with c = 1e9 on original bounds reproduces the vanilla traces")
{
    const fs::path dir = scratch("degenerate");
    for (Optimizer opt : {Optimizer::pso, Optimizer::de}) {
        ExperimentConfig cfg = small_config(dir);
        cfg.optimizer = opt;
        const SummaryReport vanilla = run_experiment(cfg);
        cfg.enhanced = true;
        cfg.c = 1e9;
        cfg.bounds = BoundsMode::original;
        cfg.paths.model = stub_model(dir, 0.5);
        const SummaryReport enhanced = run_experiment(cfg);
        for (std::size_t r = 0; r < 2; ++r) {
            const auto out = fs::path(cfg.paths.output_dir);
            CHECK(io::read_text((out / vanilla.runs[r].trace).string()) ==
                  io::read_text((out / enhanced.runs[r].trace).string()));
            CHECK(enhanced.runs[r].rb == 0);
        }
    }
}

TEST_CASE("enhanced runs report HF fitness only")
{
    const fs::path dir = scratch("enhanced");
    ExperimentConfig cfg = small_config(dir);
    cfg.enhanced = true;
    cfg.c = 1.0;
    cfg.bounds = BoundsMode::original;
    cfg.paths.model = stub_model(dir, 0.5);
    const SummaryReport s = run_experiment(cfg);
    for (const RunRecord& r : s.runs) {
        CHECK(r.hf_count + r.rb == r.consumed);
        CHECK(r.consumed <= cfg.tsb);
        const auto trace = optimizers::read_trace_csv((fs::path(cfg.paths.output_dir) / r.trace).string());
        bool any_hf = false;
        double best_hf = 0.0;
        for (const auto& e : trace)
            if (e.hf) {
                best_hf = any_hf ? std::min(best_hf, e.fitness) : e.fitness;
                any_hf = true;
            }
        CHECK(r.degenerate == !any_hf);
        if (any_hf)
            CHECK(r.final_fitness == best_hf);
    }
    CHECK(s.omega == doctest::Approx(0.5));
}

TEST_CASE("enhanced experiments need a usable model")
{
    const fs::path dir = scratch("missing");
    ExperimentConfig cfg = small_config(dir);
    cfg.enhanced = true;
    cfg.problem = Problem::aid;
    cfg.target = "naca2410";
    cfg.paths.model = stub_model(dir, 0.5);  // 20 inputs, AID needs 30
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
