#pragma once

// Experiment runner: builds or loads the artifacts an experiment needs
// (dataset, surrogate, refined bounds), runs paired-seed repeats of the
// vanilla or enhanced optimizer, and writes traces plus a summary.
//
// Sign convention: AID targets store -Cp, so the minimum pressure
// coefficient becomes T_info = max(-Cp) and both problems share the max
// reduction.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mfid/airfoil.hpp"
#include "mfid/core.hpp"
#include "mfid/dataset.hpp"
#include "mfid/optimizers.hpp"
#include "mfid/refine.hpp"
#include "mfid/surrogate.hpp"

namespace mfid::harness {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kCvFolds = 5;
inline constexpr int kRefineSolutions = 150;
/// Fitness assigned by a vanilla run when the HF evaluator fails.
inline constexpr double kHfFailureFitness = 1e3;

enum class Optimizer { pso, de };

std::string to_string(Optimizer o);
Optimizer parse_optimizer(const std::string& s);

enum class BoundsMode { refined, original };

struct Paths {
    std::string dataset;
    std::string model;
    std::string refined;
    std::string output_dir = ".";
    std::string evaluator;  // external AID evaluator executable; mock when empty
};

struct ExperimentConfig {
    Problem problem = Problem::sfr;
    Optimizer optimizer = Optimizer::pso;
    bool enhanced = false;
    std::string target = "sinusoidal";
    std::size_t n = 1000;
    double c = 1.0;
    double eta = 1.3;
    int tsb = 200;
    int repeats = 30;
    std::uint64_t seed = 1;
    int workers = 1;
    BoundsMode bounds = BoundsMode::refined;  // enhanced runs only
    Paths paths;

    /// Throws std::invalid_argument on an invalid combination.
    void validate() const;
};

/// INI text with a top-level schema_version, an [experiment] section and a
/// [paths] section. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string to_ini(const ExperimentConfig& cfg);

/// Overrides paths from MFID_DATASET, MFID_MODEL, MFID_REFINED,
/// MFID_OUTPUT_DIR and MFID_EVALUATOR when set.
void apply_env_overrides(ExperimentConfig& cfg);

struct TargetRecord {
    std::string name;
    Problem problem = Problem::sfr;
    TargetSpec spec;
    Vector ground_truth;  // HF boundary (SFR) or design vector (AID)
    Vector locations;     // AID surface locations of T; empty for SFR
};

/// SFR target from an 80-value HF boundary: probe samples of the HF solve,
/// T_info = max.
TargetRecord sfr_target(const std::string& name, const Vector& hf_bc);

/// AID target from a design: -Cp of the HF evaluation at its own 300
/// surface locations.
TargetRecord aid_target(const std::string& name, const airfoil::AirfoilDesign& design,
                        const airfoil::SplineBasis& basis, const airfoil::CpSolver& solver);

/// Named targets. SFR: "sinusoidal" (8 + 4 sin(2 pi b)) and "linear"
/// (2 + 10 b) on b in [0, 1]. AID: "naca2410".
TargetRecord make_target(Problem problem, const std::string& kind,
                         std::shared_ptr<const airfoil::CpSolver> solver = nullptr);
std::vector<std::string> target_names(Problem problem);

Bounds original_bounds(Problem problem);

/// HF evaluator producing vectors comparable with the target values.
std::shared_ptr<const PerformanceEvaluator> hf_evaluator(const TargetRecord& target,
                                                         std::shared_ptr<const airfoil::CpSolver> solver = nullptr);

std::shared_ptr<const airfoil::CpSolver> make_solver(const Paths& paths);

struct RunRecord {
    int repeat = 0;
    std::uint64_t seed = 0;
    double final_fitness = 0.0;  // best HF-evaluated fitness
    bool degenerate = false;     // no HF evaluation happened
    int consumed = 0;
    int hf_count = 0;
    int rb = 0;
    std::string trace;  // file name relative to the output directory
};

struct Aggregate {
    std::size_t runs = 0;        // non-degenerate runs
    std::size_t degenerate = 0;
    double mean_fitness = 0.0;
    double std_fitness = 0.0;    // population std
    double median_fitness = 0.0;
    double mean_rb = 0.0;        // over all runs
};

struct SummaryReport {
    ExperimentConfig config;
    double omega = 0.0;  // 0 for vanilla runs
    double pruning_fraction = 0.0;
    std::vector<RunRecord> runs;
    Aggregate aggregate;
};

Aggregate aggregate(const std::vector<RunRecord>& runs);

/// Loads or builds the LF dataset for cfg.problem at size cfg.n.
dataset::Dataset ensure_dataset(const ExperimentConfig& cfg, const airfoil::CpSolver& solver);
/// Loads cfg.paths.model or trains one with k-fold cv_rmse and saves it.
surrogate::SurrogateModel ensure_model(const ExperimentConfig& cfg, const airfoil::CpSolver& solver);
struct Refinement {
    refine::RefinedBounds refined;
    refine::SolutionMatrix solutions;
};

/// N surrogate-only inner runs against the target's T_info followed by the
/// problem's refinement strategy (eta is used by AID only).
Refinement refine_for_target(const surrogate::SurrogateModel& model, const TargetRecord& target, double eta,
                             int n_solutions, std::uint64_t seed);

/// Loads cfg.paths.refined or refines the original bounds and saves them.
refine::RefinedBounds ensure_refined(const ExperimentConfig& cfg, const surrogate::SurrogateModel& model,
                                     const TargetRecord& target);

/// Paired seeds: repeat r uses split_seed(cfg.seed, r) in both modes.
SummaryReport run_experiment(const ExperimentConfig& cfg);

/// Writes <stem>.csv (one row per run), <stem>.json (config, aggregate and
/// rows) and <stem>_plot.csv (one plot-table row). Returns the JSON path.
std::string emit_report(const SummaryReport& report, const std::string& dir, const std::string& stem = "summary");
SummaryReport read_report_json(const std::string& path);
std::string report_json(const SummaryReport& report);

/// Plot table over several summaries: fitness against c per dataset size,
/// with the mean RB column, sorted by problem, target, optimizer, mode, n, c.
std::string plot_table(const std::vector<SummaryReport>& reports);

}  // namespace mfid::harness
