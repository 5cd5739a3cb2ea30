#pragma once

// Surrogate training data: Latin hypercube sampling, the randomized
// boundary-condition generator for scalar field reconstruction, LF labeling
// and CSV/JSON persistence.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mfid/airfoil.hpp"
#include "mfid/core.hpp"

namespace mfid::dataset {

/// n x m sample matrix; per dimension exactly one point in each of the n
/// equal-probability strata.
std::vector<Vector> lhs_sample(const Bounds& bounds, std::size_t n, std::uint64_t seed);
std::vector<Vector> lhs_sample(const Bounds& bounds, std::size_t n, std::mt19937_64& rng);

/// Random draws consumed by one boundary-condition generation.
struct BcDraws {
    int branch = 0;       // 0 linear, 1 parabolic, 2 sinusoidal
    double sigma = 0.0;   // noise standard deviation
    double rand1 = 0.0, rand2 = 0.0, rand3 = 0.0;
    Vector noise;         // standard normal, scaled by sigma on use
    Vector replacement;   // U(0, s_top) value for each position
    bool reverse = false;
};

BcDraws draw_bc(int lf_n, double s_top, std::mt19937_64& rng);

/// Deterministic part of the generator given its draws. Entries whose
/// magnitude exceeds s_top are replaced, so the output stays in [0, s_top].
Vector apply_bc_draws(const BcDraws& draws, int lf_n, double s_top);

Vector generate_bc(int lf_n, double s_top, std::uint64_t seed);

struct Metadata {
    std::uint64_t seed = 0;
    std::size_t requested = 0;
    Problem problem = Problem::sfr;
    std::string fidelity = "LF";
    std::size_t dropped = 0;
    std::string label = "";
};

struct Dataset {
    std::vector<Vector> inputs;
    Vector labels;
    Metadata meta;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
    /// Throws std::invalid_argument when rows are inconsistent or non-finite.
    void validate() const;
};

/// Scalar LF label M_info(x).
using LabelFunction = std::function<double(std::span<const double>)>;

/// LF solve on the 20x20 grid, maximum over the evolved field.
LabelFunction sfr_label();

/// LF flow evaluation, minimum Cp stored negated (max of -Cp).
LabelFunction aid_label(std::shared_ptr<const airfoil::SplineBasis> basis,
                        std::shared_ptr<const airfoil::CpSolver> solver);

/// Labels the given inputs in row order. Rows whose label evaluation throws
/// EvaluationError (or returns a non-finite value) are dropped and counted.
Dataset label_inputs(std::vector<Vector> inputs, const LabelFunction& label, Metadata meta);

/// SFR: inputs from generate_bc (20 values, cap 30) with per-row seeds.
/// AID: LHS over `aid_bounds`.
Dataset build_dataset(Problem problem, std::size_t n, const LabelFunction& label, std::uint64_t seed,
                      const Bounds* aid_bounds = nullptr);

void save_csv(const Dataset& data, const std::string& csv_path);
Dataset load_csv(const std::string& csv_path);
/// Sidecar metadata path for a dataset CSV ("data.csv" -> "data.meta.json").
std::string metadata_path(const std::string& csv_path);

}  // namespace mfid::dataset
