#pragma once

// Boundary refinement: N surrogate-only optimizations of |M(x) - T_info|
// followed by a problem-specific reduction of the solution matrix to a
// smaller search box.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfid/airfoil.hpp"
#include "mfid/core.hpp"
#include "mfid/surrogate.hpp"

namespace mfid::refine {

/// One optimized design per row.
using SolutionMatrix = std::vector<Vector>;

using Predictor = std::function<double(std::span<const double>)>;

constexpr double kDegenerateWidth = 1e-9;

struct RefinedBounds {
    Bounds bounds;
    std::string strategy;      // "aid_average" or "sfr_polyfit"
    std::size_t solutions = 0;
    double eta = 1.0;          // AID only
    std::vector<int> degrees;  // SFR only
    double pruning_fraction = 0.0;
};

/// N independent refinement runs (seeds split from `seed`). Zero HF calls.
SolutionMatrix collect_solutions(const Predictor& predictor, double t_info, const Bounds& bounds, int n,
                                 std::uint64_t seed);
SolutionMatrix collect_solutions(const surrogate::SurrogateModel& model, const TargetSpec& target,
                                 const Bounds& bounds, int n, std::uint64_t seed);

/// Column mean scaled by eta; lower-surface dims get [clamp(eta*mean), 0],
/// upper-surface dims [0, clamp(eta*mean)].
RefinedBounds aid_refine(const SolutionMatrix& s, double eta, const Bounds& original);

/// Least-squares polynomial fits of every row on 20 equally spaced points in
/// [0, 1], evaluated on hf_dim points; ub = min(max of all fits, s_ub).
RefinedBounds sfr_refine(const SolutionMatrix& s, const std::vector<int>& degrees = {1, 2, 3, 4},
                         int hf_dim = 80, double s_ub = 30.0);

/// Coefficients (lowest order first) of the least-squares polynomial through
/// (x_i, y_i).
Vector polyfit(std::span<const double> x, std::span<const double> y, int degree);
double polyval(std::span<const double> coefficients, double x);

Vector linspace(double a, double b, int n);

std::string to_json(const RefinedBounds& r, const Bounds& original);
RefinedBounds refined_from_json(const std::string& text);
void save_refined(const RefinedBounds& r, const Bounds& original, const std::string& path);
RefinedBounds load_refined(const std::string& path);

void save_solutions(const SolutionMatrix& s, const std::string& path);
SolutionMatrix load_solutions(const std::string& path);

struct ConvergenceEntry {
    std::size_t n = 0;
    Vector mean;  // per component of the summary
    Vector std;
};

/// Mean and standard deviation of a per-row summary over the first n rows,
/// for each n in `sizes` (sizes above the row count are skipped).
std::vector<ConvergenceEntry> convergence_study(const SolutionMatrix& s, const std::vector<std::size_t>& sizes,
                                                const std::function<Vector(std::span<const double>)>& summary);

/// Per-row summaries: airfoil ordinates (upper then lower) at `stations`
/// chord positions, or the mean boundary value of an SFR row.
std::function<Vector(std::span<const double>)> aid_zeta_summary(const airfoil::SplineBasis& basis, int stations);
std::function<Vector(std::span<const double>)> sfr_mean_summary();

std::string convergence_json(const std::vector<ConvergenceEntry>& entries, const std::string& quantity);

}  // namespace mfid::refine
