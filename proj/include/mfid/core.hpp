#pragma once

// Shared domain types for the multi-fidelity inverse design toolkit:
// design vectors and their box bounds, target specifications, the RMSE
// objective, evaluation budget accounting and the evaluator interface.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfid {

using Vector = std::vector<double>;

/// Raised when a simulation or external evaluator fails to produce a result.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BudgetExhausted : public std::runtime_error {
public:
    BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

/// Per-dimension box limits. Refined bounds are always nested in the
/// original bounds they were derived from.
struct Bounds {
    Vector lower;
    Vector upper;

    Bounds() = default;
    Bounds(Vector lo, Vector hi);

    static Bounds uniform(std::size_t dim, double lo, double hi);

    std::size_t dim() const { return lower.size(); }
    bool contains(std::span<const double> x) const;
    bool nested_in(const Bounds& outer) const;
    Vector clamp(std::span<const double> x) const;
    /// Fraction of the original box volume removed, averaged per dimension
    /// (1 - mean(width_refined / width_original)).
    double pruning_fraction(const Bounds& original) const;
};

/// Checks that x is non-empty and finite; when bounds is given also that
/// it lies inside them. Throws std::invalid_argument otherwise.
void validate_design(std::span<const double> x, const Bounds* bounds = nullptr);

enum class Problem { aid, sfr };

Problem parse_problem(const std::string& name);
std::string to_string(Problem p);

enum class Reduction { mean, max };

Reduction parse_reduction(const std::string& name);
std::string to_string(Reduction r);

double derive_target_info(std::span<const double> target, Reduction reduction);

/// Target performance vector T together with its scalar summary T_info.
struct TargetSpec {
    Vector values;
    double info = 0.0;
    Reduction reduction = Reduction::max;

    static TargetSpec make(Vector values, Reduction reduction);
};

/// Root mean square discrepancy between a computed performance vector and
/// the target.
double rmse_objective(std::span<const double> computed, std::span<const double> target);

/// Counts objective calls. Every call is either an HF simulation or a gated
/// (penalized) skip; consumed == hf_count + rb at all times.
class EvaluationBudget {
public:
    explicit EvaluationBudget(int total);

    int total() const { return total_; }
    int consumed() const { return consumed_; }
    int hf_count() const { return hf_count_; }
    int rb() const { return rb_; }
    int remaining() const { return total_ - consumed_; }
    bool exhausted() const { return consumed_ >= total_; }

    void tick(bool gated);

private:
    int total_;
    int consumed_ = 0;
    int hf_count_ = 0;
    int rb_ = 0;
};

/// Computed performance P^C(x) for a design. Implementations must be
/// deterministic for a fixed configuration and safe to call concurrently.
class PerformanceEvaluator {
public:
    virtual ~PerformanceEvaluator() = default;
    virtual Vector evaluate(std::span<const double> x) const = 0;
};

/// Deterministic child seed derivation (splitmix64 over seed and stream id).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// Piecewise-linear interpolation through (xs, ys) at xq. xs must be
/// non-decreasing; queries outside the range are clamped to the end values.
double interp_linear(std::span<const double> xs, std::span<const double> ys, double xq);
Vector interp_linear(std::span<const double> xs, std::span<const double> ys,
                     std::span<const double> xq);

}  // namespace mfid
