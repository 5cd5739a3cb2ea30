#include "mfid/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfid {

Bounds::Bounds(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size())
        throw std::invalid_argument("bounds: lower/upper length mismatch");
    if (lower.empty())
        throw std::invalid_argument("bounds: empty");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw std::invalid_argument("bounds: non-finite entry");
        if (lower[i] > upper[i])
            throw std::invalid_argument("bounds: lower > upper at dimension " + std::to_string(i));
    }
}

Bounds Bounds::uniform(std::size_t dim, double lo, double hi)
{
    return Bounds(Vector(dim, lo), Vector(dim, hi));
}

bool Bounds::contains(std::span<const double> x) const
{
    if (x.size() != dim())
        return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] >= lower[i] && x[i] <= upper[i]))
            return false;
    return true;
}

bool Bounds::nested_in(const Bounds& outer) const
{
    if (outer.dim() != dim())
        return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (lower[i] < outer.lower[i] || upper[i] > outer.upper[i])
            return false;
    return true;
}

Vector Bounds::clamp(std::span<const double> x) const
{
    Vector out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(out[i], lower[i], upper[i]);
    return out;
}

double Bounds::pruning_fraction(const Bounds& original) const
{
    double kept = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double w0 = original.upper[i] - original.lower[i];
        if (w0 <= 0.0)
            continue;
        kept += (upper[i] - lower[i]) / w0;
        ++counted;
    }
    return counted == 0 ? 0.0 : 1.0 - kept / static_cast<double>(counted);
}

void validate_design(std::span<const double> x, const Bounds* bounds)
{
    if (x.empty())
        throw std::invalid_argument("design vector is empty");
    for (double v : x)
        if (!std::isfinite(v))
            throw std::invalid_argument("design vector has a non-finite entry");
    if (bounds != nullptr && !bounds->contains(x))
        throw std::invalid_argument("design vector outside bounds");
}

Problem parse_problem(const std::string& name)
{
    if (name == "aid" || name == "AID")
        return Problem::aid;
    if (name == "sfr" || name == "SFR")
        return Problem::sfr;
    throw std::invalid_argument("unknown problem '" + name + "'");
}

std::string to_string(Problem p)
{
    return p == Problem::aid ? "aid" : "sfr";
}

Reduction parse_reduction(const std::string& name)
{
    if (name == "mean")
        return Reduction::mean;
    if (name == "max")
        return Reduction::max;
    throw std::invalid_argument("unknown reduction '" + name + "'");
}

std::string to_string(Reduction r)
{
    return r == Reduction::mean ? "mean" : "max";
}

double derive_target_info(std::span<const double> target, Reduction reduction)
{
    if (target.empty())
        throw std::invalid_argument("derive_target_info: empty target vector");
    if (reduction == Reduction::max)
        return *std::max_element(target.begin(), target.end());
    return std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(target.size());
}

TargetSpec TargetSpec::make(Vector values, Reduction reduction)
{
    TargetSpec t;
    t.info = derive_target_info(values, reduction);
    t.values = std::move(values);
    t.reduction = reduction;
    return t;
}

double rmse_objective(std::span<const double> computed, std::span<const double> target)
{
    if (computed.size() != target.size())
        throw std::invalid_argument("rmse_objective: length mismatch");
    if (computed.empty())
        throw std::invalid_argument("rmse_objective: empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < computed.size(); ++i) {
        if (!std::isfinite(computed[i]) || !std::isfinite(target[i]))
            throw std::invalid_argument("rmse_objective: non-finite entry");
        const double d = computed[i] - target[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(computed.size()));
}

EvaluationBudget::EvaluationBudget(int total) : total_(total)
{
    if (total < 0)
        throw std::invalid_argument("budget total must be non-negative");
}

void EvaluationBudget::tick(bool gated)
{
    if (exhausted())
        throw BudgetExhausted();
    ++consumed_;
    if (gated)
        ++rb_;
    else
        ++hf_count_;
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

double interp_linear(std::span<const double> xs, std::span<const double> ys, double xq)
{
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("interp_linear: bad sample arrays");
    if (xq <= xs.front())
        return ys.front();
    if (xq >= xs.back())
        return ys.back();
    // first abscissa strictly greater than xq
    const auto it = std::upper_bound(xs.begin(), xs.end(), xq);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double span = xs[hi] - xs[lo];
    if (span <= 0.0)
        return ys[hi];
    const double w = (xq - xs[lo]) / span;
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

Vector interp_linear(std::span<const double> xs, std::span<const double> ys,
                     std::span<const double> xq)
{
    Vector out;
    out.reserve(xq.size());
    for (double q : xq)
        out.push_back(interp_linear(xs, ys, q));
    return out;
}

}  // namespace mfid
