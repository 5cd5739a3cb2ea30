#include "mfid/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mfid/diffusion.hpp"
#include "mfid/io.hpp"

namespace mfid::dataset {

std::vector<Vector> lhs_sample(const Bounds& bounds, std::size_t n, std::mt19937_64& rng)
{
    if (n == 0)
        throw std::invalid_argument("lhs_sample: n must be at least 1");
    const std::size_t m = bounds.dim();
    std::vector<Vector> out(n, Vector(m));
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    std::vector<std::size_t> strata(n);
    for (std::size_t j = 0; j < m; ++j) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        std::shuffle(strata.begin(), strata.end(), rng);
        const double width = bounds.upper[j] - bounds.lower[j];
        for (std::size_t i = 0; i < n; ++i) {
            const double frac = (static_cast<double>(strata[i]) + jitter(rng)) / static_cast<double>(n);
            out[i][j] = std::min(bounds.lower[j] + frac * width, bounds.upper[j]);
        }
    }
    return out;
}

std::vector<Vector> lhs_sample(const Bounds& bounds, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return lhs_sample(bounds, n, rng);
}

BcDraws draw_bc(int lf_n, double s_top, std::mt19937_64& rng)
{
    if (lf_n < 2)
        throw std::invalid_argument("generate_bc: lf_n must be at least 2");
    BcDraws d;
    d.branch = std::uniform_int_distribution<int>(0, 2)(rng);
    d.sigma = std::uniform_real_distribution<double>(0.0, 100.0)(rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    d.noise.resize(static_cast<std::size_t>(lf_n));
    for (double& z : d.noise)
        z = normal(rng);
    std::uniform_real_distribution<double> coef(0.0, 10.0);
    d.rand1 = coef(rng);
    d.rand2 = coef(rng);
    if (d.branch != 0)
        d.rand3 = coef(rng);
    std::uniform_real_distribution<double> repl(0.0, s_top);
    d.replacement.resize(static_cast<std::size_t>(lf_n));
    for (double& r : d.replacement)
        r = repl(rng);
    d.reverse = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5;
    return d;
}

Vector apply_bc_draws(const BcDraws& d, int lf_n, double s_top)
{
    if (lf_n < 2)
        throw std::invalid_argument("generate_bc: lf_n must be at least 2");
    if (d.noise.size() != static_cast<std::size_t>(lf_n) ||
        d.replacement.size() != static_cast<std::size_t>(lf_n))
        throw std::invalid_argument("generate_bc: draw vectors do not match lf_n");
    Vector bc(static_cast<std::size_t>(lf_n));
    for (int i = 0; i < lf_n; ++i) {
        const double b = static_cast<double>(i) / (lf_n - 1);  // unit abscissa
        double v = 0.0;
        switch (d.branch) {
        case 0:
            v = d.rand1 * b + d.rand2;
            break;
        case 1:
            v = d.rand1 * b * b + d.rand2 * b + d.rand3;
            break;
        default:
            v = d.rand1 * std::sin(d.rand3 * b) + d.rand2;
            break;
        }
        v += d.sigma * d.noise[i];
        if (std::abs(v) > s_top)
            v = d.replacement[i];
        bc[i] = v;
    }
    if (d.reverse)
        std::reverse(bc.begin(), bc.end());
    for (double& v : bc)
        v = std::abs(v);
    return bc;
}

Vector generate_bc(int lf_n, double s_top, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return apply_bc_draws(draw_bc(lf_n, s_top, rng), lf_n, s_top);
}

void Dataset::validate() const
{
    if (inputs.size() != labels.size())
        throw std::invalid_argument("dataset: input/label row count mismatch");
    const std::size_t m = dim();
    for (std::size_t r = 0; r < inputs.size(); ++r) {
        if (inputs[r].size() != m)
            throw std::invalid_argument("dataset: ragged input rows");
        for (double v : inputs[r])
            if (!std::isfinite(v))
                throw std::invalid_argument("dataset: non-finite input");
        if (!std::isfinite(labels[r]))
            throw std::invalid_argument("dataset: non-finite label");
    }
}

LabelFunction sfr_label()
{
    return [](std::span<const double> x) {
        return diffusion::field_max(diffusion::solve(diffusion::Grid::low_fidelity(), x));
    };
}

LabelFunction aid_label(std::shared_ptr<const airfoil::SplineBasis> basis,
                        std::shared_ptr<const airfoil::CpSolver> solver)
{
    return [basis = std::move(basis), solver = std::move(solver)](std::span<const double> x) {
        const airfoil::CpDistribution d = airfoil::external_evaluate(
            airfoil::AirfoilDesign::from_vector(x), airfoil::Fidelity::low, *basis, *solver);
        return -*std::min_element(d.cp.begin(), d.cp.end());
    };
}

Dataset label_inputs(std::vector<Vector> inputs, const LabelFunction& label, Metadata meta)
{
    Dataset data;
    data.meta = std::move(meta);
    data.meta.requested = inputs.size();
    for (Vector& x : inputs) {
        double y = 0.0;
        try {
            y = label(x);
        } catch (const EvaluationError&) {
            ++data.meta.dropped;
            continue;
        }
        if (!std::isfinite(y)) {
            ++data.meta.dropped;
            continue;
        }
        data.inputs.push_back(std::move(x));
        data.labels.push_back(y);
    }
    return data;
}

Dataset build_dataset(Problem problem, std::size_t n, const LabelFunction& label, std::uint64_t seed,
                      const Bounds* aid_bounds)
{
    if (n == 0)
        throw std::invalid_argument("build_dataset: n must be at least 1");
    std::vector<Vector> inputs;
    Metadata meta;
    meta.seed = seed;
    meta.problem = problem;
    if (problem == Problem::sfr) {
        inputs.reserve(n);
        for (std::size_t r = 0; r < n; ++r)
            inputs.push_back(generate_bc(20, 30.0, split_seed(seed, r)));
        meta.label = "s_max";
    } else {
        if (aid_bounds == nullptr)
            throw std::invalid_argument("build_dataset: AID sampling needs design bounds");
        inputs = lhs_sample(*aid_bounds, n, seed);
        meta.label = "neg_cp_min";
    }
    return label_inputs(std::move(inputs), label, meta);
}

std::string metadata_path(const std::string& csv_path)
{
    const auto dot = csv_path.rfind('.');
    const auto slash = csv_path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".meta.json";
    return csv_path.substr(0, dot) + ".meta.json";
}

void save_csv(const Dataset& data, const std::string& csv_path)
{
    data.validate();
    std::ofstream os(csv_path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + csv_path + " for writing");
    for (std::size_t j = 0; j < data.dim(); ++j)
        os << "x_" << j << ',';
    os << "label\n";
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (double v : data.inputs[r])
            os << io::format_double(v) << ',';
        os << io::format_double(data.labels[r]) << '\n';
    }
    if (!os)
        throw std::runtime_error("write failed: " + csv_path);

    nlohmann::ordered_json meta;
    meta["seed"] = data.meta.seed;
    meta["n"] = data.meta.requested;
    meta["rows"] = data.size();
    meta["problem"] = to_string(data.meta.problem);
    meta["fidelity"] = data.meta.fidelity;
    meta["label"] = data.meta.label;
    meta["dropped_rows"] = data.meta.dropped;
    io::write_text(metadata_path(csv_path), meta.dump(2) + "\n");
}

Dataset load_csv(const std::string& csv_path)
{
    std::ifstream is(csv_path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + csv_path);
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error(csv_path + ": empty file");
    const std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 2 || line.substr(line.rfind(',') + 1) != "label")
        throw std::runtime_error(csv_path + ": header must end with 'label'");

    Dataset data;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const Vector row = io::parse_csv_doubles(line);
        if (row.size() != columns)
            throw std::runtime_error(csv_path + ":" + std::to_string(lineno) + ": wrong column count");
        data.inputs.emplace_back(row.begin(), row.end() - 1);
        data.labels.push_back(row.back());
    }

    std::ifstream ms(metadata_path(csv_path));
    if (ms) {
        const nlohmann::json meta = nlohmann::json::parse(ms);
        data.meta.seed = meta.value("seed", std::uint64_t{0});
        data.meta.requested = meta.value("n", data.size());
        data.meta.problem = parse_problem(meta.value("problem", std::string("sfr")));
        data.meta.fidelity = meta.value("fidelity", std::string("LF"));
        data.meta.label = meta.value("label", std::string());
        data.meta.dropped = meta.value("dropped_rows", std::size_t{0});
    }
    data.validate();
    return data;
}

}  // namespace mfid::dataset
