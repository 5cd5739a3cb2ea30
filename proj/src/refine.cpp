#include "mfid/refine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mfid/io.hpp"
#include "mfid/optimizers.hpp"

namespace mfid::refine {

SolutionMatrix collect_solutions(const Predictor& predictor, double t_info, const Bounds& bounds, int n,
                                 std::uint64_t seed)
{
    if (n < 1)
        throw std::invalid_argument("collect_solutions: N must be at least 1");
    const auto objective = [&](std::span<const double> x) { return std::abs(predictor(x) - t_info); };
    SolutionMatrix s;
    s.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r)
        s.push_back(optimizers::refinement_inner_run(objective, bounds, split_seed(seed, static_cast<std::uint64_t>(r)))
                        .x_best);
    return s;
}

SolutionMatrix collect_solutions(const surrogate::SurrogateModel& model, const TargetSpec& target,
                                 const Bounds& bounds, int n, std::uint64_t seed)
{
    if (bounds.dim() != model.input_dim())
        throw std::invalid_argument("collect_solutions: bounds do not match the surrogate input dimension");
    return collect_solutions([&model](std::span<const double> x) { return model.predict(x); }, target.info,
                             bounds, n, seed);
}

RefinedBounds aid_refine(const SolutionMatrix& s, double eta, const Bounds& original)
{
    const std::size_t m = original.dim();
    if (m != airfoil::kDesignDim)
        throw std::invalid_argument("aid_refine: expected a 30-dimensional design space");
    if (s.empty())
        throw std::invalid_argument("aid_refine: empty solution matrix");
    if (!(eta > 0.0))
        throw std::invalid_argument("aid_refine: eta must be positive");
    Vector mean(m, 0.0);
    for (const Vector& row : s) {
        if (row.size() != m)
            throw std::invalid_argument("aid_refine: row length mismatch");
        for (std::size_t j = 0; j < m; ++j)
            mean[j] += row[j];
    }
    Vector lo(m), hi(m);
    const std::size_t half = airfoil::kCoefficientsPerSurface;
    for (std::size_t j = 0; j < m; ++j) {
        const double scaled = std::clamp(eta * mean[j] / static_cast<double>(s.size()), original.lower[j],
                                         original.upper[j]);
        if (j < half) {
            lo[j] = scaled;
            hi[j] = std::min(0.0, original.upper[j]);
            if (lo[j] >= hi[j])
                lo[j] = std::max(original.lower[j], hi[j] - kDegenerateWidth);
        } else {
            lo[j] = std::max(0.0, original.lower[j]);
            hi[j] = scaled;
            if (hi[j] <= lo[j])
                hi[j] = std::min(original.upper[j], lo[j] + kDegenerateWidth);
        }
    }
    RefinedBounds r;
    r.bounds = Bounds(std::move(lo), std::move(hi));
    r.strategy = "aid_average";
    r.solutions = s.size();
    r.eta = eta;
    r.pruning_fraction = r.bounds.pruning_fraction(original);
    return r;
}

Vector linspace(double a, double b, int n)
{
    if (n < 2)
        throw std::invalid_argument("linspace: need at least 2 points");
    Vector v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
    v.back() = b;
    return v;
}

Vector polyfit(std::span<const double> x, std::span<const double> y, int degree)
{
    if (x.size() != y.size() || degree < 0)
        throw std::invalid_argument("polyfit: bad arguments");
    const auto n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index cols = degree + 1;
    Eigen::MatrixXd v(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = 1.0;
        for (Eigen::Index k = 0; k < cols; ++k) {
            v(i, k) = p;
            p *= x[static_cast<std::size_t>(i)];
        }
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
    if (qr.rank() < cols)
        throw std::runtime_error("polyfit: degenerate fit of degree " + std::to_string(degree));
    const Eigen::VectorXd c = qr.solve(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
    return Vector(c.data(), c.data() + c.size());
}

double polyval(std::span<const double> coefficients, double x)
{
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;)
        acc = acc * x + coefficients[k];
    return acc;
}

RefinedBounds sfr_refine(const SolutionMatrix& s, const std::vector<int>& degrees, int hf_dim, double s_ub)
{
    if (s.empty())
        throw std::invalid_argument("sfr_refine: empty solution matrix");
    if (degrees.empty())
        throw std::invalid_argument("sfr_refine: no polynomial degrees");
    const std::size_t m = s.front().size();
    const Vector xs = linspace(0.0, 1.0, static_cast<int>(m));
    const Vector xh = linspace(0.0, 1.0, hf_dim);
    double peak = -std::numeric_limits<double>::infinity();
    for (const Vector& row : s) {
        if (row.size() != m)
            throw std::invalid_argument("sfr_refine: row length mismatch");
        for (int d : degrees) {
            const Vector c = polyfit(xs, row, d);
            for (double x : xh)
                peak = std::max(peak, polyval(c, x));
        }
    }
    double ub = std::min(peak, s_ub);
    if (ub <= 0.0)
        ub = kDegenerateWidth;
    RefinedBounds r;
    r.bounds = Bounds::uniform(static_cast<std::size_t>(hf_dim), 0.0, ub);
    r.strategy = "sfr_polyfit";
    r.solutions = s.size();
    r.degrees = degrees;
    r.pruning_fraction = r.bounds.pruning_fraction(Bounds::uniform(static_cast<std::size_t>(hf_dim), 0.0, s_ub));
    return r;
}

std::string to_json(const RefinedBounds& r, const Bounds& original)
{
    nlohmann::ordered_json j;
    j["strategy"] = r.strategy;
    j["N"] = r.solutions;
    if (r.strategy == "aid_average")
        j["eta"] = r.eta;
    else
        j["degrees"] = r.degrees;
    j["lb_R"] = r.bounds.lower;
    j["ub_R"] = r.bounds.upper;
    j["pruning_fraction"] = r.bounds.pruning_fraction(original);
    j["original_lb"] = original.lower;
    j["original_ub"] = original.upper;
    return j.dump(2) + "\n";
}

RefinedBounds refined_from_json(const std::string& text)
{
    const nlohmann::json j = nlohmann::json::parse(text);
    RefinedBounds r;
    r.strategy = j.at("strategy").get<std::string>();
    r.solutions = j.at("N").get<std::size_t>();
    r.eta = j.value("eta", 1.0);
    r.degrees = j.value("degrees", std::vector<int>{});
    r.bounds = Bounds(j.at("lb_R").get<Vector>(), j.at("ub_R").get<Vector>());
    r.pruning_fraction = j.at("pruning_fraction").get<double>();
    return r;
}

void save_refined(const RefinedBounds& r, const Bounds& original, const std::string& path)
{
    io::write_text(path, to_json(r, original));
}

RefinedBounds load_refined(const std::string& path)
{
    return refined_from_json(io::read_text(path));
}

void save_solutions(const SolutionMatrix& s, const std::string& path)
{
    std::ostringstream os;
    for (const Vector& row : s) {
        for (std::size_t j = 0; j < row.size(); ++j)
            os << (j ? "," : "") << io::format_double(row[j]);
        os << '\n';
    }
    io::write_text(path, os.str());
}

SolutionMatrix load_solutions(const std::string& path)
{
    std::istringstream is(io::read_text(path));
    SolutionMatrix s;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty())
            s.push_back(io::parse_csv_doubles(line));
    return s;
}

std::vector<ConvergenceEntry> convergence_study(const SolutionMatrix& s, const std::vector<std::size_t>& sizes,
                                                const std::function<Vector(std::span<const double>)>& summary)
{
    std::vector<Vector> rows;
    rows.reserve(s.size());
    for (const Vector& r : s)
        rows.push_back(summary(r));
    std::vector<ConvergenceEntry> out;
    for (std::size_t n : sizes) {
        if (n == 0 || n > rows.size())
            continue;
        const std::size_t q = rows.front().size();
        ConvergenceEntry e{n, Vector(q, 0.0), Vector(q, 0.0)};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < q; ++k)
                e.mean[k] += rows[i][k] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < q; ++k)
                e.std[k] += (rows[i][k] - e.mean[k]) * (rows[i][k] - e.mean[k]) / static_cast<double>(n);
        for (double& v : e.std)
            v = std::sqrt(v);
        out.push_back(std::move(e));
    }
    return out;
}

std::function<Vector(std::span<const double>)> aid_zeta_summary(const airfoil::SplineBasis& basis, int stations)
{
    const Vector zx = airfoil::cosine_stations(stations);
    return [&basis, zx](std::span<const double> x) {
        const airfoil::AirfoilDesign d = airfoil::AirfoilDesign::from_vector(x);
        Vector out = airfoil::surface_y(basis, d.upper, zx);
        const Vector lower = airfoil::surface_y(basis, d.lower, zx);
        out.insert(out.end(), lower.begin(), lower.end());
        return out;
    };
}

std::function<Vector(std::span<const double>)> sfr_mean_summary()
{
    return [](std::span<const double> x) {
        return Vector{std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size())};
    };
}

std::string convergence_json(const std::vector<ConvergenceEntry>& entries, const std::string& quantity)
{
    nlohmann::ordered_json j;
    j["quantity"] = quantity;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const ConvergenceEntry& e : entries) {
        nlohmann::ordered_json row;
        row["N"] = e.n;
        row["mean"] = e.mean;
        row["std"] = e.std;
        double avg = 0.0, sd = 0.0;
        for (std::size_t k = 0; k < e.mean.size(); ++k) {
            avg += e.mean[k] / static_cast<double>(e.mean.size());
            sd += e.std[k] / static_cast<double>(e.std.size());
        }
        row["overall_mean"] = avg;
        row["overall_std"] = sd;
        rows.push_back(std::move(row));
    }
    j["entries"] = std::move(rows);
    return j.dump(2) + "\n";
}

}  // namespace mfid::refine
