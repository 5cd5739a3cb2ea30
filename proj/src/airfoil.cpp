#include "mfid/airfoil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace mfid::airfoil {

namespace {

using json = nlohmann::json;

// Mock pressure model coefficients.
constexpr double kThicknessVelocity = 1.5;
constexpr double kCamberVelocity = 4.0;
constexpr double kLeadingEdgeStation = 0.0025;
constexpr double kHighFidelityRadiusFloor = 1e-3;
constexpr double kLowFidelityRadiusFloor = 2.5e-3;
constexpr double kLowFidelityThicknessScale = 0.95;

bool non_decreasing(const Vector& v)
{
    return std::is_sorted(v.begin(), v.end());
}

}  // namespace

Vector AirfoilDesign::to_vector() const
{
    Vector x(lower);
    x.insert(x.end(), upper.begin(), upper.end());
    return x;
}

AirfoilDesign AirfoilDesign::from_vector(std::span<const double> x)
{
    if (x.size() % 2 != 0 || x.empty())
        throw std::invalid_argument("AirfoilDesign: design vector must hold lower and upper halves");
    const std::size_t h = x.size() / 2;
    return {Vector(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(h)),
            Vector(x.begin() + static_cast<std::ptrdiff_t>(h), x.end())};
}

Vector cosine_stations(int n)
{
    if (n < 2)
        throw std::invalid_argument("cosine_stations: need at least 2 stations");
    Vector z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        z[k] = 0.5 * (1.0 - std::cos(std::numbers::pi * k / (n - 1)));
    z.front() = 0.0;
    z.back() = 1.0;
    return z;
}

SurfacePoints naca4(double max_camber, double camber_pos, double thickness, int points_per_surface)
{
    const Vector x = cosine_stations(points_per_surface);
    SurfacePoints s;
    for (double xi : x) {
        // closed trailing edge: the polynomial vanishes at x = 1
        const double yt = xi >= 1.0 ? 0.0
                                    : 5.0 * thickness *
                                          (0.2969 * std::sqrt(xi) - 0.1260 * xi - 0.3516 * xi * xi +
                                           0.2843 * xi * xi * xi - 0.1036 * xi * xi * xi * xi);
        double yc = 0.0;
        if (max_camber > 0.0 && camber_pos > 0.0) {
            const double m = max_camber;
            const double p = camber_pos;
            yc = xi < p ? m / (p * p) * (2.0 * p * xi - xi * xi)
                        : m / ((1.0 - p) * (1.0 - p)) * ((1.0 - 2.0 * p) + 2.0 * p * xi - xi * xi);
        }
        s.x_upper.push_back(xi);
        s.y_upper.push_back(yc + yt);
        s.x_lower.push_back(xi);
        s.y_lower.push_back(yc - yt);
    }
    return s;
}

BaselineFit fit_surfaces(const SplineBasis& basis, const SurfacePoints& points)
{
    // End coefficients of a clamped spline are the end ordinates; pin them to
    // the first/last data points and fit the interior coefficients.
    auto fit_one = [&](const Vector& x, const Vector& y, double& max_err) {
        const int nc = basis.size();
        if (x.size() != y.size() || x.size() < static_cast<std::size_t>(nc))
            throw std::invalid_argument("fit_surfaces: not enough points for the basis");
        if (!non_decreasing(x))
            throw std::invalid_argument("fit_surfaces: abscissae must be ascending");
        const auto rows = static_cast<Eigen::Index>(x.size());
        Eigen::MatrixXd full(rows, nc);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Vector v = basis.values(std::sqrt(std::max(x[r], 0.0)));
            for (int c = 0; c < nc; ++c)
                full(r, c) = v[c];
        }
        Eigen::VectorXd coef(nc);
        coef[0] = y.front();
        coef[nc - 1] = y.back();
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(y.data(), rows);
        const Eigen::VectorXd rhs = b - full.col(0) * coef[0] - full.col(nc - 1) * coef[nc - 1];
        const Eigen::MatrixXd inner = full.middleCols(1, nc - 2);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(inner);
        if (qr.rank() < nc - 2)
            throw std::runtime_error("fit_surfaces: rank-deficient collocation matrix");
        coef.segment(1, nc - 2) = qr.solve(rhs);
        max_err = std::max(max_err, (full * coef - b).cwiseAbs().maxCoeff());
        return Vector(coef.data(), coef.data() + coef.size());
    };
    BaselineFit fit;
    fit.coefficients.lower = fit_one(points.x_lower, points.y_lower, fit.max_error);
    fit.coefficients.upper = fit_one(points.x_upper, points.y_upper, fit.max_error);
    return fit;
}

BaselineFit fit_baseline(const SplineBasis& basis, int points_per_surface)
{
    if (points_per_surface < 100)
        throw std::invalid_argument("fit_baseline: need at least 100 points per surface");
    return fit_surfaces(basis, naca4(0.0, 0.0, 0.12, points_per_surface));
}

Bounds original_bounds(const AirfoilDesign& baseline, double gamma)
{
    if (!(gamma > 0.0))
        throw std::invalid_argument("original_bounds: gamma must be positive");
    Vector lo, hi;
    for (double c : baseline.lower) {
        lo.push_back(std::min(gamma * (c - kOverlapMargin), 0.0));
        hi.push_back(0.0);
    }
    for (double c : baseline.upper) {
        lo.push_back(0.0);
        hi.push_back(std::max(gamma * (c + kOverlapMargin), 0.0));
    }
    return Bounds(std::move(lo), std::move(hi));
}

Vector surface_y(const SplineBasis& basis, std::span<const double> coefficients,
                 std::span<const double> zeta_x)
{
    Vector y;
    y.reserve(zeta_x.size());
    for (double z : zeta_x)
        y.push_back(basis.evaluate(coefficients, std::sqrt(std::clamp(z, 0.0, 1.0))));
    return y;
}

Geometry realize_geometry(const AirfoilDesign& design, const SplineBasis& basis, int points_per_surface)
{
    const Vector up_x = cosine_stations(points_per_surface);
    Vector lo_x = cosine_stations(points_per_surface + 1);
    lo_x.erase(lo_x.begin());

    const Vector yu = surface_y(basis, design.upper, up_x);
    const Vector yl = surface_y(basis, design.lower, lo_x);
    const Vector yl_at_upper = surface_y(basis, design.lower, up_x);

    Geometry g;
    g.coords.reserve(up_x.size() + lo_x.size());
    for (std::size_t k = up_x.size(); k-- > 0;)
        g.coords.push_back({up_x[k], yu[k]});
    for (std::size_t k = 0; k < lo_x.size(); ++k)
        g.coords.push_back({lo_x[k], yl[k]});
    for (std::size_t k = 0; k < up_x.size(); ++k)
        if (yu[k] < yl_at_upper[k] - 1e-9) {
            g.valid = false;
            break;
        }
    return g;
}

std::string to_string(Fidelity f)
{
    return f == Fidelity::high ? "HF" : "LF";
}

Fidelity parse_fidelity(const std::string& s)
{
    if (s == "HF")
        return Fidelity::high;
    if (s == "LF")
        return Fidelity::low;
    throw std::invalid_argument("unknown fidelity '" + s + "'");
}

int sample_count(Fidelity f)
{
    return f == Fidelity::high ? 300 : 100;
}

Vector arc_parameter(const std::vector<Point>& coords)
{
    Vector s(coords.size(), 0.0);
    for (std::size_t k = 1; k < coords.size(); ++k)
        s[k] = s[k - 1] + std::hypot(coords[k][0] - coords[k - 1][0], coords[k][1] - coords[k - 1][1]);
    if (!coords.empty() && s.back() > 0.0)
        for (double& v : s)
            v /= s.back();
    return s;
}

Vector interpolate_cp(const CpDistribution& computed, std::span<const double> target_locations)
{
    if (computed.s.size() != computed.cp.size())
        throw std::invalid_argument("interpolate_cp: location/value length mismatch");
    if (computed.s.size() < 2)
        throw std::invalid_argument("interpolate_cp: need at least two computed samples");
    if (!non_decreasing(computed.s))
        throw std::invalid_argument("interpolate_cp: locations must be non-decreasing");
    return interp_linear(computed.s, computed.cp, target_locations);
}

CpDistribution mock_cp(const std::vector<Point>& coords, Fidelity fidelity, double alpha_deg)
{
    if (coords.size() < 4)
        throw EvaluationError("mock evaluator: too few coordinates");
    std::size_t le = 0;
    for (std::size_t k = 1; k < coords.size(); ++k)
        if (coords[k][0] < coords[le][0])
            le = k;

    Vector ux, uy, lx, ly;
    for (std::size_t k = le + 1; k-- > 0;) {
        ux.push_back(coords[k][0]);
        uy.push_back(coords[k][1]);
    }
    for (std::size_t k = le; k < coords.size(); ++k) {
        lx.push_back(coords[k][0]);
        ly.push_back(coords[k][1]);
    }
    if (ux.size() < 2 || lx.size() < 2 || !non_decreasing(ux) || !non_decreasing(lx))
        throw EvaluationError("mock evaluator: coordinates are not in TE-upper-LE-lower-TE order");

    // leading-edge radius from y ~ a sqrt(x) near the nose
    const double x0 = ux.front();
    const double root = std::sqrt(kLeadingEdgeStation);
    const double a_u = std::max(0.0, interp_linear(ux, uy, x0 + kLeadingEdgeStation) - uy.front()) / root;
    const double a_l = std::max(0.0, ly.front() - interp_linear(lx, ly, x0 + kLeadingEdgeStation)) / root;
    const double a = 0.5 * (a_u + a_l);
    const bool low = fidelity == Fidelity::low;
    const double radius = 0.5 * a * a + (low ? kLowFidelityRadiusFloor : kHighFidelityRadiusFloor);
    const double k_t = kThicknessVelocity * (low ? kLowFidelityThicknessScale : 1.0);
    const double alpha = alpha_deg * std::numbers::pi / 180.0;

    auto lift = [&](double x) {
        const double xc = std::clamp(x - x0, 0.0, 1.0);
        return alpha * std::sqrt((1.0 - xc) / (xc + radius));
    };

    CpDistribution out;
    out.s = arc_parameter(coords);
    out.cp.assign(coords.size(), 0.0);
    // upper chain runs LE -> TE, i.e. coords[le - k]
    for (std::size_t k = 0; k < ux.size(); ++k) {
        const double yl = interp_linear(lx, ly, ux[k]);
        const double t = uy[k] - yl;
        const double m = 0.5 * (uy[k] + yl);
        out.cp[le - k] = -2.0 * (k_t * t + lift(ux[k]) + kCamberVelocity * m);
    }
    for (std::size_t k = 1; k < lx.size(); ++k) {
        const double yu = interp_linear(ux, uy, lx[k]);
        const double t = yu - ly[k];
        const double m = 0.5 * (yu + ly[k]);
        out.cp[le + k] = -2.0 * (k_t * t - lift(lx[k]) - kCamberVelocity * m);
    }
    return out;
}

CpDistribution MockCpSolver::run(const std::vector<Point>& coords, Fidelity fidelity) const
{
    return mock_cp(coords, fidelity, flow_.alpha_deg);
}

std::string encode_request(const std::vector<Point>& coords, Fidelity fidelity, const FlowConditions& flow)
{
    json j;
    j["coords"] = coords;
    j["fidelity"] = to_string(fidelity);
    j["re"] = flow.reynolds;
    j["aoa"] = flow.alpha_deg;
    j["mach"] = flow.mach;
    return j.dump();
}

CpDistribution decode_response(const std::string& line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw EvaluationError(std::string("evaluator response is not JSON: ") + e.what());
    }
    if (j.contains("error"))
        throw EvaluationError("evaluator reported: " + j["error"].dump());
    if (!j.contains("s") || !j.contains("cp"))
        throw EvaluationError("evaluator response lacks 's' or 'cp'");
    CpDistribution d;
    try {
        d.s = j["s"].get<Vector>();
        d.cp = j["cp"].get<Vector>();
    } catch (const json::exception& e) {
        throw EvaluationError(std::string("malformed evaluator response: ") + e.what());
    }
    if (d.s.size() != d.cp.size() || d.s.size() < 2)
        throw EvaluationError("evaluator response has inconsistent sample arrays");
    for (std::size_t k = 0; k < d.s.size(); ++k)
        if (!std::isfinite(d.s[k]) || !std::isfinite(d.cp[k]))
            throw EvaluationError("evaluator response has non-finite samples");
    return d;
}

std::string serve_mock_request(const std::string& request_line)
{
    json out;
    try {
        const json req = json::parse(request_line);
        const auto coords = req.at("coords").get<std::vector<Point>>();
        const Fidelity fidelity = parse_fidelity(req.at("fidelity").get<std::string>());
        const CpDistribution d = mock_cp(coords, fidelity, req.value("aoa", FlowConditions{}.alpha_deg));
        out["s"] = d.s;
        out["cp"] = d.cp;
    } catch (const std::exception& e) {
        out = json{{"error", e.what()}};
    }
    return out.dump();
}

CpDistribution external_evaluate(const AirfoilDesign& design, Fidelity fidelity,
                                 const SplineBasis& basis, const CpSolver& solver)
{
    const Geometry g = realize_geometry(design, basis, sample_count(fidelity) / 2);
    return solver.run(g.coords, fidelity);
}

NegatedCpEvaluator::NegatedCpEvaluator(std::shared_ptr<const SplineBasis> basis,
                                       std::shared_ptr<const CpSolver> solver, Fidelity fidelity,
                                       Vector target_locations)
    : basis_(std::move(basis)),
      solver_(std::move(solver)),
      fidelity_(fidelity),
      target_locations_(std::move(target_locations))
{
}

Vector NegatedCpEvaluator::evaluate(std::span<const double> x) const
{
    if (x.size() != static_cast<std::size_t>(kDesignDim))
        throw std::invalid_argument("airfoil evaluator: design must have 30 coefficients");
    const CpDistribution d = external_evaluate(AirfoilDesign::from_vector(x), fidelity_, *basis_, *solver_);
    Vector out = interpolate_cp(d, target_locations_);
    for (double& v : out)
        v = -v;
    return out;
}

}  // namespace mfid::airfoil
