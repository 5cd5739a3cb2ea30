#include "mfid/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace mfid::diffusion {

namespace {

constexpr int kImplicitAutoSteps = 200;

void check_finite(const std::vector<double>& v)
{
    for (double x : v)
        if (!std::isfinite(x))
            throw EvaluationError("diffusion solve produced a non-finite value");
}

void solve_explicit(std::vector<double>& s, const Grid& g, double D, const TimeStepping& ts)
{
    const int nx = g.nx;
    const int ny = g.ny;
    const double rx = D * ts.dt / (g.dx() * g.dx());
    const double ry = D * ts.dt / (g.dy() * g.dy());
    std::vector<double> next = s;
    for (int step = 0; step < ts.steps; ++step) {
        for (int j = 0; j < ny - 1; ++j) {
            const double* row = s.data() + static_cast<std::size_t>(j) * nx;
            const double* below = j > 0 ? row - nx : row;  // zero-gradient floor
            const double* above = row + nx;
            double* out = next.data() + static_cast<std::size_t>(j) * nx;
            for (int i = 0; i < nx; ++i) {
                const double c = row[i];
                const double w = i > 0 ? row[i - 1] : c;
                const double e = i < nx - 1 ? row[i + 1] : c;
                out[i] = c + rx * (w - 2.0 * c + e) + ry * (below[i] - 2.0 * c + above[i]);
            }
        }
        std::swap(s, next);
        // pinned row is identical in both buffers
    }
}

void solve_implicit(std::vector<double>& s, const Grid& g, double D, const TimeStepping& ts)
{
    const int nx = g.nx;
    const int nyi = g.ny - 1;  // evolved rows
    const int n = nx * nyi;
    const double rx = D * ts.dt / (g.dx() * g.dx());
    const double ry = D * ts.dt / (g.dy() * g.dy());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    Eigen::VectorXd rhs_bc = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < nyi; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int k = j * nx + i;
            double diag = 1.0;
            if (i > 0) {
                trip.emplace_back(k, k - 1, -rx);
                diag += rx;
            }
            if (i < nx - 1) {
                trip.emplace_back(k, k + 1, -rx);
                diag += rx;
            }
            if (j > 0) {
                trip.emplace_back(k, k - nx, -ry);
                diag += ry;
            }
            if (j < nyi - 1) {
                trip.emplace_back(k, k + nx, -ry);
                diag += ry;
            } else {
                // neighbour is the pinned boundary row
                diag += ry;
                rhs_bc[k] = ry * s[static_cast<std::size_t>(j + 1) * nx + i];
            }
            trip.emplace_back(k, k, diag);
        }
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
    if (ldlt.info() != Eigen::Success)
        throw EvaluationError("implicit diffusion: factorization failed");

    Eigen::Map<Eigen::VectorXd> interior(s.data(), n);
    Eigen::VectorXd u = interior;
    Eigen::VectorXd rhs(n);
    for (int step = 0; step < ts.steps; ++step) {
        rhs = u + rhs_bc;
        u = ldlt.solve(rhs);
    }
    interior = u;
}

}  // namespace

const ProbeSet& default_probes()
{
    static const ProbeSet probes = {
        {0.168, 0.263}, {0.063, 0.043}, {0.867, 0.445}, {0.711, 0.292}, {0.412, 0.329},
        {0.593, 0.193}, {0.096, 0.227}, {0.670, 0.104}, {0.814, 0.064}, {0.109, 0.083},
        {0.666, 0.216}, {0.024, 0.399}, {0.560, 0.276}, {0.322, 0.374}, {0.250, 0.009},
        {0.210, 0.343}, {0.277, 0.128}, {0.957, 0.136}, {0.933, 0.496}, {0.151, 0.175},
        {0.461, 0.409}, {0.385, 0.470}, {0.785, 0.032}, {0.511, 0.091}, {0.488, 0.458},
        {0.619, 0.307}, {0.355, 0.361}, {0.865, 0.425}, {0.976, 0.163}, {0.765, 0.249},
    };
    return probes;
}

double stability_limit(const Grid& grid, double diffusivity)
{
    const double inv = 1.0 / (grid.dx() * grid.dx()) + 1.0 / (grid.dy() * grid.dy());
    return 1.0 / (2.0 * diffusivity * inv);
}

TimeStepping time_stepping(const Grid& grid, const DiffusionConfig& cfg)
{
    if (!(cfg.diffusivity > 0.0) || !(cfg.t_max >= 0.0))
        throw std::invalid_argument("diffusion: diffusivity must be positive and t_max non-negative");
    if (cfg.t_max == 0.0)
        return {0, 0.0};
    double dt = 0.0;
    if (cfg.dt) {
        dt = *cfg.dt;
        if (!(dt > 0.0))
            throw std::invalid_argument("diffusion: dt must be positive");
        if (cfg.scheme == Scheme::explicit_ftcs && dt > stability_limit(grid, cfg.diffusivity))
            throw std::invalid_argument("diffusion: explicit dt exceeds the stability limit");
    } else if (cfg.scheme == Scheme::explicit_ftcs) {
        dt = 0.9 * stability_limit(grid, cfg.diffusivity);
    } else {
        dt = cfg.t_max / kImplicitAutoSteps;
    }
    const int steps = static_cast<int>(std::ceil(cfg.t_max / dt - 1e-9));
    return {steps, cfg.t_max / steps};
}

ScalarField solve(const Grid& grid, std::span<const double> bc, const DiffusionConfig& cfg,
                  const ScalarField* initial)
{
    if (grid.nx < 1 || grid.ny < 2)
        throw std::invalid_argument("diffusion: grid needs nx >= 1 and ny >= 2");
    if (bc.size() != static_cast<std::size_t>(grid.nx))
        throw std::invalid_argument("diffusion: boundary length " + std::to_string(bc.size()) +
                                    " does not match nx = " + std::to_string(grid.nx));
    for (double v : bc)
        if (!std::isfinite(v))
            throw std::invalid_argument("diffusion: non-finite boundary value");

    const TimeStepping ts = time_stepping(grid, cfg);
    ScalarField field{grid, std::vector<double>(static_cast<std::size_t>(grid.cells()), 0.0)};
    if (initial != nullptr) {
        if (initial->values.size() != field.values.size())
            throw std::invalid_argument("diffusion: initial field size mismatch");
        field.values = initial->values;
    }
    std::copy(bc.begin(), bc.end(),
              field.values.begin() + static_cast<std::ptrdiff_t>(grid.ny - 1) * grid.nx);

    if (ts.steps > 0) {
        if (cfg.scheme == Scheme::explicit_ftcs)
            solve_explicit(field.values, grid, cfg.diffusivity, ts);
        else
            solve_implicit(field.values, grid, cfg.diffusivity, ts);
    }
    check_finite(field.values);
    return field;
}

double field_max(const ScalarField& field)
{
    const auto evolved = static_cast<std::ptrdiff_t>(field.grid.ny - 1) * field.grid.nx;
    return *std::max_element(field.values.begin(), field.values.begin() + evolved);
}

Vector probe_sample(const ScalarField& field, const ProbeSet& probes)
{
    const Grid& g = field.grid;
    Vector out;
    out.reserve(probes.size());
    for (const Probe& p : probes) {
        if (!(p.x >= 0.0 && p.x <= g.width && p.y >= 0.0 && p.y <= g.height))
            throw std::invalid_argument("probe outside domain");
        const double fx = std::clamp(p.x / g.dx() - 0.5, 0.0, static_cast<double>(g.nx - 1));
        const double fy = std::clamp(p.y / g.dy() - 0.5, 0.0, static_cast<double>(g.ny - 1));
        const int i0 = std::min(static_cast<int>(fx), std::max(g.nx - 2, 0));
        const int j0 = std::min(static_cast<int>(fy), g.ny - 2);
        const int i1 = std::min(i0 + 1, g.nx - 1);
        const int j1 = j0 + 1;
        const double wx = fx - i0;
        const double wy = fy - j0;
        const double bottom = (1.0 - wx) * field.at(i0, j0) + wx * field.at(i1, j0);
        const double top = (1.0 - wx) * field.at(i0, j1) + wx * field.at(i1, j1);
        out.push_back((1.0 - wy) * bottom + wy * top);
    }
    return out;
}

Vector resample_cell_centered(std::span<const double> values, std::size_t n_out)
{
    if (values.empty() || n_out == 0)
        throw std::invalid_argument("resample: empty input or output");
    const std::size_t n_in = values.size();
    Vector xs(n_in);
    for (std::size_t i = 0; i < n_in; ++i)
        xs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n_in);
    Vector xq(n_out);
    for (std::size_t j = 0; j < n_out; ++j)
        xq[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(n_out);
    return interp_linear(xs, values, xq);
}

Vector downsample_bc(std::span<const double> hf_values)
{
    const Grid hf = Grid::high_fidelity();
    const Grid lf = Grid::low_fidelity();
    if (hf_values.size() != static_cast<std::size_t>(hf.nx))
        throw std::invalid_argument("downsample_bc: expected " + std::to_string(hf.nx) +
                                    " values, got " + std::to_string(hf_values.size()));
    return resample_cell_centered(hf_values, static_cast<std::size_t>(lf.nx));
}

double slab_series(double y, double t, double diffusivity, double length, double s0, int terms)
{
    using std::numbers::pi;
    double sum = 0.0;
    for (int k = 0; k < terms; ++k) {
        const double odd = 2.0 * k + 1.0;
        const double mu = odd * pi / (2.0 * length);
        const double c = 4.0 * ((k % 2 == 0) ? 1.0 : -1.0) / (odd * pi);
        sum += c * std::exp(-mu * mu * diffusivity * t) * std::cos(mu * y);
    }
    return s0 * (1.0 - sum);
}

void write_field_csv(std::ostream& os, const ScalarField& field)
{
    const Grid& g = field.grid;
    os.precision(17);
    os << "nx,ny,dx,dy\n" << g.nx << ',' << g.ny << ',' << g.dx() << ',' << g.dy() << '\n';
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i)
            os << (i ? "," : "") << field.at(i, j);
        os << '\n';
    }
}

void write_probe_csv(std::ostream& os, const ProbeSet& probes, std::span<const double> samples)
{
    if (samples.size() != probes.size())
        throw std::invalid_argument("write_probe_csv: sample count mismatch");
    os.precision(17);
    os << "probe_id,x,y,s\n";
    for (std::size_t k = 0; k < probes.size(); ++k)
        os << k + 1 << ',' << probes[k].x << ',' << probes[k].y << ',' << samples[k] << '\n';
}

ProbeEvaluator::ProbeEvaluator(Grid grid, DiffusionConfig cfg, ProbeSet probes)
    : grid_(grid), cfg_(cfg), probes_(std::move(probes))
{
}

Vector ProbeEvaluator::evaluate(std::span<const double> x) const
{
    return probe_sample(solve(grid_, x, cfg_), probes_);
}

}  // namespace mfid::diffusion
