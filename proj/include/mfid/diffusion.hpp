#pragma once

// Transient 2D scalar diffusion on the unit-width, half-height rectangle.
// The top row of cells holds the Dirichlet boundary scalars at its cell
// centres; left, right and bottom walls are zero-gradient.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfid/core.hpp"

namespace mfid::diffusion {

struct Grid {
    int nx = 20;
    int ny = 20;
    double width = 1.0;
    double height = 0.5;

    double dx() const { return width / nx; }
    double dy() const { return height / ny; }
    int cells() const { return nx * ny; }
    double x_center(int i) const { return (i + 0.5) * dx(); }
    double y_center(int j) const { return (j + 0.5) * dy(); }

    static Grid low_fidelity() { return {20, 20}; }
    static Grid high_fidelity() { return {80, 80}; }
};

enum class Scheme { explicit_ftcs, implicit_euler };

struct DiffusionConfig {
    double diffusivity = 1.0;  // m^2/s
    double t_max = 0.1;        // s
    Scheme scheme = Scheme::explicit_ftcs;
    std::optional<double> dt;  // auto when empty
};

/// Cell-centred field, row-major with j = 0 the bottom row. The top row
/// (j = ny - 1) carries the imposed boundary scalars.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
};

struct Probe {
    double x = 0.0;
    double y = 0.0;
};

using ProbeSet = std::vector<Probe>;

/// The 30 measurement locations used for the reconstruction targets.
const ProbeSet& default_probes();

/// Largest stable explicit step, 1 / (2 D (1/dx^2 + 1/dy^2)).
double stability_limit(const Grid& grid, double diffusivity);

/// Step count and step size actually used by solve() for this configuration.
struct TimeStepping {
    int steps = 0;
    double dt = 0.0;
};
TimeStepping time_stepping(const Grid& grid, const DiffusionConfig& cfg);

/// Advances a zero field (or `initial`, when given) to t_max with the top
/// row pinned to `bc`. Throws std::invalid_argument on a bc length mismatch
/// or an unstable explicit dt, EvaluationError on non-finite results.
ScalarField solve(const Grid& grid, std::span<const double> bc, const DiffusionConfig& cfg = {},
                  const ScalarField* initial = nullptr);

/// Maximum over the evolved cells (the pinned boundary row is excluded).
double field_max(const ScalarField& field);

/// Bilinear interpolation between cell centres (boundary row included),
/// clamped to the outermost centres. Probes outside the domain throw.
Vector probe_sample(const ScalarField& field, const ProbeSet& probes = default_probes());

/// Piecewise-linear resampling of cell-centred boundary values onto
/// `n_out` cell centres spanning the same width.
Vector resample_cell_centered(std::span<const double> values, std::size_t n_out);

/// HF (80) top-boundary values to the LF (20) top-boundary resolution.
Vector downsample_bc(std::span<const double> hf_values);

/// 1D slab with zero initial value, Dirichlet s0 at y = length and zero
/// flux at y = 0; eigenfunction series evaluated at (y, t).
double slab_series(double y, double t, double diffusivity, double length, double s0,
                   int terms = 200);

void write_field_csv(std::ostream& os, const ScalarField& field);
void write_probe_csv(std::ostream& os, const ProbeSet& probes, std::span<const double> samples);

/// Performance evaluator: HF/LF solve of the design as a top boundary,
/// sampled at the probes.
class ProbeEvaluator : public PerformanceEvaluator {
public:
    ProbeEvaluator(Grid grid, DiffusionConfig cfg = {}, ProbeSet probes = default_probes());
    Vector evaluate(std::span<const double> x) const override;

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    DiffusionConfig cfg_;
    ProbeSet probes_;
};

}  // namespace mfid::diffusion
