#pragma once

// B-spline airfoil parametrization. Each surface is a clamped degree-5
// spline y(u) in the reparametrized abscissa u = sqrt(zeta_x), with a fixed
// knot vector giving 15 coefficients per surface (30 design variables).
// The square-root abscissa absorbs the sqrt(x) leading-edge behaviour of
// 4-digit sections, which keeps the spline linear in its coefficients.

#include <array>
#include <chrono>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mfid/core.hpp"

namespace mfid::airfoil {

inline constexpr int kCoefficientsPerSurface = 15;
inline constexpr int kDesignDim = 2 * kCoefficientsPerSurface;
inline constexpr double kOverlapMargin = 1e-5;

class SplineBasis {
public:
    /// Clamped knot vector on [0, 1] with uniform interior knots.
    explicit SplineBasis(int degree = 5, int n_coefficients = kCoefficientsPerSurface);

    int degree() const { return degree_; }
    int size() const { return n_coef_; }
    const std::vector<double>& knots() const { return knots_; }

    /// All basis function values at u (length size()).
    Vector values(double u) const;
    /// Second derivatives of all basis functions with respect to u.
    Vector second_derivatives(double u) const;

    double evaluate(std::span<const double> coefficients, double u) const;

private:
    int degree_;
    int n_coef_;
    std::vector<double> knots_;
};

struct SurfacePoints {
    Vector x_upper, y_upper;
    Vector x_lower, y_lower;
};

/// NACA 4-digit section (closed trailing edge) with cosine spacing;
/// camber is added vertically to the thickness distribution.
SurfacePoints naca4(double max_camber, double camber_pos, double thickness, int points_per_surface);

struct AirfoilDesign {
    Vector lower;  // c_l, <= 0
    Vector upper;  // c_u, >= 0

    Vector to_vector() const;
    static AirfoilDesign from_vector(std::span<const double> x);
};

struct BaselineFit {
    AirfoilDesign coefficients;
    double max_error = 0.0;  // max |dy| at the fit abscissae
};

/// Least-squares spline fit of both surfaces. Throws std::runtime_error
/// when the collocation matrix is rank deficient.
BaselineFit fit_surfaces(const SplineBasis& basis, const SurfacePoints& points);

/// Reference section used to build the original bounds.
BaselineFit fit_baseline(const SplineBasis& basis, int points_per_surface = 160);

/// Box of the design vector scaled by gamma around the baseline:
/// lower dims [gamma (c_L - 1e-5), 0], upper dims [0, gamma (c_U + 1e-5)].
Bounds original_bounds(const AirfoilDesign& baseline, double gamma = 3.0);

using Point = std::array<double, 2>;

struct Geometry {
    std::vector<Point> coords;  // TE -> upper -> LE -> lower -> TE
    bool valid = true;          // false when the upper surface dips below the lower
};

/// Chord stations with cosine clustering at both ends, ascending in [0, 1].
Vector cosine_stations(int n);

/// Surface ordinates at chord stations zeta_x.
Vector surface_y(const SplineBasis& basis, std::span<const double> coefficients,
                 std::span<const double> zeta_x);

/// `points_per_surface` stations on the upper surface (LE included) and as
/// many on the lower surface (LE excluded).
Geometry realize_geometry(const AirfoilDesign& design, const SplineBasis& basis, int points_per_surface);

enum class Fidelity { low, high };

std::string to_string(Fidelity f);
Fidelity parse_fidelity(const std::string& s);
/// Surface samples returned by a flow evaluation: 300 (HF) or 100 (LF).
int sample_count(Fidelity f);

struct CpDistribution {
    Vector s;   // normalized arc length along the surface, TE upper = 0
    Vector cp;
};

/// Piecewise-linear re-interpolation of a computed distribution onto
/// target surface locations.
Vector interpolate_cp(const CpDistribution& computed, std::span<const double> target_locations);

/// Normalized cumulative arc length of a coordinate list.
Vector arc_parameter(const std::vector<Point>& coords);

struct FlowConditions {
    double reynolds = 5e7;
    double alpha_deg = 4.0;
    double mach = 0.0;
};

/// Flow solver stand-in: maps airfoil coordinates to a Cp distribution.
class CpSolver {
public:
    virtual ~CpSolver() = default;
    virtual CpDistribution run(const std::vector<Point>& coords, Fidelity fidelity) const = 0;
};

/// Deterministic stand-in flow solver for hermetic testing. Linearized
/// thin-airfoil pressure, Cp = -2 u, with u the sum of a thickness term, a
/// camber term and the incidence term alpha sqrt((1 - x) / (x + r)) that
/// changes sign between the surfaces; r is the leading-edge radius
/// estimated from the nose shape plus a floor. LF uses a larger floor and a
/// slightly weaker thickness term.
CpDistribution mock_cp(const std::vector<Point>& coords, Fidelity fidelity, double alpha_deg = 4.0);

class MockCpSolver : public CpSolver {
public:
    explicit MockCpSolver(FlowConditions flow = {}) : flow_(flow) {}
    CpDistribution run(const std::vector<Point>& coords, Fidelity fidelity) const override;

private:
    FlowConditions flow_;
};

/// Runs an external evaluator executable per call, speaking newline-delimited
/// JSON over its stdin/stdout.
class ProcessCpSolver : public CpSolver {
public:
    ProcessCpSolver(std::vector<std::string> argv, FlowConditions flow = {},
                    std::chrono::milliseconds timeout = std::chrono::seconds(60));
    CpDistribution run(const std::vector<Point>& coords, Fidelity fidelity) const override;

private:
    std::vector<std::string> argv_;
    FlowConditions flow_;
    std::chrono::milliseconds timeout_;
};

/// Wire format helpers for the evaluator protocol.
std::string encode_request(const std::vector<Point>& coords, Fidelity fidelity, const FlowConditions& flow);
CpDistribution decode_response(const std::string& line);
/// Serves one request line with the mock solver; returns the response line.
std::string serve_mock_request(const std::string& request_line);

/// Geometry + flow evaluation of a design at a fixed fidelity.
CpDistribution external_evaluate(const AirfoilDesign& design, Fidelity fidelity,
                                 const SplineBasis& basis, const CpSolver& solver);

/// HF objective evaluator for airfoil inverse design: returns the negated
/// Cp re-interpolated onto the target surface locations, so that the
/// minimum pressure coefficient becomes a maximum.
class NegatedCpEvaluator : public PerformanceEvaluator {
public:
    NegatedCpEvaluator(std::shared_ptr<const SplineBasis> basis, std::shared_ptr<const CpSolver> solver,
                       Fidelity fidelity, Vector target_locations);
    Vector evaluate(std::span<const double> x) const override;

private:
    std::shared_ptr<const SplineBasis> basis_;
    std::shared_ptr<const CpSolver> solver_;
    Fidelity fidelity_;
    Vector target_locations_;
};

}  // namespace mfid::airfoil
