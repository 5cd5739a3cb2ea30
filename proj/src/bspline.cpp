#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfid/airfoil.hpp"

namespace mfid::airfoil {

namespace {

double safe_ratio(double num, double den)
{
    return den == 0.0 ? 0.0 : num / den;
}

// Basis tables N_q for q = 0..p at u; table[q] has knots.size() - q - 1 entries.
std::vector<Vector> basis_table(const std::vector<double>& t, int p, double u)
{
    const int m = static_cast<int>(t.size());
    std::vector<Vector> table(static_cast<std::size_t>(p) + 1);
    Vector& n0 = table[0];
    n0.assign(static_cast<std::size_t>(m - 1), 0.0);
    if (u >= t.back()) {
        // right end belongs to the last non-degenerate span
        for (int i = m - 2; i >= 0; --i)
            if (t[i] < t[i + 1]) {
                n0[i] = 1.0;
                break;
            }
    } else {
        for (int i = 0; i < m - 1; ++i)
            if (t[i] <= u && u < t[i + 1]) {
                n0[i] = 1.0;
                break;
            }
    }
    for (int q = 1; q <= p; ++q) {
        const Vector& prev = table[q - 1];
        Vector& cur = table[q];
        cur.assign(static_cast<std::size_t>(m - q - 1), 0.0);
        for (int i = 0; i < m - q - 1; ++i) {
            cur[i] = safe_ratio(u - t[i], t[i + q] - t[i]) * prev[i] +
                     safe_ratio(t[i + q + 1] - u, t[i + q + 1] - t[i + 1]) * prev[i + 1];
        }
    }
    return table;
}

// Derivative of the degree-q basis from the degree-(q-1) functions `lower`.
Vector derive(const std::vector<double>& t, int q, const Vector& lower)
{
    const std::size_t n = lower.size() - 1;
    Vector d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = q * (safe_ratio(lower[i], t[i + q] - t[i]) -
                    safe_ratio(lower[i + 1], t[i + q + 1] - t[i + 1]));
    return d;
}

}  // namespace

SplineBasis::SplineBasis(int degree, int n_coefficients) : degree_(degree), n_coef_(n_coefficients)
{
    if (degree < 1 || n_coefficients < degree + 1)
        throw std::invalid_argument("SplineBasis: need n_coefficients > degree >= 1");
    const int interior = n_coefficients - degree - 1;
    knots_.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    for (int k = 1; k <= interior; ++k)
        knots_.push_back(static_cast<double>(k) / (interior + 1));
    knots_.insert(knots_.end(), static_cast<std::size_t>(degree) + 1, 1.0);
}

Vector SplineBasis::values(double u) const
{
    return basis_table(knots_, degree_, std::clamp(u, 0.0, 1.0))[static_cast<std::size_t>(degree_)];
}

Vector SplineBasis::second_derivatives(double u) const
{
    if (degree_ < 2)
        return Vector(static_cast<std::size_t>(n_coef_), 0.0);
    const auto table = basis_table(knots_, degree_, std::clamp(u, 0.0, 1.0));
    const Vector d1 = derive(knots_, degree_ - 1, table[static_cast<std::size_t>(degree_ - 2)]);
    return derive(knots_, degree_, d1);
}

double SplineBasis::evaluate(std::span<const double> coefficients, double u) const
{
    if (coefficients.size() != static_cast<std::size_t>(n_coef_))
        throw std::invalid_argument("SplineBasis::evaluate: coefficient count mismatch");
    const Vector b = values(u);
    double y = 0.0;
    for (int i = 0; i < n_coef_; ++i)
        y += coefficients[i] * b[i];
    return y;
}

}  // namespace mfid::airfoil
