#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "mfid/optimizers.hpp"
#include "mfid/refine.hpp"

using namespace mfid;
using namespace mfid::refine;

namespace {

// 15 lower dims in [-0.24, 0], 15 upper dims in [0, 0.5]
Bounds aid_box()
{
    Vector lo(30), hi(30);
    for (int j = 0; j < 15; ++j) {
        lo[j] = -0.24;
        hi[j] = 0.0;
        lo[j + 15] = 0.0;
        hi[j + 15] = 0.5;
    }
    return Bounds(lo, hi);
}

Vector random_row(const Bounds& b, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(b.dim());
    for (std::size_t j = 0; j < x.size(); ++j)
        x[j] = b.lower[j] + u(rng) * (b.upper[j] - b.lower[j]);
    return x;
}

std::string temp(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("mfid_" + name)).string();
}

}  // namespace

TEST_CASE("collect_solutions: a single run")
{
    const Bounds b = Bounds::uniform(5, -1.0, 1.0);
    const Predictor p = [](std::span<const double> x) { return x[0] + 2.0 * x[1] - x[4]; };
    const SolutionMatrix s = collect_solutions(p, 0.5, b, 1, 11);
    REQUIRE(s.size() == 1);
    const auto direct = optimizers::refinement_inner_run(
        [&](std::span<const double> x) { return std::abs(p(x) - 0.5); }, b, split_seed(11, 0));
    CHECK(s[0] == direct.x_best);
    CHECK_THROWS_AS(collect_solutions(p, 0.5, b, 0, 1), std::invalid_argument);
}

TEST_CASE("collect_solutions: convex stub converges to one point")
{
    const Vector c{0.3, -0.2, 0.5, 0.0, 0.7};
    const Predictor p = [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            s += (x[j] - c[j]) * (x[j] - c[j]);
        return s;
    };
    const SolutionMatrix s = collect_solutions(p, 0.0, Bounds::uniform(5, -1.0, 1.0), 6, 2);
    for (const Vector& row : s)
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(row[j] == doctest::Approx(c[j]).epsilon(0.02));
}

TEST_CASE("collect_solutions: level-set stub gives distinct rows and no HF work")
{
    long calls = 0;
    const Predictor p = [&](std::span<const double> x) {
        ++calls;
        double s = 0.0;
        for (double v : x)
            s += v;
        return s / static_cast<double>(x.size());
    };
    const SolutionMatrix s = collect_solutions(p, 12.0, Bounds::uniform(20, 0.0, 30.0), 150, 0);
    CHECK(calls == 150L * optimizers::kInnerBudget);
    std::set<Vector> distinct(s.begin(), s.end());
    CHECK(distinct.size() == 150);
    for (const Vector& row : s)
        CHECK(std::abs(p(row) - 12.0) < 0.05);
}

TEST_CASE("collect_solutions: trained model dimension is checked")
{
    surrogate::MlpConfig c;
    c.widths = {4};
    c.dropout = {0.0};
    const auto m = surrogate::initialize(3, c, 1);
    TargetSpec t = TargetSpec::make({1.0}, Reduction::max);
    CHECK_THROWS_AS(collect_solutions(m, t, Bounds::uniform(4, 0, 1), 1, 1), std::invalid_argument);
}

TEST_CASE("aid_refine: identity average and eta arithmetic")
{
    const Bounds orig = aid_box();
    Vector r(30);
    for (int j = 0; j < 15; ++j) {
        r[j] = -0.01 * (j + 1);
        r[j + 15] = 0.02 * (j + 1);
    }
    const RefinedBounds a = aid_refine({r, r}, 1.0, orig);
    for (int j = 0; j < 15; ++j) {
        CHECK(a.bounds.lower[j] == doctest::Approx(r[j]));
        CHECK(a.bounds.upper[j] == 0.0);
        CHECK(a.bounds.lower[j + 15] == 0.0);
        CHECK(a.bounds.upper[j + 15] == doctest::Approx(r[j + 15]));
    }
    CHECK(a.strategy == "aid_average");
    CHECK(a.solutions == 2);

    Vector x(30, 0.0);
    x[3] = -0.20;
    x[20] = 0.10;
    const RefinedBounds e = aid_refine({x}, 1.3, orig);
    CHECK(e.bounds.upper[20] == doctest::Approx(0.13));
    CHECK(e.bounds.lower[3] == -0.24);  // -0.26 clamped to the original
    CHECK(e.bounds.nested_in(orig));
}

TEST_CASE("aid_refine: zero averages are widened slightly")
{
    const RefinedBounds z = aid_refine({Vector(30, 0.0)}, 1.0, aid_box());
    for (int j = 0; j < 15; ++j) {
        CHECK(z.bounds.lower[j] == doctest::Approx(-kDegenerateWidth));
        CHECK(z.bounds.upper[j + 15] == doctest::Approx(kDegenerateWidth));
    }
    CHECK(z.bounds.nested_in(aid_box()));
}

TEST_CASE("aid_refine: nested in originals and monotone in eta")
{
    const Bounds orig = aid_box();
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        SolutionMatrix s;
        for (int i = 0; i < 1 + trial % 7; ++i)
            s.push_back(random_row(orig, rng));
        Bounds prev;
        for (double eta : {1.0, 1.1, 1.2, 1.3, 2.0}) {
            const RefinedBounds r = aid_refine(s, eta, orig);
            CHECK(r.bounds.nested_in(orig));
            for (std::size_t j = 0; j < 30; ++j)
                CHECK(r.bounds.lower[j] <= r.bounds.upper[j]);
            if (!prev.lower.empty())
                CHECK(prev.nested_in(r.bounds));
            CHECK(r.pruning_fraction == doctest::Approx(r.bounds.pruning_fraction(orig)));
            prev = r.bounds;
        }
    }
    CHECK_THROWS_AS(aid_refine({}, 1.0, orig), std::invalid_argument);
    CHECK_THROWS_AS(aid_refine({Vector(30, 0.0)}, 1.0, Bounds::uniform(20, 0, 1)), std::invalid_argument);
}

TEST_CASE("polyfit recovers exact polynomials")
{
    const Vector x = linspace(0.0, 1.0, 20);
    const Vector c{1.5, -2.0, 0.25, 3.0, -1.0};
    for (int d = 0; d <= 4; ++d) {
        Vector y(20);
        for (int i = 0; i < 20; ++i) {
            double v = 0.0;
            for (int k = 0; k <= d; ++k)
                v += c[k] * std::pow(x[i], k);
            y[i] = v;
        }
        const Vector fit = polyfit(x, y, d);
        REQUIRE(fit.size() == static_cast<std::size_t>(d + 1));
        for (int k = 0; k <= d; ++k)
            CHECK(fit[k] == doctest::Approx(c[k]).epsilon(1e-9));
        CHECK(polyval(fit, 0.37) == doctest::Approx(polyval(Vector(c.begin(), c.begin() + d + 1), 0.37)));
    }
    // least squares line through noisy symmetric points
    const Vector px{0.0, 1.0, 2.0}, py{0.0, 2.0, 1.0};
    const Vector line = polyfit(px, py, 1);
    CHECK(line[1] == doctest::Approx(0.5));
    CHECK(line[0] == doctest::Approx(0.5));
    CHECK_THROWS(polyfit(Vector{0.0, 0.0, 0.0}, Vector{1.0, 2.0, 3.0}, 2));
}

TEST_CASE("sfr_refine: constant and ramp rows")
{
    const RefinedBounds c = sfr_refine({Vector(20, 10.0), Vector(20, 10.0)});
    REQUIRE(c.bounds.dim() == 80);
    for (std::size_t j = 0; j < 80; ++j) {
        CHECK(c.bounds.lower[j] == 0.0);
        CHECK(c.bounds.upper[j] == doctest::Approx(10.0).epsilon(1e-12));
    }
    CHECK(c.pruning_fraction == doctest::Approx(1.0 - 10.0 / 30.0));
    CHECK(c.degrees == std::vector<int>{1, 2, 3, 4});

    const RefinedBounds r = sfr_refine({linspace(0.0, 20.0, 20)});
    CHECK(r.bounds.upper[0] == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(r.strategy == "sfr_polyfit");

    const RefinedBounds capped = sfr_refine({Vector(20, 45.0)});
    CHECK(capped.bounds.upper[7] == 30.0);
    CHECK(capped.pruning_fraction == doctest::Approx(0.0));
}

TEST_CASE("sfr_refine: fits overshoot the raw maximum for curved rows")
{
    // a hump sampled on 20 points; the degree-2 fit peaks between samples
    Vector row(20);
    const Vector x = linspace(0.0, 1.0, 20);
    for (int i = 0; i < 20; ++i)
        row[i] = 12.0 - 40.0 * (x[i] - 0.51) * (x[i] - 0.51);
    const RefinedBounds r = sfr_refine({row}, {2});
    CHECK(r.bounds.upper[0] == doctest::Approx(12.0).epsilon(1e-3));
    CHECK(r.bounds.upper[0] >= *std::max_element(row.begin(), row.end()));
}

TEST_CASE("sfr_refine: row order does not matter")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    SolutionMatrix s(30, Vector(20));
    for (Vector& row : s)
        for (double& v : row)
            v = u(rng);
    const double ub = sfr_refine(s).bounds.upper[0];
    for (int k = 0; k < 5; ++k) {
        std::shuffle(s.begin(), s.end(), rng);
        CHECK(sfr_refine(s).bounds.upper[0] == ub);
    }
    CHECK_THROWS_AS(sfr_refine({}), std::invalid_argument);
}

TEST_CASE("refined bounds JSON and solution files round trip")
{
    const Bounds orig = aid_box();
    std::mt19937_64 rng(1);
    SolutionMatrix s{random_row(orig, rng), random_row(orig, rng), random_row(orig, rng)};
    const RefinedBounds r = aid_refine(s, 1.2, orig);
    const std::string path = temp("refined.json");
    save_refined(r, orig, path);
    const RefinedBounds back = load_refined(path);
    CHECK(back.bounds.lower == r.bounds.lower);
    CHECK(back.bounds.upper == r.bounds.upper);
    CHECK(back.eta == 1.2);
    CHECK(back.solutions == 3);
    CHECK(back.strategy == "aid_average");
    CHECK(back.pruning_fraction == r.pruning_fraction);

    const RefinedBounds q = sfr_refine({Vector(20, 5.0)}, {1, 3});
    save_refined(q, Bounds::uniform(80, 0, 30), path);
    CHECK(load_refined(path).degrees == std::vector<int>{1, 3});

    const std::string spath = temp("solutions.csv");
    save_solutions(s, spath);
    CHECK(load_solutions(spath) == s);
    std::filesystem::remove(path);
    std::filesystem::remove(spath);
}

TEST_CASE("convergence study statistics")
{
    const SolutionMatrix s{{1.0, 3.0}, {3.0, 5.0}, {5.0, 7.0}, {7.0, 9.0}};
    const auto e = convergence_study(s, {2, 4, 10}, sfr_mean_summary());
    REQUIRE(e.size() == 2);
    // row means 2, 4, 6, 8
    CHECK(e[0].n == 2);
    CHECK(e[0].mean[0] == doctest::Approx(3.0));
    CHECK(e[0].std[0] == doctest::Approx(1.0));
    CHECK(e[1].mean[0] == doctest::Approx(5.0));
    CHECK(e[1].std[0] == doctest::Approx(std::sqrt(5.0)));
    const std::string j = convergence_json(e, "s_bar");
    CHECK(j.find("\"s_bar\"") != std::string::npos);

    airfoil::SplineBasis basis;
    const Vector design = airfoil::fit_baseline(basis).coefficients.to_vector();
    const auto a = convergence_study({design, design}, {2}, aid_zeta_summary(basis, 25));
    REQUIRE(a.size() == 1);
    CHECK(a[0].mean.size() == 50);
    for (double sd : a[0].std)
        CHECK(sd == doctest::Approx(0.0));
}
