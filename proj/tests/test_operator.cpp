#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "harnack/operator.hpp"

using namespace harnack;

namespace {

// Brute-force min over the lattice of |sin y1| + |cos y1| on the closed ball.
double sin_mass_minimum(double radius, double step)
{
    double best = INFINITY;
    for (const auto& y : ball_lattice(2, radius, step, true))
    {
        best = std::min(best, std::abs(std::sin(y[0])) + std::abs(std::cos(y[0])));
    }
    return best;
}

std::set<std::vector<double>> as_set(const std::vector<std::vector<double>>& pts)
{
    return {pts.begin(), pts.end()};
}

} // namespace

TEST_CASE("domain validation")
{
    CylinderDomain dom;
    CHECK_NOTHROW(dom.validate());
    dom.x_lo_inner = 7.0;
    CHECK_THROWS_AS(dom.validate(), std::invalid_argument);
    dom = {};
    dom.inner_radius = 4.0;
    CHECK_THROWS_AS(dom.validate(), std::invalid_argument);
}

TEST_CASE("operator construction")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    CHECK(op.y_dim() == 1);
    CHECK(op.beta_grid_max == doctest::Approx(3.0));
    CHECK(op.beta_sup >= op.beta_grid_max);
    CHECK(op.beta_sup == doctest::Approx(3.0 * sup_safety_factor));
    CHECK(op.gamma_sup == 0.0);

    CHECK_THROWS_AS(make_operator("y1", "0", 1, dom), std::invalid_argument);
    CHECK_THROWS_AS(make_operator("x", "0", 2, dom), UnknownIdentifierError);
    OperatorSpec g = make_operator("sin(y1)", "0.5*cos(x)", 3, dom);
    CHECK(g.gamma_sup >= g.gamma_grid_max);
    CHECK(g.gamma_grid_max == doctest::Approx(0.5));
}

TEST_CASE("ball lattice")
{
    auto open = ball_lattice(1, 1.0, 0.5, false);
    CHECK(open == std::vector<std::vector<double>>{{-0.5}, {0.0}, {0.5}});
    auto closed = ball_lattice(1, 1.0, 0.5, true);
    CHECK(closed.size() == 5);
    for (const auto& p : ball_lattice(2, 1.0, 0.1, false))
    {
        CHECK(std::hypot(p[0], p[1]) < 1.0);
    }
}

TEST_CASE("hypothesis check: beta = y passes at r = 1")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    HormanderReport rep = check_hypothesis(op, dom, 1, 0.05);
    CHECK(rep.pass);
    CHECK(rep.sign_change_ok);
    CHECK(rep.witness_minus == std::vector<double>{-3.0});
    CHECK(rep.witness_plus == std::vector<double>{3.0});
    CHECK(rep.min_derivative_mass == doctest::Approx(1.0));
    CHECK(rep.min_mass_location == std::vector<double>{0.0});
    CHECK(rep.smallest_passing_r == 1);
    CHECK(rep.tolerance == 1e-12);
}

TEST_CASE("hypothesis check: beta = y^2 fails the sign change")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1^2", "0", 2, dom);
    HormanderReport rep = check_hypothesis(op, dom, 2, 0.05);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.sign_change_ok);
    CHECK(rep.beta_min == 0.0);
    CHECK(to_json(rep).find("\"sign_change_ok\": false") != std::string::npos);
}

TEST_CASE("hypothesis check: beta = sin y1 in three dimensions")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("sin(y1)", "0", 3, dom);
    HormanderReport rep = check_hypothesis(op, dom, 1, 0.05);
    CHECK(rep.pass);
    CHECK(rep.sign_change_ok);
    CHECK(rep.min_derivative_mass == doctest::Approx(sin_mass_minimum(3.0, 0.05)).epsilon(1e-12));
    CHECK(rep.min_derivative_mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("hypothesis check: r = 0 needs beta itself nonzero")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    HormanderReport rep = check_hypothesis(op, dom, 0, 0.05);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_derivative_mass == 0.0);
    CHECK(rep.smallest_passing_r == 1);
}

TEST_CASE("hypothesis check: domain errors are reported with a location")
{
    CylinderDomain dom;
    OperatorSpec op{parse("y1 + 0*sqrt(y1 + 2)", {"y1"}), parse("0", {"x", "y1"}), 2};
    HormanderReport rep = check_hypothesis(op, dom, 1, 0.05);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.error.empty());
    REQUIRE(rep.error_location.size() == 1);
    CHECK(rep.error_location[0] < -2.0);
}

TEST_CASE("hypothesis verdict is stable under grid refinement")
{
    CylinderDomain dom;
    for (const char* beta : {"y1", "y1^2", "sin(y1)", "y1^3 - y1", "1"})
    {
        OperatorSpec op = make_operator(beta, "0", 2, dom);
        CHECK(check_hypothesis(op, dom, 2, 0.1).pass == check_hypothesis(op, dom, 2, 0.05).pass);
    }
    OperatorSpec op3 = make_operator("sin(y1)", "0", 3, dom);
    CHECK(check_hypothesis(op3, dom, 2, 0.2).pass == check_hypothesis(op3, dom, 2, 0.1).pass);
}

TEST_CASE("region classification")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    RegionSet r = classify_regions(op, dom, 0.5, 0.05);
    CHECK(r.both_nonempty());
    CHECK(r.warnings.empty());
    for (const auto& p : r.plus_points)
    {
        CHECK(p[0] > 0.5);
        CHECK(p[0] < 1.0);
    }
    for (const auto& p : r.minus_points)
    {
        CHECK(p[0] < -0.5);
        CHECK(p[0] > -1.0);
    }
    CHECK(r.plus_points.size() == 9);
    CHECK(r.minus_points.size() == 9);

    RegionSet empty = classify_regions(op, dom, 2.0, 0.05);
    CHECK(empty.plus_points.empty());
    CHECK(empty.minus_points.empty());
    CHECK_FALSE(empty.warnings.empty());

    OperatorSpec s = make_operator("sin(y1)", "0", 3, dom);
    RegionSet rs = classify_regions(s, dom, 0.8, 0.05);
    CHECK_FALSE(rs.plus_points.empty());
    CHECK_FALSE(rs.minus_points.empty());
    RegionSet high = classify_regions(s, dom, 0.9, 0.05);
    CHECK(high.plus_points.empty());
    CHECK(high.minus_points.empty());
    CHECK_FALSE(high.warnings.empty());
}

TEST_CASE("regions shrink as d grows")
{
    CylinderDomain dom;
    for (const char* beta : {"y1", "sin(y1)", "y1^3 - 0.2"})
    {
        OperatorSpec op = make_operator(beta, "0", 2, dom);
        for (double d1 : {0.05, 0.1, 0.3})
        {
            for (double d2 : {0.35, 0.5, 0.7})
            {
                RegionSet a = classify_regions(op, dom, d1, 0.05);
                RegionSet b = classify_regions(op, dom, d2, 0.05);
                auto ap = as_set(a.plus_points);
                auto am = as_set(a.minus_points);
                for (const auto& p : b.plus_points)
                {
                    CHECK(ap.count(p) == 1);
                }
                for (const auto& p : b.minus_points)
                {
                    CHECK(am.count(p) == 1);
                }
            }
        }
    }
}

TEST_CASE("residual of constants and exact polynomial solutions")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    std::vector<Axis> axes{Axis::from_step(-5.0, 6.0, 0.1), Axis::from_step(-3.0, 3.0, 0.1)};

    ScalarField one(axes, 1.0);
    ScalarField r1 = residual(one, op);
    CHECK(max_abs(r1) == 0.0);

    for (double h : {0.5, 0.2, 0.1, 0.05})
    {
        std::vector<Axis> g{Axis::from_step(-5.0, 6.0, h), Axis::from_step(-3.0, 3.0, h)};
        ScalarField u = ScalarField::sample(
            g, [](std::span<const double> p) { return p[0] - p[1] * p[1] * p[1] / 6.0 + 10.0; });
        CHECK(max_abs(residual(u, op)) <= 1e-9);
    }
}

TEST_CASE("residual converges at second order")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("1", "0", 2, dom);
    auto u = [](std::span<const double> p) { return std::exp(-4.0 * p[0]) * std::cosh(2.0 * p[1]); };
    auto err = [&](double h) {
        std::vector<Axis> g{Axis::from_step(0.0, 1.0, h), Axis::from_step(-1.0, 1.0, h)};
        return max_abs(residual(ScalarField::sample(g, u), op));
    };
    const double e1 = err(0.05);
    const double e2 = err(0.025);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("residual includes the zeroth-order term")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("0", "2", 3, dom);
    std::vector<Axis> g{Axis::from_step(0.0, 1.0, 0.25), Axis::from_step(-1.0, 1.0, 0.25),
                        Axis::from_step(-1.0, 1.0, 0.25)};
    ScalarField u(g, 1.5);
    ScalarField r = residual(u, op);
    std::vector<std::size_t> inner{1, 1, 1};
    CHECK(r[r.flat_index(inner)] == doctest::Approx(3.0));
    std::vector<std::size_t> edge{0, 1, 1};
    CHECK(std::isnan(r[r.flat_index(edge)]));
}
