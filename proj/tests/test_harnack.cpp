#include "doctest.h"

#include <cmath>
#include <vector>

#include "harnack/harnack.hpp"

using namespace harnack;

namespace {

double kolmogorov10(std::span<const double> p)
{
    return p[0] - p[1] * p[1] * p[1] / 6.0 + 10.0;
}

} // namespace

TEST_CASE("constant solutions have ratio one")
{
    Subcylinder sub;
    HarnackReport r = sup_inf_ratio(constant_solution(7.0), sub, GridSpec{});
    CHECK(r.ratio == 1.0);
    CHECK(r.sup == 7.0);
    CHECK(r.argmax == std::vector<double>{0.0, -1.0});
    CHECK(r.argmin == r.argmax);

    FamilyScan scan = scan_family(
        {constant_solution(1.0), constant_solution(5.0), constant_solution(100.0)}, sub, GridSpec{});
    CHECK(scan.max_ratio == 1.0);
    CHECK(scan.reports.size() == 3);
}

TEST_CASE("closed-form extremes of the Kolmogorov polynomial")
{
    Subcylinder sub;
    HarnackReport r = sup_inf_ratio(kolmogorov_poly(10.0), sub, GridSpec{});
    CHECK(r.sup == doctest::Approx(11.0 + 1.0 / 6.0).epsilon(1e-14));
    CHECK(r.inf == doctest::Approx(10.0 - 1.0 / 6.0).epsilon(1e-14));
    CHECK(r.argmax == std::vector<double>{1.0, -1.0});
    CHECK(r.argmin == std::vector<double>{0.0, 1.0});
    CHECK(r.ratio == doctest::Approx((11.0 + 1.0 / 6.0) / (10.0 - 1.0 / 6.0)).epsilon(1e-14));
    CHECK(r.ratio == doctest::Approx(1.1356).epsilon(1e-4));
}

TEST_CASE("Kolmogorov family ratios decrease in C")
{
    Subcylinder sub;
    CylinderDomain validity = validity_domain(sub);
    std::vector<AnalyticSolution> family;
    for (double c : {2.0, 5.0, 10.0, 100.0})
    {
        family.push_back(kolmogorov_poly(c, validity));
    }
    FamilyScan scan = scan_family(family, sub, GridSpec{});
    for (std::size_t i = 1; i < scan.reports.size(); ++i)
    {
        CHECK(scan.reports[i].ratio < scan.reports[i - 1].ratio);
    }
    CHECK(scan.argmax == 0);
    CHECK(scan.max_ratio == doctest::Approx(19.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("counterexample ratios follow the closed form")
{
    Subcylinder sub;
    HarnackReport r = sup_inf_ratio(counterexample_family(4.0), sub, GridSpec{});
    CHECK(r.sup == doctest::Approx(std::cosh(2.0)));
    CHECK(r.inf == doctest::Approx(std::exp(-4.0)));
    CHECK(r.argmin == std::vector<double>{1.0, 0.0});

    CounterexampleScan scan = counterexample_scan({1.0, 2.0, 4.0, 8.0}, sub, GridSpec{});
    for (std::size_t i = 0; i < 4; ++i)
    {
        const double lambda = scan.lambdas[i];
        CHECK(std::abs(scan.reports[i].ratio - std::exp(lambda) * std::cosh(std::sqrt(lambda)))
              <= 1e-6);
        CHECK(scan.closed_form[i] == counterexample_ratio(lambda));
    }
    CHECK(scan.verdict == Verdict::Divergent);
    CHECK(std::string(to_string(scan.verdict)) == "divergent");

    CounterexampleScan one = counterexample_scan({0.01}, sub, GridSpec{});
    CHECK(one.verdict == Verdict::NoVerdict);
    CHECK(one.reports[0].ratio == doctest::Approx(1.015105).epsilon(1e-6));
    CHECK(std::string(to_string(one.verdict)) == "no verdict");

    CHECK_THROWS_AS(counterexample_scan({}, sub, GridSpec{}), std::invalid_argument);
}

TEST_CASE("ratio properties")
{
    Subcylinder sub;
    GridSpec grid{0.05, 0.05};
    auto u = [](std::span<const double> p) {
        return 2.0 + std::sin(3.0 * p[0]) * std::cos(p[1]);
    };
    HarnackReport base = sup_inf_ratio(u, 2, sub, grid);
    CHECK(base.ratio > 1.0);

    auto scaled = [&](std::span<const double> p) { return 4.0 * u(p); };
    CHECK(sup_inf_ratio(scaled, 2, sub, grid).ratio == base.ratio);
    auto odd = [&](std::span<const double> p) { return 3.3 * u(p); };
    CHECK(sup_inf_ratio(odd, 2, sub, grid).ratio == doctest::Approx(base.ratio).epsilon(1e-14));

    const double s = 0.75;
    auto shifted = [&](std::span<const double> p) {
        std::vector<double> q(p.begin(), p.end());
        q[0] -= s;
        return u(q);
    };
    Subcylinder moved{sub.x_lo + s, sub.x_hi + s, sub.radius};
    CHECK(sup_inf_ratio(shifted, 2, moved, grid).ratio
          == doctest::Approx(base.ratio).epsilon(1e-12));

    Subcylinder small{0.0, 1.0, 0.5};
    auto bump = [](std::span<const double> p) { return p[1] * p[1] * p[1]; };
    try
    {
        sup_inf_ratio(bump, 2, small, grid);
        FAIL("expected a positivity error");
    }
    catch (const PositivityError& e)
    {
        CHECK(e.location() == std::vector<double>{0.0, -0.5});
    }
}

TEST_CASE("three-dimensional subcylinders use the closed ball")
{
    Subcylinder sub;
    auto u = [](std::span<const double> p) { return 3.0 + p[1] + 0.1 * p[2] * p[2]; };
    HarnackReport r = sup_inf_ratio(u, 3, sub, GridSpec{0.25, 0.25});
    CHECK(r.sup == doctest::Approx(4.0));
    CHECK(r.argmax == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(r.inf == doctest::Approx(2.0));
    CHECK(r.argmin == std::vector<double>{0.0, -1.0, 0.0});
}

TEST_CASE("field ratios")
{
    Subcylinder sub;
    std::vector<Axis> axes{Axis{-0.5, 1.5, 41}, Axis{-2.0, 2.0, 81}};
    ScalarField f = ScalarField::sample(axes, kolmogorov10);
    HarnackReport r = sup_inf_ratio(f, sub, "k");
    CHECK(r.ratio == doctest::Approx((11.0 + 1.0 / 6.0) / (10.0 - 1.0 / 6.0)).epsilon(1e-14));
    FamilyScan scan = scan_family({f, ScalarField(axes, 2.0)}, {"k", "c"}, sub);
    CHECK(scan.argmax == 0);
    CHECK(scan.reports[1].ratio == 1.0);
}

TEST_CASE("shipped family extrema stabilise under refinement")
{
    Subcylinder sub;
    auto family = shipped_analytic_family(sub);
    FamilyScan coarse = scan_family(family, sub, GridSpec{0.05, 0.05});
    FamilyScan fine = scan_family(family, sub, GridSpec{0.025, 0.025});
    CHECK(fine.max_ratio <= 1.05 * coarse.max_ratio);
    CHECK(fine.max_ratio >= coarse.max_ratio);
    for (const auto& r : fine.reports)
    {
        CHECK(r.ratio >= 1.0);
        CHECK(std::isfinite(r.ratio));
    }
}

TEST_CASE("manufactured family is positive and reproducible")
{
    CylinderDomain dom;
    Subcylinder sub;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    SimConfig cfg;
    cfg.n_paths = 64;
    cfg.dt = 5e-3;
    cfg.master_seed = 7;
    auto a = manufactured_family(op, dom, sub, 3, 1.0, cfg, GridSpec{0.5, 0.5});
    cfg.workers = 2;
    auto b = manufactured_family(op, dom, sub, 3, 1.0, cfg, GridSpec{0.5, 0.5});
    REQUIRE(a.size() == 3);
    for (std::size_t k = 0; k < a.size(); ++k)
    {
        for (std::size_t i = 0; i < a[k].size(); ++i)
        {
            CHECK(a[k][i] > 0.0);
            CHECK(a[k][i] == b[k][i]);
        }
    }
    FamilyScan scan = scan_family(a, {"a", "b", "c"}, sub);
    CHECK(std::isfinite(scan.max_ratio));
    CHECK(scan.max_ratio >= 1.0);

    auto g0 = random_positive_data(1, 0);
    auto g1 = random_positive_data(1, 1);
    std::vector<double> p{0.3, 0.2};
    CHECK(g0(p) > 0.0);
    CHECK(g0(p) != g1(p));
    CHECK(random_positive_data(1, 0)(p) == g0(p));
}

TEST_CASE("sign-region inequality")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    GridSpec grid{0.05, 0.05};

    RegionCheck one = region_inequality_check([](std::span<const double>) { return 1.0; }, op, dom,
                                              0.5, grid, 10.0);
    CHECK(one.ratio == 1.0);
    CHECK(one.within_cap);

    RegionCheck k = region_inequality_check(kolmogorov10, op, dom, 0.5, grid, 10.0);
    const double y = 0.95;
    CHECK(k.sup_on_regions == doctest::Approx(11.0 + y * y * y / 6.0).epsilon(1e-14));
    CHECK(k.inf_on_inner_ball == doctest::Approx(10.0 - y * y * y / 6.0).epsilon(1e-14));
    CHECK(k.ratio == doctest::Approx((11.0 + y * y * y / 6.0) / (10.0 - y * y * y / 6.0)));
    CHECK(k.plus_points == 9);
    CHECK(k.minus_points == 9);

    OperatorSpec flat = make_operator("1", "0", 2, dom);
    CHECK_THROWS_AS(region_inequality_check(kolmogorov10, flat, dom, 0.5, grid, 10.0),
                    std::domain_error);
}

TEST_CASE("x-window averages")
{
    std::vector<Axis> axes{Axis::from_step(-1.0, 2.0, 0.05), Axis::from_step(-1.0, 1.0, 0.05)};
    const double z = 1.0 / 3.0;

    ScalarField c(axes, 3.0);
    ScalarField vc = window_average_x(c, z);
    for (std::size_t i = 0; i < vc.size(); ++i)
    {
        CHECK(vc[i] == doctest::Approx(2.0 * z * 3.0).epsilon(1e-14));
    }

    ScalarField lin = ScalarField::sample(axes, [](std::span<const double> p) { return p[0]; });
    ScalarField vl = window_average_x(lin, 0.2);
    for (std::size_t i = 0; i < vl.size(); ++i)
    {
        CHECK(std::abs(vl[i] - 0.4 * vl.node(i)[0]) <= 1e-12);
    }

    ScalarField k = ScalarField::sample(axes, kolmogorov10);
    ScalarField vk = window_average_x(k, z);
    CHECK(vk.axes()[0].lo >= -1.0 + z - 1e-12);
    CHECK(vk.axes()[0].hi <= 2.0 - z + 1e-12);
    for (std::size_t i = 0; i < vk.size(); ++i)
    {
        auto p = vk.node(i);
        double exact = 2.0 * z * (p[0] + 10.0) - 2.0 * z * p[1] * p[1] * p[1] / 6.0;
        CHECK(std::abs(vk[i] - exact) <= 1e-9);
    }

    CHECK_THROWS_AS(window_average_x(k, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(window_average_x(k, 0.0), std::invalid_argument);
}
