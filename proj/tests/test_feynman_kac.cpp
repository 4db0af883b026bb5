#include "doctest.h"

#include <cmath>
#include <vector>

#include "harnack/feynman_kac.hpp"
#include "harnack/rng.hpp"

using namespace harnack;

namespace {

double kolmogorov(std::span<const double> p)
{
    return p[0] - p[1] * p[1] * p[1] / 6.0 + 10.0;
}

SimConfig config(std::size_t n, std::uint64_t seed, double dt = 1e-3)
{
    SimConfig c;
    c.n_paths = n;
    c.master_seed = seed;
    c.dt = dt;
    return c;
}

std::vector<Axis> box(const CylinderDomain& dom, double h)
{
    return {Axis::from_step(dom.x_lo, dom.x_hi, h),
            Axis::from_step(-dom.outer_radius, dom.outer_radius, h)};
}

} // namespace

TEST_CASE("unit payoff without potential")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    std::vector<double> start{0.2, -0.4};
    FKEstimate e = evaluate(op, dom, [](std::span<const double>) { return 1.0; }, start, 0.5,
                            config(5000, 1));
    CHECK(e.value == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.n_paths == 5000);
}

TEST_CASE("unit payoff with unit potential stays within the weight bounds")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "1", 3, dom);
    for (double t : {0.1, 0.5, 2.0})
    {
        std::vector<double> start{0.0, 0.5, 0.5};
        FKEstimate e = evaluate(op, dom, [](std::span<const double>) { return 1.0; }, start, t,
                                config(2000, 3));
        CHECK(e.value >= 1.0);
        CHECK(e.value <= std::exp(t));
    }
}

TEST_CASE("Kolmogorov polynomial at the origin")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    std::vector<double> start{0.0, 0.0};
    FKEstimate e = evaluate(op, dom, kolmogorov, start, 0.5, config(100000, 11));
    CHECK(std::abs(e.value - 10.0) <= 3.0 * e.std_error);
}

TEST_CASE("consistency over independent seeds")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    std::vector<double> start{0.4, 0.7};
    const double exact = kolmogorov(start);
    int hits = 0;
    for (std::uint64_t seed = 100; seed < 120; ++seed)
    {
        FKEstimate e = evaluate(op, dom, kolmogorov, start, 0.5, config(2000, seed));
        hits += std::abs(e.value - exact) <= 3.0 * e.std_error;
    }
    CHECK(hits >= 19);
}

TEST_CASE("monotone in the payoff")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("sin(y1)", "0.5*cos(x)", 2, dom);
    std::vector<double> start{0.1, 0.2};
    auto u1 = [](std::span<const double> p) { return 1.0 + p[1] * p[1]; };
    auto u2 = [](std::span<const double> p) { return 1.2 + p[1] * p[1] + 0.1 * std::sin(p[0]); };
    FKEstimate a = evaluate(op, dom, u1, start, 1.0, config(3000, 8));
    FKEstimate b = evaluate(op, dom, u2, start, 1.0, config(3000, 8));
    CHECK(a.value <= b.value);
}

TEST_CASE("standard error scales like one over sqrt(n)")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    std::vector<double> start{0.0, 0.5};
    FKEstimate a = evaluate(op, dom, kolmogorov, start, 0.5, config(4000, 21));
    FKEstimate b = evaluate(op, dom, kolmogorov, start, 0.5, config(16000, 22));
    CHECK(a.std_error / b.std_error == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("payoff failures name the stopped point")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    std::vector<double> start{0.0, 0.0};
    auto bad = [](std::span<const double> p) -> double {
        if (p[1] > 0.5)
        {
            throw DomainError("negative");
        }
        return 1.0;
    };
    CHECK_THROWS(evaluate(op, dom, bad, start, 1.0, config(200, 1)));
}

TEST_CASE("sandwich check on constants and the Kolmogorov field")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    ScalarField c = ScalarField::sample(box(dom, 0.25), [](std::span<const double>) { return 3.0; });
    std::vector<double> start{0.5, 0.0};
    SandwichVerdict v = sandwich_check(op, dom, c, start, 0.5, config(1000, 1));
    CHECK(v.pass);
    CHECK(v.expectation == doctest::Approx(3.0));
    CHECK(v.lower == doctest::Approx(3.0 * std::exp(-0.5)));
    CHECK(v.upper == doctest::Approx(3.0 * std::exp(0.5)));

    ScalarField k = ScalarField::sample(box(dom, 0.05), kolmogorov);
    CounterStream rng(2024, 0);
    for (int i = 0; i < 10; ++i)
    {
        double x = dom.x_lo_inner + (dom.x_hi_inner - dom.x_lo_inner) * rng.next_uniform();
        double y = dom.inner_radius * (2.0 * rng.next_uniform() - 1.0);
        std::vector<double> s{x, y};
        CHECK(sandwich_check(op, dom, k, s, 0.5, config(4000, i)).pass);
    }
}

TEST_CASE("sandwich check detects a corrupted field")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    std::vector<double> start{-3.0, 2.0};
    auto corrupted = [&](std::span<const double> p) {
        double r2 = (p[0] - start[0]) * (p[0] - start[0]) + (p[1] - start[1]) * (p[1] - start[1]);
        return kolmogorov(p) + 5.0 * std::exp(-r2 / (2.0 * 0.1 * 0.1));
    };
    ScalarField good = ScalarField::sample(box(dom, 0.05), kolmogorov);
    ScalarField bad = ScalarField::sample(box(dom, 0.05), corrupted);
    CHECK(sandwich_check(op, dom, good, start, 0.5, config(4000, 5)).pass);
    SandwichVerdict v = sandwich_check(op, dom, bad, start, 0.5, config(4000, 5));
    CHECK_FALSE(v.pass);
    CHECK(v.u_start > v.upper);
}

TEST_CASE("sandwich check requires a bounded potential")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "2", 2, dom);
    ScalarField c(box(dom, 0.5), 1.0);
    std::vector<double> start{0.5, 0.0};
    CHECK_THROWS_AS(sandwich_check(op, dom, c, start, 0.5, config(100, 1)),
                    std::invalid_argument);
    CHECK(default_sandwich_horizon(op) == doctest::Approx(1.0 / op.beta_sup));
}

TEST_CASE("manufactured solutions")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    const double h = 0.5;

    ManufacturedField one = make_solution(
        op, dom, [](std::span<const double>) { return 1.0; }, 2.0, config(200, 1, 5e-3), box(dom, h));
    for (std::size_t i = 0; i < one.value.size(); ++i)
    {
        CHECK(one.value[i] == 1.0);
    }

    ManufacturedField k = make_solution(op, dom, kolmogorov, 2.0, config(400, 2, 5e-3), box(dom, h));
    std::size_t within = 0;
    for (std::size_t i = 0; i < k.value.size(); ++i)
    {
        CHECK(k.value[i] > 0.0);
        within += std::abs(k.value[i] - kolmogorov(k.value.node(i))) <= 3.0 * k.std_error[i] + 1e-12;
    }
    CHECK(static_cast<double>(within) >= 0.9 * static_cast<double>(k.value.size()));

    // Determinism under the worker count.
    SimConfig par = config(400, 2, 5e-3);
    par.workers = 3;
    ManufacturedField kp = make_solution(op, dom, kolmogorov, 2.0, par, box(dom, h));
    for (std::size_t i = 0; i < k.value.size(); ++i)
    {
        CHECK(kp.value[i] == k.value[i]);
    }
}

TEST_CASE("manufactured solutions are consistent under x-shifts")
{
    CylinderDomain dom;
    OperatorSpec op = make_operator("y1", "0", 2, dom);
    const double h = 0.5;
    const double shift = 1.0;
    auto g = [](std::span<const double> p) { return 2.0 + std::sin(p[0]) + 0.2 * p[1]; };
    auto g_shifted = [&](std::span<const double> p) {
        std::vector<double> q(p.begin(), p.end());
        q[0] -= shift;
        return g(q);
    };
    ManufacturedField a = make_solution(op, dom, g, 1.0, config(300, 4, 5e-3), box(dom, h));
    ManufacturedField b = make_solution(op, dom, g_shifted, 1.0, config(300, 4, 5e-3), box(dom, h));
    const std::size_t k = static_cast<std::size_t>(std::lround(shift / h));
    const std::size_t sx = a.value.stride(0);
    for (std::size_t i = 0; i + k * sx < a.value.size(); ++i)
    {
        CHECK(std::abs(b.value[i + k * sx] - a.value[i]) <= 1e-12);
    }
}
