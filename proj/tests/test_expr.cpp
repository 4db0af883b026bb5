#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "harnack/expr.hpp"

using namespace harnack;

namespace {

double eval_at(const Expr& e, std::vector<double> p)
{
    return e.eval(p);
}

// Random polynomial source text over y1, y2 built from +, -, * and small integer powers.
std::string random_polynomial(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_int_distribution<int> coef(-4, 4);
    int k = depth <= 0 ? pick(rng) % 2 : pick(rng);
    switch (k)
    {
    case 0:
        return std::to_string(coef(rng));
    case 1:
        return (rng() & 1) ? "y1" : "y2";
    case 2:
        return "(" + random_polynomial(rng, depth - 1) + " + " + random_polynomial(rng, depth - 1)
               + ")";
    case 3:
        return "(" + random_polynomial(rng, depth - 1) + " - " + random_polynomial(rng, depth - 1)
               + ")";
    case 4:
        return "(" + random_polynomial(rng, depth - 1) + " * " + random_polynomial(rng, depth - 1)
               + ")";
    default:
        return "(" + random_polynomial(rng, depth - 1) + ")^" + std::to_string(2 + rng() % 2);
    }
}

// Small expressions that exercise every simplification identity.
std::string random_small(std::mt19937_64& rng, int depth)
{
    static const char* leaves[] = {"0", "1", "2", "y1", "y2", "x", "pi"};
    static const char* unary[] = {"sin", "cos", "exp", "-"};
    static const char* binary[] = {"+", "-", "*", "^"};
    if (depth <= 0 || rng() % 4 == 0)
    {
        return leaves[rng() % 7];
    }
    if (rng() % 3 == 0)
    {
        const char* f = unary[rng() % 4];
        if (f[0] == '-')
        {
            return "(-" + random_small(rng, depth - 1) + ")";
        }
        return std::string(f) + "(" + random_small(rng, depth - 1) + ")";
    }
    const char* op = binary[rng() % 4];
    if (op[0] == '^')
    {
        return "(" + random_small(rng, depth - 1) + ")^" + std::to_string(rng() % 3);
    }
    return "(" + random_small(rng, depth - 1) + " " + op + " " + random_small(rng, depth - 1) + ")";
}

} // namespace

TEST_CASE("parse and evaluate")
{
    Expr e = parse("y1^2 - 1", {"y1"});
    CHECK(eval_at(e, {2.0}) == 3.0);

    Expr s = parse("sin(y1)*y2", {"y1", "y2"});
    CHECK(eval_at(s, {std::numbers::pi / 2, 2.0}) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK(eval_at(parse("2 + 3 * 4 ^ 2 / 8", {}), {}) == 8.0);
    CHECK(eval_at(parse("-2^2", {}), {}) == -4.0);
    CHECK(eval_at(parse("2^3^2", {}), {}) == 512.0);
    CHECK(eval_at(parse("cosh(0) + sinh(0) + sqrt(4) + exp(0)", {}), {}) == 4.0);
    CHECK(eval_at(parse("e", {}), {}) == doctest::Approx(std::numbers::e));
}

TEST_CASE("undeclared identifiers are rejected")
{
    try
    {
        parse("y3 + 1", {"y1", "y2"});
        FAIL("expected an error");
    }
    catch (const UnknownIdentifierError& err)
    {
        CHECK(err.name() == "y3");
        CHECK(err.position() == 0);
    }
    CHECK_THROWS_AS(parse("foo(y1)", {"y1"}), ParseError);
    CHECK_THROWS_AS(parse("(y1 + 1", {"y1"}), ParseError);
    CHECK_THROWS_AS(parse("y1 +", {"y1"}), ParseError);
    CHECK_THROWS_AS(parse("", {"y1"}), ParseError);
    CHECK_THROWS_AS(parse("y1 y1", {"y1"}), ParseError);
}

TEST_CASE("domain errors")
{
    CHECK_THROWS_AS(eval_at(parse("sqrt(y1)", {"y1"}), {-1.0}), DomainError);
    CHECK_THROWS_AS(eval_at(parse("1 / y1", {"y1"}), {0.0}), DomainError);
    CHECK_THROWS_AS(eval_at(parse("y1^0.5", {"y1"}), {-2.0}), DomainError);
    CHECK(eval_at(parse("y1^3", {"y1"}), {-2.0}) == -8.0);
    CHECK(eval_at(parse("y1^0.5", {"y1"}), {4.0}) == 2.0);
}

TEST_CASE("symbolic derivatives")
{
    Expr e = parse("y1^2 - 1", {"y1", "y2"});
    CHECK(simplify(differentiate(e, "y1")).print() == "(2*y1)");
    CHECK(simplify(differentiate(e, "y2")).print() == "0");
    CHECK(simplify(differentiate(parse("sin(y1)", {"y1"}), "y1")).print() == "cos(y1)");

    Expr cube = differentiate(parse("y1^3", {"y1"}), "y1");
    CHECK(eval_at(cube, {2.0}) == 12.0);
    CHECK(eval_at(simplify(cube), {2.0}) == 12.0);

    Expr ex = differentiate(parse("e^(2*y1)", {"y1"}), "y1");
    CHECK(eval_at(ex, {0.5}) == doctest::Approx(2.0 * std::exp(1.0)));

    CHECK_THROWS_AS(differentiate(parse("y1^y1", {"y1"}), "y1"), DomainError);
}

TEST_CASE("simplify folds constants and removes identities")
{
    std::vector<std::string> vars{"y1"};
    CHECK(simplify(parse("0*y1 + 3", vars)).print() == "3");
    CHECK(simplify(parse("y1^1", vars)).print() == "y1");
    CHECK(simplify(parse("1*y1 + 0", vars)).print() == "y1");
    CHECK(simplify(parse("y1/1 - 0", vars)).print() == "y1");
    CHECK(simplify(parse("y1^0", vars)).print() == "1");
    CHECK(simplify(parse("-(-y1)", vars)).print() == "y1");
    CHECK(simplify(parse("2*3 + 4", vars)).print() == "10");
}

TEST_CASE("derivative agrees with central differences to second order")
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> coord(-1.5, 1.5);
    int ratio_checks = 0;
    for (int trial = 0; trial < 200; ++trial)
    {
        std::string text = random_polynomial(rng, 4);
        Expr e = parse(text, {"y1", "y2"});
        for (const char* var : {"y1", "y2"})
        {
            Expr d = differentiate(e, var);
            std::size_t k = std::string(var) == "y1" ? 0 : 1;
            std::vector<double> p{coord(rng), coord(rng)};
            auto fd = [&](double h) {
                auto plus = p;
                auto minus = p;
                plus[k] += h;
                minus[k] -= h;
                return (e.eval(plus) - e.eval(minus)) / (2.0 * h);
            };
            const double exact = d.eval(p);
            const double h = 1e-2;
            const double e1 = std::abs(fd(h) - exact);
            const double e2 = std::abs(fd(h / 2) - exact);
            const double scale = 1.0 + std::abs(exact);
            if (e1 > 1e-7 * scale)
            {
                INFO(text << " d/d" << var);
                CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
                ++ratio_checks;
            }
            else
            {
                CHECK(e2 <= 1e-7 * scale);
            }
        }
    }
    CHECK(ratio_checks > 50);
}

TEST_CASE("simplify never changes values")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int trial = 0; trial < 300; ++trial)
    {
        Expr e = parse(random_small(rng, 4), {"x", "y1", "y2"});
        Expr s = simplify(e);
        for (int k = 0; k < 100; ++k)
        {
            std::vector<double> p{coord(rng), coord(rng), coord(rng)};
            const double a = e.eval(p);
            const double b = s.eval(p);
            INFO(e.print() << " -> " << s.print());
            CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("print then parse preserves values")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int trial = 0; trial < 300; ++trial)
    {
        Expr e = parse(random_small(rng, 5), {"x", "y1", "y2"});
        Expr again = parse(e.print(), {"x", "y1", "y2"});
        CHECK(again.print() == e.print());
        for (int k = 0; k < 20; ++k)
        {
            std::vector<double> p{coord(rng), coord(rng), coord(rng)};
            CHECK(again.eval(p) == e.eval(p));
        }
    }
}

TEST_CASE("compiled expressions match the tree evaluator bit for bit")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        Expr e = parse(random_small(rng, 5), {"x", "y1", "y2"});
        CompiledExpr c(e);
        for (int k = 0; k < 20; ++k)
        {
            std::vector<double> p{coord(rng), coord(rng), coord(rng)};
            CHECK(c(p) == e.eval(p));
        }
    }
    CompiledExpr bad(parse("sqrt(y1)", {"y1"}));
    std::vector<double> neg{-1.0};
    CHECK_THROWS_AS(bad(neg), DomainError);
}

TEST_CASE("coordinate names")
{
    CHECK(coordinate_names(2, true) == std::vector<std::string>{"x", "y1", "y2"});
    CHECK(coordinate_names(1, false) == std::vector<std::string>{"y1"});
    Expr e = parse("x + y1", coordinate_names(1, true));
    CHECK(e.depends_on(0));
    CHECK(e.depends_on(1));
    CHECK(e.variable_index("y1") == 1);
}
