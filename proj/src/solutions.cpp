#include "harnack/solutions.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

namespace harnack {

PositivityError::PositivityError(const std::string& what, std::vector<double> location)
    : std::runtime_error(what), location_(std::move(location))
{
}

OperatorSpec AnalyticSolution::make_operator(const CylinderDomain& dom) const
{
    return harnack::make_operator(beta, gamma, dim, dom);
}

namespace {

constexpr double certificate_step = 0.05;

// Minimum of u over the lattice of the closed validity cylinder.
void certify(AnalyticSolution& s)
{
    Axis xs = Axis::from_step(s.validity.x_lo, s.validity.x_hi, certificate_step);
    auto ys = ball_lattice(s.dim - 1, s.validity.outer_radius, certificate_step, true);
    s.min_value = std::numeric_limits<double>::infinity();
    std::vector<double> p(s.dim);
    for (std::size_t i = 0; i < xs.count; ++i)
    {
        p[0] = xs.coord(i);
        for (const auto& y : ys)
        {
            std::copy(y.begin(), y.end(), p.begin() + 1);
            double v = s.u(p);
            if (v < s.min_value)
            {
                s.min_value = v;
                s.min_location = p;
            }
        }
    }
    if (!(s.min_value > 0.0))
    {
        throw PositivityError(s.id + " is not positive on its validity domain (min "
                                  + format_real(s.min_value) + ")",
                              s.min_location);
    }
}

std::string number_text(double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

//---------------------------------------------------------------------------//
// Tabulated solution of phi'' = -(lambda beta(y) + gamma) phi
//---------------------------------------------------------------------------//
struct OdeTable
{
    std::vector<double> y;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> ddphi;

    double operator()(double at) const
    {
        if (at < y.front() - 1e-12 || at > y.back() + 1e-12)
        {
            throw DomainError("separable solution evaluated outside its interval");
        }
        auto it = std::upper_bound(y.begin(), y.end(), at);
        std::size_t i = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::distance(y.begin(), it)), 1, y.size() - 1) - 1;
        // Quintic Hermite on [y_i, y_{i+1}] using phi, phi', phi''.
        double h = y[i + 1] - y[i];
        double s = (at - y[i]) / h;
        double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
        double h00 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
        double h10 = s - 6 * s3 + 8 * s4 - 3 * s5;
        double h20 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
        double h01 = 10 * s3 - 15 * s4 + 6 * s5;
        double h11 = -4 * s3 + 7 * s4 - 3 * s5;
        double h21 = 0.5 * (s3 - 2 * s4 + s5);
        return h00 * phi[i] + h10 * h * dphi[i] + h20 * h * h * ddphi[i]
               + h01 * phi[i + 1] + h11 * h * dphi[i + 1]
               + h21 * h * h * ddphi[i + 1];
    }
};

template<class Coef>
void rk4_sweep(const Coef& coef, double y0, double y1, double step,
               std::vector<double>& ys, std::vector<double>& phi,
               std::vector<double>& dphi)
{
    auto n = static_cast<std::size_t>(std::ceil(std::abs(y1 - y0) / step - 1e-9));
    n = std::max<std::size_t>(n, 1);
    const double h = (y1 - y0) / static_cast<double>(n);
    double p = 1.0;
    double q = 0.0;
    ys = {y0};
    phi = {p};
    dphi = {q};
    for (std::size_t k = 0; k < n; ++k)
    {
        double y = y0 + static_cast<double>(k) * h;
        double k1p = q;
        double k1q = -coef(y) * p;
        double k2p = q + 0.5 * h * k1q;
        double k2q = -coef(y + 0.5 * h) * (p + 0.5 * h * k1p);
        double k3p = q + 0.5 * h * k2q;
        double k3q = -coef(y + 0.5 * h) * (p + 0.5 * h * k2p);
        double k4p = q + h * k3q;
        double k4q = -coef(y + h) * (p + h * k3p);
        p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
        ys.push_back(k + 1 == n ? y1 : y0 + static_cast<double>(k + 1) * h);
        phi.push_back(p);
        dphi.push_back(q);
    }
}

template<class Coef>
std::shared_ptr<OdeTable> integrate(const Coef& coef, double y0, double lo, double hi,
                                    double step)
{
    std::vector<double> yu, pu, qu, yd, pd, qd;
    rk4_sweep(coef, y0, hi, step, yu, pu, qu);
    rk4_sweep(coef, y0, lo, step, yd, pd, qd);

    auto t = std::make_shared<OdeTable>();
    for (std::size_t i = yd.size(); i-- > 1;)
    {
        t->y.push_back(yd[i]);
        t->phi.push_back(pd[i]);
        t->dphi.push_back(qd[i]);
    }
    t->y.insert(t->y.end(), yu.begin(), yu.end());
    t->phi.insert(t->phi.end(), pu.begin(), pu.end());
    t->dphi.insert(t->dphi.end(), qu.begin(), qu.end());
    t->ddphi.resize(t->y.size());
    for (std::size_t i = 0; i < t->y.size(); ++i)
    {
        t->ddphi[i] = -coef(t->y[i]) * t->phi[i];
    }
    return t;
}

} // namespace

AnalyticSolution kolmogorov_poly(double c, const CylinderDomain& validity)
{
    AnalyticSolution s;
    s.id = "kolmogorov(" + number_text(c) + ")";
    s.beta = "y1";
    s.gamma = "0";
    s.validity = validity;
    s.u = [c](std::span<const double> p) {
        return p[0] - p[1] * p[1] * p[1] / 6.0 + c;
    };
    certify(s);
    return s;
}

AnalyticSolution separable(double lambda, const OperatorSpec& op, double y0,
                           const CylinderDomain& dom, double ode_step)
{
    if (op.dim != 2)
    {
        throw std::invalid_argument("separable solutions need N = 2");
    }
    Expr gamma = simplify(op.gamma);
    if (!gamma.is_constant())
    {
        throw std::invalid_argument("separable solutions need a constant gamma");
    }
    const double g = gamma.root()->value;
    const double r = dom.outer_radius;
    if (!(std::abs(y0) < r))
    {
        throw std::invalid_argument("y0 must lie inside the outer interval");
    }
    CompiledExpr beta(op.beta);
    auto coef = [&](double y) { return lambda * beta(std::span<const double>(&y, 1)) + g; };

    auto table = integrate(coef, y0, -r, r, ode_step);
    auto half = integrate(coef, y0, -r, r, 0.5 * ode_step);

    AnalyticSolution s;
    s.id = "separable(" + number_text(lambda) + "," + number_text(g) + ")";
    s.beta = op.beta.print();
    s.gamma = number_text(g);
    s.validity = dom;
    for (std::size_t i = 0; i < table->y.size(); ++i)
    {
        s.error_estimate
            = std::max(s.error_estimate, std::abs(table->phi[i] - (*half)(table->y[i])));
    }

    // First zero of phi on the inner interval, scanning outward from y0.
    const double rin = dom.inner_radius;
    std::size_t centre = 0;
    for (std::size_t i = 1; i < table->y.size(); ++i)
    {
        if (std::abs(table->y[i] - y0) < std::abs(table->y[centre] - y0))
        {
            centre = i;
        }
    }
    std::optional<double> zero;
    auto walk = [&](int dir) {
        std::size_t prev = centre;
        for (long i = static_cast<long>(centre);
             i >= 0 && i < static_cast<long>(table->y.size()); i += dir)
        {
            const auto k = static_cast<std::size_t>(i);
            if (!(std::abs(table->y[k]) < rin))
            {
                return;
            }
            if (!(table->phi[k] > 0.0))
            {
                double y = table->y[k];
                if (k != prev)
                {
                    const double a = table->phi[prev];
                    const double b = table->phi[k];
                    y = table->y[prev] + (table->y[k] - table->y[prev]) * a / (a - b);
                }
                if (!zero || std::abs(y - y0) < std::abs(*zero - y0))
                {
                    zero = y;
                }
                return;
            }
            prev = k;
        }
    };
    walk(+1);
    walk(-1);
    if (zero)
    {
        throw PositivityError("phi vanishes on the inner interval near y = " + format_real(*zero),
                              {0.0, *zero});
    }

    s.u = [lambda, table](std::span<const double> p) {
        return std::exp(lambda * p[0]) * (*table)(p[1]);
    };

    // Certificate over the inner interval only; phi may change sign outside it.
    CylinderDomain inner = dom;
    inner.outer_radius = rin;
    inner.inner_radius = 0.5 * rin;
    std::swap(s.validity, inner);
    certify(s);
    std::swap(s.validity, inner);
    return s;
}

AnalyticSolution counterexample_family(double lambda, const CylinderDomain& validity)
{
    if (!(lambda > 0.0))
    {
        throw std::invalid_argument("counterexample family needs lambda > 0");
    }
    AnalyticSolution s;
    s.id = "counterexample(" + number_text(lambda) + ")";
    s.beta = "1";
    s.gamma = "0";
    s.validity = validity;
    const double k = std::sqrt(lambda);
    s.u = [lambda, k](std::span<const double> p) {
        return std::exp(-lambda * p[0]) * std::cosh(k * p[1]);
    };
    certify(s);
    return s;
}

AnalyticSolution constant_solution(double c, std::size_t dim,
                                   const CylinderDomain& validity)
{
    if (dim < 2)
    {
        throw std::invalid_argument("dimension N must be at least 2");
    }
    AnalyticSolution s;
    s.id = "constant(" + number_text(c) + ")";
    s.beta = "y1";
    s.gamma = "0";
    s.dim = dim;
    s.validity = validity;
    s.u = [c](std::span<const double>) { return c; };
    certify(s);
    return s;
}

double counterexample_ratio(double lambda)
{
    return std::exp(lambda) * std::cosh(std::sqrt(lambda));
}

namespace {

std::vector<double> parse_arguments(std::string_view text, std::string_view name)
{
    auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')')
    {
        throw std::invalid_argument("malformed catalog entry '" + std::string(name) + "'");
    }
    std::vector<double> args;
    std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    while (!inner.empty())
    {
        auto comma = inner.find(',');
        std::string_view item = inner.substr(0, comma);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size())
        {
            throw std::invalid_argument("bad number '" + std::string(item)
                                        + "' in catalog entry");
        }
        args.push_back(v);
        if (comma == std::string_view::npos)
        {
            break;
        }
        inner.remove_prefix(comma + 1);
    }
    return args;
}

} // namespace

AnalyticSolution catalog_solution(std::string_view name, std::string_view beta,
                                  const CylinderDomain& dom)
{
    auto head = name.substr(0, name.find('('));
    auto args = parse_arguments(name, name);
    auto expect = [&](std::size_t n) {
        if (args.size() != n)
        {
            throw std::invalid_argument(std::string(head) + " takes "
                                        + std::to_string(n) + " argument(s)");
        }
    };
    if (head == "kolmogorov")
    {
        expect(1);
        return kolmogorov_poly(args[0], dom);
    }
    if (head == "counterexample")
    {
        expect(1);
        return counterexample_family(args[0], dom);
    }
    if (head == "constant")
    {
        expect(1);
        return constant_solution(args[0], 2, dom);
    }
    if (head == "separable")
    {
        expect(2);
        OperatorSpec op = make_operator(beta, number_text(args[1]), 2, dom);
        return separable(args[0], op, 0.0, dom);
    }
    throw std::invalid_argument("unknown catalog solution '" + std::string(head) + "'");
}

} // namespace harnack
