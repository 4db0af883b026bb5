#include "harnack/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "harnack/rng.hpp"

namespace harnack {

namespace {

struct Extrema
{
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    std::vector<double> argmax;
    std::vector<double> argmin;

    void add(double v, std::span<const double> p)
    {
        if (!(v > 0.0))
        {
            throw PositivityError("nonpositive value " + format_real(v)
                                      + " in the subcylinder",
                                  {p.begin(), p.end()});
        }
        if (v > sup)
        {
            sup = v;
            argmax.assign(p.begin(), p.end());
        }
        if (v < inf)
        {
            inf = v;
            argmin.assign(p.begin(), p.end());
        }
    }
};

HarnackReport to_report(const Extrema& e, const Subcylinder& sub, const std::string& id)
{
    if (e.argmax.empty())
    {
        throw std::invalid_argument("subcylinder contains no grid nodes");
    }
    return {id, e.sup, e.inf, e.sup / e.inf, e.argmax, e.argmin, sub};
}

bool in_closed_ball(std::span<const double> y, double radius)
{
    double n2 = 0.0;
    for (double c : y)
    {
        n2 += c * c;
    }
    return n2 <= radius * radius * (1.0 + 1e-12);
}

} // namespace

HarnackReport sup_inf_ratio(const PointFunction& u, std::size_t dim,
                            const Subcylinder& sub, const GridSpec& grid,
                            const std::string& id)
{
    Axis xs = Axis::from_step(sub.x_lo, sub.x_hi, grid.hx);
    auto ys = ball_lattice(dim - 1, sub.radius, grid.hy, true);
    Extrema e;
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < xs.count; ++i)
    {
        p[0] = xs.coord(i);
        for (const auto& y : ys)
        {
            std::copy(y.begin(), y.end(), p.begin() + 1);
            e.add(u(p), p);
        }
    }
    return to_report(e, sub, id);
}

HarnackReport sup_inf_ratio(const AnalyticSolution& u, const Subcylinder& sub,
                            const GridSpec& grid)
{
    return sup_inf_ratio(u.u, u.dim, sub, grid, u.id);
}

HarnackReport sup_inf_ratio(const ScalarField& u, const Subcylinder& sub,
                            const std::string& id)
{
    Extrema e;
    const double slack = 1e-9 * u.axes()[0].step();
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        auto p = u.node(i);
        if (p[0] < sub.x_lo - slack || p[0] > sub.x_hi + slack
            || !in_closed_ball(std::span<const double>(p).subspan(1), sub.radius))
        {
            continue;
        }
        e.add(u[i], p);
    }
    return to_report(e, sub, id);
}

FamilyScan scan_family(const std::vector<AnalyticSolution>& family,
                       const Subcylinder& sub, const GridSpec& grid)
{
    FamilyScan scan;
    for (const auto& s : family)
    {
        scan.reports.push_back(sup_inf_ratio(s, sub, grid));
        if (scan.reports.back().ratio > scan.max_ratio)
        {
            scan.max_ratio = scan.reports.back().ratio;
            scan.argmax = scan.reports.size() - 1;
        }
    }
    return scan;
}

FamilyScan scan_family(const std::vector<ScalarField>& family,
                       const std::vector<std::string>& ids, const Subcylinder& sub)
{
    FamilyScan scan;
    for (std::size_t i = 0; i < family.size(); ++i)
    {
        scan.reports.push_back(
            sup_inf_ratio(family[i], sub, i < ids.size() ? ids[i] : std::string()));
        if (scan.reports.back().ratio > scan.max_ratio)
        {
            scan.max_ratio = scan.reports.back().ratio;
            scan.argmax = i;
        }
    }
    return scan;
}

CylinderDomain validity_domain(const Subcylinder& sub)
{
    CylinderDomain validity;
    validity.x_lo = sub.x_lo - 1.0;
    validity.x_lo_inner = sub.x_lo;
    validity.x_hi_inner = sub.x_hi;
    validity.x_hi = sub.x_hi + 1.0;
    validity.outer_radius = sub.radius;
    validity.inner_radius = 0.5 * sub.radius;
    return validity;
}

std::vector<AnalyticSolution> shipped_analytic_family(const Subcylinder& sub)
{
    const CylinderDomain validity = validity_domain(sub);

    std::vector<AnalyticSolution> family;
    for (double c : {1.0, 5.0, 100.0})
    {
        family.push_back(constant_solution(c, 2, validity));
    }
    for (double c : {2.0, 5.0, 10.0, 100.0})
    {
        family.push_back(kolmogorov_poly(c, validity));
    }
    CylinderDomain ode_domain;
    OperatorSpec op = make_operator("y1", "0", 2, ode_domain);
    for (double lambda : {-1.0, 1.0})
    {
        family.push_back(separable(lambda, op, 0.0, ode_domain));
    }
    return family;
}

PointFunction random_positive_data(std::uint64_t seed, std::size_t index)
{
    CounterStream rng(seed, index, 0x6a09e667f3bcc909ull);
    const double c1 = rng.next_uniform();
    const double c2 = rng.next_uniform();
    const double w1 = 0.5 + 1.5 * rng.next_uniform();
    const double w2 = 0.5 + 1.5 * rng.next_uniform();
    const double p1 = 2.0 * std::numbers::pi * rng.next_uniform();
    const double p2 = 2.0 * std::numbers::pi * rng.next_uniform();
    return [=](std::span<const double> p) {
        return std::exp(c1 * std::sin(w1 * p[0] + p1) + c2 * std::cos(w2 * p[1] + p2));
    };
}

std::vector<ScalarField> manufactured_family(const OperatorSpec& op,
                                             const CylinderDomain& dom,
                                             const Subcylinder& sub, std::size_t count,
                                             double t_solve, const SimConfig& cfg,
                                             const GridSpec& field_grid)
{
    std::vector<Axis> grid{Axis::from_step(sub.x_lo, sub.x_hi, field_grid.hx)};
    for (std::size_t j = 1; j < op.dim; ++j)
    {
        grid.push_back(Axis::from_step(-sub.radius, sub.radius, field_grid.hy));
    }
    std::vector<ScalarField> family;
    for (std::size_t k = 0; k < count; ++k)
    {
        SimConfig run = cfg;
        run.master_seed = splitmix64(cfg.master_seed + k);
        family.push_back(make_solution(op, dom, random_positive_data(cfg.master_seed, k),
                                       t_solve, run, grid)
                             .value);
    }
    return family;
}

const char* to_string(Verdict v)
{
    switch (v)
    {
        case Verdict::Divergent: return "divergent";
        case Verdict::Bounded: return "bounded";
        case Verdict::NoVerdict: return "no verdict";
    }
    return "?";
}

CounterexampleScan counterexample_scan(const std::vector<double>& lambdas,
                                       const Subcylinder& sub, const GridSpec& grid)
{
    if (lambdas.empty())
    {
        throw std::invalid_argument("counterexample scan needs at least one lambda");
    }
    CounterexampleScan scan;
    scan.lambdas = lambdas;
    CylinderDomain validity;
    validity.x_lo = sub.x_lo - 1.0;
    validity.x_lo_inner = sub.x_lo;
    validity.x_hi_inner = sub.x_hi;
    validity.x_hi = sub.x_hi + 1.0;
    validity.outer_radius = sub.radius;
    validity.inner_radius = 0.5 * sub.radius;
    for (double lambda : lambdas)
    {
        auto s = counterexample_family(lambda, validity);
        scan.reports.push_back(sup_inf_ratio(s, sub, grid));
        scan.closed_form.push_back(std::exp(lambda * (sub.x_hi - sub.x_lo))
                                   * std::cosh(std::sqrt(lambda) * sub.radius));
    }
    if (lambdas.size() < 2)
    {
        scan.verdict = Verdict::NoVerdict;
        return scan;
    }
    bool increasing = true;
    for (std::size_t i = 1; i < scan.reports.size(); ++i)
    {
        increasing = increasing && scan.reports[i].ratio > scan.reports[i - 1].ratio;
    }
    bool grows = scan.reports.back().ratio > 10.0 * scan.reports.front().ratio;
    scan.verdict = increasing && grows ? Verdict::Divergent : Verdict::Bounded;
    return scan;
}

RegionCheck region_inequality_check(const PointFunction& u, const OperatorSpec& op,
                                    const CylinderDomain& dom, double d,
                                    const GridSpec& grid, double cap)
{
    RegionSet regions = classify_regions(op, dom, d, grid.hy);
    if (!regions.both_nonempty())
    {
        std::string msg = "region inequality needs nonempty A_d^+ and A_d^-";
        for (const auto& w : regions.warnings)
        {
            msg += "; " + w;
        }
        throw std::domain_error(msg);
    }

    Axis xs = Axis::from_step(dom.x_lo_inner, dom.x_hi_inner, grid.hx);
    Extrema on_regions;
    Extrema on_ball;
    std::vector<double> p(op.dim);
    auto scan = [&](const std::vector<std::vector<double>>& ys, Extrema& e) {
        for (std::size_t i = 0; i < xs.count; ++i)
        {
            p[0] = xs.coord(i);
            for (const auto& y : ys)
            {
                std::copy(y.begin(), y.end(), p.begin() + 1);
                e.add(u(p), p);
            }
        }
    };
    scan(regions.plus_points, on_regions);
    scan(regions.minus_points, on_regions);
    scan(ball_lattice(op.y_dim(), dom.inner_radius, grid.hy, false), on_ball);

    RegionCheck check;
    check.sup_on_regions = on_regions.sup;
    check.inf_on_inner_ball = on_ball.inf;
    check.ratio = on_regions.sup / on_ball.inf;
    check.argmax = on_regions.argmax;
    check.argmin = on_ball.argmin;
    check.plus_points = regions.plus_points.size();
    check.minus_points = regions.minus_points.size();
    check.cap = cap;
    check.within_cap = check.ratio <= cap;
    return check;
}

ScalarField window_average_x(const ScalarField& u, double z)
{
    if (!(z > 0.0) || z > 1.0 / 3.0 + 1e-15)
    {
        throw std::invalid_argument("window half-width z must lie in (0, 1/3]");
    }
    const Axis& ax = u.axes()[0];
    const double hx = ax.step();
    const double slack = 1e-9 * hx;

    std::size_t first = ax.count;
    std::size_t last = 0;
    for (std::size_t i = 0; i < ax.count; ++i)
    {
        double x = ax.coord(i);
        if (x - z >= ax.lo - slack && x + z <= ax.hi + slack)
        {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first == ax.count || last == first)
    {
        throw std::invalid_argument("insufficient grid margin for the x-window");
    }

    std::vector<Axis> axes = u.axes();
    axes[0] = Axis{ax.coord(first), ax.coord(last), last - first + 1};
    ScalarField v(axes);
    const std::size_t sx = u.stride(0);

    // Value of u at x-coordinate s on the line through flat index `base` (x index 0).
    auto line_value = [&](std::size_t base, double s) {
        double pos = std::clamp((s - ax.lo) / hx, 0.0, static_cast<double>(ax.count - 1));
        auto k = static_cast<std::size_t>(
            std::min(std::floor(pos), static_cast<double>(ax.count - 2)));
        double f = pos - static_cast<double>(k);
        return (1.0 - f) * u[base + k * sx] + f * u[base + (k + 1) * sx];
    };

    for (std::size_t i = 0; i < v.size(); ++i)
    {
        auto idx = v.multi_index(i);
        std::size_t xi = idx[0] + first;
        idx[0] = 0;
        std::size_t base = u.flat_index(idx);
        double x = ax.coord(xi);
        double lo = x - z;
        double hi = x + z;

        // Trapezoid over the breakpoints lo, interior nodes, hi.
        double sum = 0.0;
        double prev_s = lo;
        double prev_v = line_value(base, lo);
        for (std::size_t k = 0; k < ax.count; ++k)
        {
            double s = ax.coord(k);
            if (s <= lo + slack || s >= hi - slack)
            {
                continue;
            }
            double val = u[base + k * sx];
            sum += 0.5 * (s - prev_s) * (val + prev_v);
            prev_s = s;
            prev_v = val;
        }
        double end_v = line_value(base, hi);
        sum += 0.5 * (hi - prev_s) * (end_v + prev_v);
        v[i] = sum;
    }
    return v;
}

} // namespace harnack
