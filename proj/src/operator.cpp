#include "harnack/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace harnack {

void CylinderDomain::validate() const
{
    if (!(x_lo < x_lo_inner && x_lo_inner < x_hi_inner && x_hi_inner < x_hi))
    {
        throw std::invalid_argument("domain needs a < a' < b' < b");
    }
    if (!(0.0 < inner_radius && inner_radius < outer_radius))
    {
        throw std::invalid_argument("domain needs 0 < R' < R");
    }
}

std::vector<std::vector<double>>
ball_lattice(std::size_t y_dim, double radius, double step, bool closed)
{
    if (y_dim == 0 || !(step > 0.0) || !(radius > 0.0))
    {
        throw std::invalid_argument("ball lattice needs y_dim >= 1 and positive sizes");
    }
    const auto m = static_cast<long>(std::floor(radius / step + 1e-9));
    const double r2 = radius * radius;
    const double slack = 1e-12 * r2;

    std::vector<std::vector<double>> points;
    std::vector<long> k(y_dim, -m);
    for (;;)
    {
        std::vector<double> y(y_dim);
        double n2 = 0.0;
        for (std::size_t j = 0; j < y_dim; ++j)
        {
            y[j] = static_cast<double>(k[j]) * step;
            n2 += y[j] * y[j];
        }
        bool inside = closed ? n2 <= r2 + slack : n2 < r2 - slack;
        if (inside)
        {
            points.push_back(std::move(y));
        }
        std::size_t j = y_dim;
        while (j-- > 0)
        {
            if (++k[j] <= m)
            {
                break;
            }
            k[j] = -m;
        }
        if (j == static_cast<std::size_t>(-1))
        {
            break;
        }
    }
    return points;
}

OperatorSpec make_operator(std::string_view beta, std::string_view gamma,
                           std::size_t dim, const CylinderDomain& domain,
                           double grid_step)
{
    if (dim < 2)
    {
        throw std::invalid_argument("dimension N must be at least 2");
    }
    domain.validate();
    OperatorSpec op{parse(beta, coordinate_names(dim - 1, false)),
                    parse(gamma, coordinate_names(dim - 1, true)),
                    dim};

    CompiledExpr b(op.beta);
    CompiledExpr g(op.gamma);
    auto ys = ball_lattice(dim - 1, domain.outer_radius, grid_step, true);
    Axis xs = Axis::from_step(domain.x_lo, domain.x_hi, grid_step);

    std::vector<double> p(dim);
    for (const auto& y : ys)
    {
        op.beta_grid_max = std::max(op.beta_grid_max, std::abs(b(y)));
        std::copy(y.begin(), y.end(), p.begin() + 1);
        if (op.gamma.is_constant())
        {
            p[0] = 0.0;
            op.gamma_grid_max = std::max(op.gamma_grid_max, std::abs(g(p)));
            continue;
        }
        for (std::size_t i = 0; i < xs.count; ++i)
        {
            p[0] = xs.coord(i);
            op.gamma_grid_max = std::max(op.gamma_grid_max, std::abs(g(p)));
        }
    }
    op.beta_sup = sup_safety_factor * op.beta_grid_max;
    op.gamma_sup = sup_safety_factor * op.gamma_grid_max;
    return op;
}

//---------------------------------------------------------------------------//
namespace {

struct Derivative
{
    Expr expr;
    std::size_t last_var; // multi-indices are generated in nondecreasing order
    int order;
};

std::vector<Derivative> derivatives_up_to(const Expr& beta, std::size_t y_dim,
                                          int max_order)
{
    std::vector<Derivative> all{{beta, 0, 0}};
    std::size_t level_begin = 0;
    for (int order = 1; order <= max_order; ++order)
    {
        std::size_t level_end = all.size();
        for (std::size_t i = level_begin; i < level_end; ++i)
        {
            for (std::size_t j = all[i].last_var; j < y_dim; ++j)
            {
                Expr d = simplify(
                    differentiate(all[i].expr, all[i].expr.variables()[j]));
                all.push_back({d, j, order});
            }
        }
        level_begin = level_end;
    }
    return all;
}

} // namespace

HormanderReport check_hypothesis(const OperatorSpec& op, const CylinderDomain& dom,
                                 int r, double grid_step)
{
    if (r < 0)
    {
        throw std::invalid_argument("derivative order r must be nonnegative");
    }
    if (!(grid_step > 0.0) || 2.0 * dom.outer_radius / grid_step + 1.0 < 10.0)
    {
        throw std::invalid_argument(
            "grid_step must resolve the outer ball with at least 10 points per axis");
    }

    HormanderReport rep;
    rep.r = r;
    rep.grid_step = grid_step;
    const int top = std::max(r, max_hormander_order);
    auto derivs = derivatives_up_to(op.beta, op.y_dim(), top);
    std::vector<CompiledExpr> compiled;
    compiled.reserve(derivs.size());
    for (const auto& d : derivs)
    {
        compiled.emplace_back(d.expr);
    }

    auto ys = ball_lattice(op.y_dim(), dom.outer_radius, grid_step, true);
    rep.grid_points = ys.size();

    // Minimum over the lattice of the cumulative mass for each order.
    std::vector<double> min_mass(top + 1, std::numeric_limits<double>::infinity());
    int evaluable_order = top;
    rep.beta_min = std::numeric_limits<double>::infinity();
    rep.beta_max = -std::numeric_limits<double>::infinity();

    for (const auto& y : ys)
    {
        std::vector<double> mass(top + 1, 0.0);
        for (std::size_t i = 0; i < derivs.size(); ++i)
        {
            if (derivs[i].order > evaluable_order)
            {
                continue;
            }
            double v = 0.0;
            try
            {
                v = compiled[i](y);
            }
            catch (const DomainError& e)
            {
                if (derivs[i].order <= r)
                {
                    rep.error = e.what();
                    rep.error_location = y;
                    rep.pass = false;
                    return rep;
                }
                evaluable_order = derivs[i].order - 1;
                continue;
            }
            if (i == 0)
            {
                if (v < rep.beta_min)
                {
                    rep.beta_min = v;
                    rep.witness_minus = y;
                }
                if (v > rep.beta_max)
                {
                    rep.beta_max = v;
                    rep.witness_plus = y;
                }
            }
            mass[derivs[i].order] += std::abs(v);
        }
        double cumulative = 0.0;
        for (int k = 0; k <= top; ++k)
        {
            cumulative += mass[k];
            if (cumulative < min_mass[k])
            {
                min_mass[k] = cumulative;
                if (k == r)
                {
                    rep.min_mass_location = y;
                }
            }
        }
    }

    rep.min_derivative_mass = min_mass[r];
    rep.sign_change_ok = rep.beta_min < 0.0 && rep.beta_max > 0.0;
    for (int k = 0; k <= std::min(evaluable_order, max_hormander_order); ++k)
    {
        if (min_mass[k] > rep.tolerance)
        {
            rep.smallest_passing_r = k;
            break;
        }
    }
    rep.pass = rep.sign_change_ok && rep.min_derivative_mass > rep.tolerance;
    return rep;
}

std::string to_json(const HormanderReport& report)
{
    nlohmann::json j;
    j["pass"] = report.pass;
    j["r"] = report.r;
    j["min_derivative_mass"] = report.min_derivative_mass;
    j["min_mass_location"] = report.min_mass_location;
    j["sign_change_ok"] = report.sign_change_ok;
    j["sign_witnesses"] = {report.witness_minus, report.witness_plus};
    j["beta_min"] = report.beta_min;
    j["beta_max"] = report.beta_max;
    j["grid_step"] = report.grid_step;
    j["grid_points"] = report.grid_points;
    j["tolerance"] = report.tolerance;
    j["smallest_passing_r"] = report.smallest_passing_r
                                  ? nlohmann::json(*report.smallest_passing_r)
                                  : nlohmann::json(nullptr);
    if (!report.error.empty())
    {
        j["error"] = report.error;
        j["error_location"] = report.error_location;
    }
    return j.dump(2);
}

RegionSet classify_regions(const OperatorSpec& op, const CylinderDomain& dom,
                           double d, double grid_step)
{
    if (!(d > 0.0))
    {
        throw std::invalid_argument("region level d must be positive");
    }
    RegionSet set;
    set.level = d;
    CompiledExpr beta(op.beta);
    for (auto& y : ball_lattice(op.y_dim(), dom.inner_radius, grid_step, false))
    {
        double b = beta(y);
        if (b > d)
        {
            set.plus_points.push_back(std::move(y));
        }
        else if (-b > d)
        {
            set.minus_points.push_back(std::move(y));
        }
        else
        {
            ++set.neither_count;
        }
    }
    if (set.plus_points.empty())
    {
        set.warnings.push_back("A_d^+ is empty at d = " + format_real(d));
    }
    if (set.minus_points.empty())
    {
        set.warnings.push_back("A_d^- is empty at d = " + format_real(d));
    }
    return set;
}

ScalarField residual(const ScalarField& u, const OperatorSpec& op)
{
    if (u.dim() != op.dim)
    {
        throw std::invalid_argument("field dimension does not match operator");
    }
    for (const Axis& ax : u.axes())
    {
        if (ax.count < 3)
        {
            throw std::invalid_argument("residual needs at least 3 nodes per axis");
        }
    }

    CompiledExpr beta(op.beta);
    CompiledExpr gamma(op.gamma);
    ScalarField out(u.axes(), std::numeric_limits<double>::quiet_NaN());
    const std::size_t n = u.dim();

    for (std::size_t i = 0; i < u.size(); ++i)
    {
        auto idx = u.multi_index(i);
        bool interior = true;
        for (std::size_t k = 0; k < n; ++k)
        {
            interior = interior && idx[k] > 0 && idx[k] + 1 < u.axes()[k].count;
        }
        if (!interior)
        {
            continue;
        }
        auto p = u.node(i);
        const double c = u[i];

        double lap = 0.0;
        for (std::size_t k = 1; k < n; ++k)
        {
            double h = u.axes()[k].step();
            std::size_t s = u.stride(k);
            lap += (u[i + s] - 2.0 * c + u[i - s]) / (h * h);
        }
        double hx = u.axes()[0].step();
        std::size_t sx = u.stride(0);
        double ux = (u[i + sx] - u[i - sx]) / (2.0 * hx);

        std::span<const double> y(p.data() + 1, n - 1);
        out[i] = lap + beta(y) * ux + gamma(p) * c;
    }
    return out;
}

} // namespace harnack
