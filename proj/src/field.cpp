#include "harnack/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "harnack/expr.hpp"

namespace harnack {

double Axis::coord(std::size_t i) const
{
    if (i + 1 == count)
    {
        return hi;
    }
    return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(count - 1));
}

Axis Axis::from_step(double lo, double hi, double step)
{
    if (!(hi > lo) || !(step > 0.0))
    {
        throw std::invalid_argument("axis needs lo < hi and a positive step");
    }
    auto intervals = static_cast<std::size_t>(std::llround((hi - lo) / step));
    return Axis{lo, hi, std::max<std::size_t>(intervals, 1) + 1};
}

ScalarField::ScalarField(std::vector<Axis> axes, double fill) : axes_(std::move(axes))
{
    if (axes_.empty())
    {
        throw std::invalid_argument("field needs at least one axis");
    }
    strides_.assign(axes_.size(), 1);
    std::size_t total = 1;
    for (std::size_t k = axes_.size(); k-- > 0;)
    {
        if (axes_[k].count < 2)
        {
            throw std::invalid_argument("every axis needs at least 2 nodes");
        }
        strides_[k] = total;
        total *= axes_[k].count;
    }
    values_.assign(total, fill);
}

ScalarField ScalarField::sample(std::vector<Axis> axes, const PointFunction& f)
{
    ScalarField field(std::move(axes));
    for (std::size_t i = 0; i < field.size(); ++i)
    {
        field.values_[i] = f(field.node(i));
    }
    return field;
}

std::size_t ScalarField::flat_index(std::span<const std::size_t> index) const
{
    std::size_t flat = 0;
    for (std::size_t k = 0; k < axes_.size(); ++k)
    {
        flat += index[k] * strides_[k];
    }
    return flat;
}

std::vector<std::size_t> ScalarField::multi_index(std::size_t flat) const
{
    std::vector<std::size_t> index(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k)
    {
        index[k] = flat / strides_[k];
        flat %= strides_[k];
    }
    return index;
}

std::vector<double> ScalarField::node(std::size_t flat) const
{
    std::vector<double> p(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k)
    {
        p[k] = axes_[k].coord(flat / strides_[k]);
        flat %= strides_[k];
    }
    return p;
}

bool ScalarField::contains(std::span<const double> point) const
{
    for (std::size_t k = 0; k < axes_.size(); ++k)
    {
        double slack = 1e-9 * axes_[k].step();
        if (point[k] < axes_[k].lo - slack || point[k] > axes_[k].hi + slack)
        {
            return false;
        }
    }
    return true;
}

double ScalarField::interpolate(std::span<const double> point) const
{
    if (point.size() < axes_.size() || !contains(point))
    {
        throw std::out_of_range("interpolation point outside field support");
    }
    const std::size_t d = axes_.size();
    std::vector<std::size_t> cell(d);
    std::vector<double> frac(d);
    for (std::size_t k = 0; k < d; ++k)
    {
        const Axis& ax = axes_[k];
        double s = (point[k] - ax.lo) / ax.step();
        double c = std::floor(s);
        c = std::clamp(c, 0.0, static_cast<double>(ax.count - 2));
        cell[k] = static_cast<std::size_t>(c);
        frac[k] = std::clamp(s - c, 0.0, 1.0);
    }

    double sum = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner)
    {
        double w = 1.0;
        std::size_t flat = 0;
        for (std::size_t k = 0; k < d; ++k)
        {
            bool upper = (corner >> k) & 1u;
            w *= upper ? frac[k] : 1.0 - frac[k];
            flat += (cell[k] + (upper ? 1 : 0)) * strides_[k];
        }
        if (w != 0.0)
        {
            sum += w * values_[flat];
        }
    }
    return sum;
}

double max_abs(const ScalarField& f)
{
    double m = 0.0;
    for (double v : f.values())
    {
        if (!std::isnan(v))
        {
            m = std::max(m, std::abs(v));
        }
    }
    return m;
}

std::string format_real(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const ScalarField& f)
{
    auto names = coordinate_names(f.dim() - 1, true);
    for (const auto& n : names)
    {
        os << n << ',';
    }
    os << "value\n";
    for (std::size_t i = 0; i < f.size(); ++i)
    {
        for (double c : f.node(i))
        {
            os << format_real(c) << ',';
        }
        os << format_real(f[i]) << '\n';
    }
}

std::string grid_json(const ScalarField& f)
{
    auto names = coordinate_names(f.dim() - 1, true);
    nlohmann::json axes = nlohmann::json::array();
    for (std::size_t k = 0; k < f.dim(); ++k)
    {
        const Axis& ax = f.axes()[k];
        axes.push_back({{"name", names[k]},
                        {"lo", ax.lo},
                        {"hi", ax.hi},
                        {"count", ax.count},
                        {"step", ax.step()}});
    }
    nlohmann::json j{{"axes", axes}, {"layout", "row-major, x slowest"}};
    return j.dump(2);
}

} // namespace harnack
