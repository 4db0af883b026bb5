#include "harnack/feynman_kac.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "harnack/parallel.hpp"

namespace harnack {

namespace {

struct MeanSe
{
    double mean;
    double se;
};

// Two-pass mean and standard error, summed in path order.
MeanSe mean_and_se(const std::vector<double>& v)
{
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v)
    {
        s += x;
    }
    double m = s / n;
    if (v.size() < 2)
    {
        return {m, 0.0};
    }
    double ss = 0.0;
    for (double x : v)
    {
        ss += (x - m) * (x - m);
    }
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

std::string describe(std::span<const double> p)
{
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        s += (i ? ", " : "") + format_real(p[i]);
    }
    return s + ")";
}

std::vector<double> weighted_payoffs(const PathBatch& batch, const PointFunction& u,
                                     bool weighted)
{
    std::vector<double> payoff(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
    {
        auto p = batch.stopped_point(i);
        double value;
        try
        {
            value = u(p);
        }
        catch (const std::exception& e)
        {
            throw std::runtime_error("payoff evaluation failed at stopped point "
                                     + describe(p) + ": " + e.what());
        }
        payoff[i] = weighted ? std::exp(batch.gamma_integral[i]) * value : value;
    }
    return payoff;
}

} // namespace

FKEstimate evaluate(const OperatorSpec& op, const CylinderDomain& dom,
                    const PointFunction& u_data, std::span<const double> start,
                    double t, const SimConfig& cfg, std::uint64_t substream)
{
    SimConfig run = cfg;
    run.t_max = t;
    PathBatch batch = simulate_batch(op, dom, start, run, substream);
    auto [mean, se] = mean_and_se(weighted_payoffs(batch, u_data, true));
    return {mean, se, batch.size(), t};
}

double default_sandwich_horizon(const OperatorSpec& op)
{
    if (!(op.beta_sup > 0.0))
    {
        throw std::invalid_argument("default horizon needs a nonzero beta");
    }
    return 1.0 / op.beta_sup;
}

SandwichVerdict sandwich_check(const OperatorSpec& op, const CylinderDomain& dom,
                               const ScalarField& u, std::span<const double> start,
                               double t, const SimConfig& cfg, double k_sigma)
{
    if (op.gamma_grid_max > 1.0)
    {
        throw std::invalid_argument(
            "sandwich check needs |gamma|_inf <= 1; rescale gamma first");
    }
    if (!u.contains(start))
    {
        throw std::out_of_range("start point outside the field grid");
    }
    SimConfig run = cfg;
    run.t_max = t;
    PathBatch batch = simulate_batch(op, dom, start, run);
    auto interp = [&u](std::span<const double> p) { return u.interpolate(p); };
    auto [mean, se] = mean_and_se(weighted_payoffs(batch, interp, false));

    SandwichVerdict v;
    v.u_start = u.interpolate(start);
    v.expectation = mean;
    v.std_error = se;
    v.horizon = t;
    v.lower = std::exp(-t) * (mean - k_sigma * se);
    v.upper = std::exp(t) * (mean + k_sigma * se);
    v.pass = v.lower <= v.u_start && v.u_start <= v.upper;
    return v;
}

ManufacturedField make_solution(const OperatorSpec& op, const CylinderDomain& dom,
                                const PointFunction& g, double t_solve,
                                const SimConfig& cfg, std::vector<Axis> grid)
{
    if (grid.size() != op.dim)
    {
        throw std::invalid_argument("grid dimension does not match operator");
    }
    ManufacturedField out{ScalarField(grid), ScalarField(grid)};
    SimConfig run = cfg;
    run.t_max = t_solve;
    run.workers = 1;
    run.validate(op, dom);
    const double r2 = dom.outer_radius * dom.outer_radius;

    parallel_for(out.value.size(), cfg.workers, [&](std::size_t i) {
        auto node = out.value.node(i);
        double n2 = 0.0;
        for (std::size_t j = 1; j < node.size(); ++j)
        {
            n2 += node[j] * node[j];
        }
        if (n2 >= r2)
        {
            out.value[i] = g(node);
            out.std_error[i] = 0.0;
            return;
        }
        const std::uint64_t line = i % out.value.stride(0);
        PathBatch batch = simulate_batch(op, dom, node, run, line + 1);
        auto [mean, se] = mean_and_se(weighted_payoffs(batch, g, true));
        out.value[i] = mean;
        out.std_error[i] = se;
    });
    return out;
}

} // namespace harnack
