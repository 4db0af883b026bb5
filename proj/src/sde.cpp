#include "harnack/sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "harnack/parallel.hpp"
#include "harnack/rng.hpp"

namespace harnack {

void SimConfig::validate(const OperatorSpec& op, const CylinderDomain& dom) const
{
    if (!(dt > 0.0) || !(t_max > 0.0))
    {
        throw std::invalid_argument("dt and t_max must be positive");
    }
    if (dt > t_max)
    {
        throw std::invalid_argument("dt must not exceed t_max");
    }
    if (n_paths < 1)
    {
        throw std::invalid_argument("n_paths must be at least 1");
    }
    if (!(op.beta_sup * dt < 0.1 * dom.outer_radius))
    {
        throw std::invalid_argument(
            "time step too large: |beta|_inf * dt must stay below 0.1 R");
    }
}

std::vector<double> PathBatch::stopped_point(std::size_t i) const
{
    std::vector<double> p(y_dim + 1);
    p[0] = stopped_x(i);
    auto yi = y(i);
    std::copy(yi.begin(), yi.end(), p.begin() + 1);
    return p;
}

double PathBatch::mean_stop_time() const
{
    double s = 0.0;
    for (double t : stop_time)
    {
        s += t;
    }
    return s / static_cast<double>(size());
}

double PathBatch::stop_time_std_error() const
{
    const double n = static_cast<double>(size());
    if (size() < 2)
    {
        return 0.0;
    }
    const double m = mean_stop_time();
    double ss = 0.0;
    for (double t : stop_time)
    {
        ss += (t - m) * (t - m);
    }
    return std::sqrt(ss / (n - 1.0) / n);
}

double PathBatch::exit_fraction() const
{
    std::size_t k = 0;
    for (auto e : exited)
    {
        k += e;
    }
    return static_cast<double>(k) / static_cast<double>(size());
}

namespace {

double norm(std::span<const double> v)
{
    double s = 0.0;
    for (double c : v)
    {
        s += c * c;
    }
    return std::sqrt(s);
}

// Crossing probabilities below exp(-40) are not sampled.
constexpr double bridge_cutoff = 40.0;

} // namespace

PathBatch simulate_batch(const OperatorSpec& op, const CylinderDomain& dom,
                         std::span<const double> start, const SimConfig& cfg,
                         std::uint64_t substream)
{
    cfg.validate(op, dom);
    const std::size_t yd = op.y_dim();
    if (start.size() != yd + 1)
    {
        throw std::invalid_argument("start point must have N coordinates");
    }
    const double radius = dom.outer_radius;
    if (!(norm(start.subspan(1)) < radius))
    {
        throw std::invalid_argument("start y must lie strictly inside the outer ball");
    }

    PathBatch batch;
    batch.start.assign(start.begin(), start.end());
    batch.y_dim = yd;
    const std::size_t n = cfg.n_paths;
    batch.x_displacement.assign(n, 0.0);
    batch.stopped_y.assign(n * yd, 0.0);
    batch.stop_time.assign(n, 0.0);
    batch.gamma_integral.assign(n, 0.0);
    batch.exited.assign(n, 0);

    const CompiledExpr beta(op.beta);
    const CompiledExpr gamma(op.gamma);
    const bool gamma_const = op.gamma.is_constant();
    const double gamma_value = gamma_const ? op.gamma.root()->value : 0.0;
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    const bool bridge = cfg.monitor == ExitMonitor::BrownianBridge;

    parallel_for(n, cfg.workers, [&](std::size_t path) {
        CounterStream rng(cfg.master_seed, path, substream);
        std::vector<double> point(start.begin(), start.end()); // (x, y...)
        std::span<double> y(point.data() + 1, yd);
        std::vector<double> next(yd);
        double disp = 0.0;
        double gint = 0.0;
        double t = 0.0;
        double dist = radius - norm(y);
        bool out = false;

        for (std::size_t k = 0; k < steps; ++k)
        {
            double t_next = k + 1 == steps ? cfg.t_max
                                           : static_cast<double>(k + 1) * cfg.dt;
            double h = t_next - t;
            point[0] = start[0] + disp;
            double g = gamma_const ? gamma_value : gamma(point);
            double b = beta(y);
            disp += b * h;
            gint += g * h;

            double scale = std::sqrt(2.0 * h);
            for (std::size_t j = 0; j < yd; ++j)
            {
                next[j] = y[j] + scale * rng.next_normal();
            }
            t = t_next;

            double r_next = norm(next);
            double dist_next = radius - r_next;
            if (dist_next <= 0.0)
            {
                out = true;
            }
            else if (bridge && dist * dist_next < bridge_cutoff * h)
            {
                double p_cross = std::exp(-dist * dist_next / h);
                out = rng.next_uniform() < p_cross;
            }
            if (out)
            {
                for (std::size_t j = 0; j < yd; ++j)
                {
                    y[j] = next[j] * (radius / r_next);
                }
                break;
            }
            std::copy(next.begin(), next.end(), y.begin());
            dist = dist_next;
        }

        batch.x_displacement[path] = disp;
        std::copy(y.begin(), y.end(), batch.stopped_y.begin() + path * yd);
        batch.stop_time[path] = t;
        batch.gamma_integral[path] = gint;
        batch.exited[path] = out ? 1 : 0;
    });
    return batch;
}

//---------------------------------------------------------------------------//
double EmpiricalMeasure::mass(std::size_t bin) const
{
    return static_cast<double>(counts[bin]) / static_cast<double>(total);
}

double EmpiricalMeasure::exit_mass() const
{
    return static_cast<double>(exit_count) / static_cast<double>(total);
}

std::vector<double> EmpiricalMeasure::bin_center(std::size_t bin) const
{
    const double width = 2.0 * radius / static_cast<double>(bins_per_axis);
    std::vector<double> c(y_dim);
    for (std::size_t j = y_dim; j-- > 0;)
    {
        c[j] = -radius + (static_cast<double>(bin % bins_per_axis) + 0.5) * width;
        bin /= bins_per_axis;
    }
    return c;
}

std::size_t EmpiricalMeasure::bin_of(std::span<const double> y) const
{
    std::size_t bin = 0;
    for (std::size_t j = 0; j < y_dim; ++j)
    {
        double s = (y[j] + radius) / (2.0 * radius) * static_cast<double>(bins_per_axis);
        auto k = static_cast<std::size_t>(
            std::clamp(std::floor(s), 0.0, static_cast<double>(bins_per_axis - 1)));
        bin = bin * bins_per_axis + k;
    }
    return bin;
}

EmpiricalMeasure histogram(const PathBatch& batch, double radius, std::size_t bins)
{
    if (bins < 1)
    {
        throw std::invalid_argument("need at least one bin per axis");
    }
    EmpiricalMeasure nu;
    nu.y_dim = batch.y_dim;
    nu.bins_per_axis = bins;
    nu.radius = radius;
    std::size_t cells = 1;
    for (std::size_t j = 0; j < nu.y_dim; ++j)
    {
        cells *= bins;
    }
    nu.counts.assign(cells, 0);
    nu.total = batch.size();
    for (std::size_t i = 0; i < batch.size(); ++i)
    {
        if (batch.exited[i])
        {
            ++nu.exit_count;
        }
        else
        {
            ++nu.counts[nu.bin_of(batch.y(i))];
        }
    }
    return nu;
}

EmpiricalMeasure estimate_nu(const OperatorSpec& op, const CylinderDomain& dom,
                             std::span<const double> y, double t,
                             const SimConfig& cfg, std::size_t bins, double start_x)
{
    if (bins < 1)
    {
        throw std::invalid_argument("need at least one bin per axis");
    }
    SimConfig run = cfg;
    run.t_max = t;
    std::vector<double> start{start_x};
    start.insert(start.end(), y.begin(), y.end());
    return histogram(simulate_batch(op, dom, start, run), dom.outer_radius, bins);
}

ComparabilityResult comparability_constant(const OperatorSpec& op,
                                           const CylinderDomain& dom,
                                           std::span<const double> y1,
                                           std::span<const double> y2, double t,
                                           const SimConfig& cfg, std::size_t bins,
                                           std::uint64_t mass_floor)
{
    if (!(t > 0.0))
    {
        throw std::invalid_argument("horizon t must be positive");
    }
    for (auto y : {y1, y2})
    {
        if (!(norm(y) < dom.inner_radius))
        {
            throw std::invalid_argument("y1 and y2 must lie strictly inside the inner ball");
        }
    }
    EmpiricalMeasure a = estimate_nu(op, dom, y1, t, cfg, bins);
    EmpiricalMeasure b = estimate_nu(op, dom, y2, t, cfg, bins);

    ComparabilityResult res;
    res.h = 1.0;
    auto consider = [&](std::uint64_t ca, std::uint64_t cb) {
        if (ca == 0 && cb == 0)
        {
            return;
        }
        if (ca < mass_floor || cb < mass_floor)
        {
            ++res.bins_excluded;
            return;
        }
        double ratio = static_cast<double>(ca) / static_cast<double>(cb);
        res.h = std::min(res.h, std::min(ratio, 1.0 / ratio));
        ++res.bins_used;
    };
    for (std::size_t i = 0; i < a.bin_count(); ++i)
    {
        consider(a.counts[i], b.counts[i]);
    }
    consider(a.exit_count, b.exit_count);
    if (res.bins_used == 0)
    {
        throw std::runtime_error(
            "no bin reaches the mass floor in both measures; increase t or paths");
    }
    return res;
}

} // namespace harnack
