#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "harnack/operator.hpp"

namespace harnack {

/// How exits from the open outer ball are detected between grid times.
enum class ExitMonitor
{
    /// Only the grid states are tested; exit times are biased by O(sqrt(dt)).
    Discrete,
    /// Grid test plus a Brownian-bridge crossing test against the tangent
    /// half-space; removes the leading O(sqrt(dt)) bias.
    BrownianBridge,
};

struct SimConfig
{
    double dt = 1e-3;
    double t_max = 1.0;
    std::size_t n_paths = 100000;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;
    ExitMonitor monitor = ExitMonitor::BrownianBridge;

    /// Throws std::invalid_argument on a bad configuration for `op`/`dom`.
    void validate(const OperatorSpec& op, const CylinderDomain& dom) const;
};

/*!
 * Stopped states of a batch of paths started at one point.
 *
 * The x-coordinate is stored as the displacement from the start, which is
 * a function of the y-path alone when gamma is ignored; this makes the
 * translation identity X^{x,y} = X^{0,y} + x exact bit for bit.
 */
struct PathBatch
{
    std::vector<double> start; // (x, y1, ...)
    std::size_t y_dim = 1;
    std::vector<double> x_displacement;
    std::vector<double> stopped_y; // n_paths * y_dim, row-major
    std::vector<double> stop_time;
    std::vector<double> gamma_integral;
    std::vector<std::uint8_t> exited;

    std::size_t size() const { return stop_time.size(); }
    double stopped_x(std::size_t i) const { return start[0] + x_displacement[i]; }
    std::span<const double> y(std::size_t i) const
    {
        return {stopped_y.data() + i * y_dim, y_dim};
    }
    /// (stopped_x, stopped_y...) of path i.
    std::vector<double> stopped_point(std::size_t i) const;

    double mean_stop_time() const;
    double stop_time_std_error() const;
    double exit_fraction() const;
};

/*!
 * Euler-Maruyama simulation of dX = beta(Y) dt, dY = sqrt(2) dB.
 *
 * Path i draws from the counter stream (master_seed, i, substream). Paths
 * stop at the first grid time whose state leaves the open outer ball (the
 * recorded y is projected radially onto the sphere) or at t_max. The gamma
 * integral uses the left-endpoint rule.
 */
PathBatch simulate_batch(const OperatorSpec& op, const CylinderDomain& dom,
                         std::span<const double> start, const SimConfig& cfg,
                         std::uint64_t substream = 0);

/// Histogram of stopped y-states on a cubic bin grid plus an exit shell.
struct EmpiricalMeasure
{
    std::size_t y_dim = 1;
    std::size_t bins_per_axis = 1;
    double radius = 1.0;
    std::vector<std::uint64_t> counts; // bins_per_axis^y_dim interior bins
    std::uint64_t exit_count = 0;
    std::uint64_t total = 0;

    std::size_t bin_count() const { return counts.size(); }
    double mass(std::size_t bin) const;
    double exit_mass() const;
    std::vector<double> bin_center(std::size_t bin) const;
    std::size_t bin_of(std::span<const double> y) const;
};

/// Bin the stopped y-states of a batch; exited paths go to the exit shell.
EmpiricalMeasure histogram(const PathBatch& batch, double radius, std::size_t bins);

/// Law of the stopped y-process from `y` at horizon t (x-independent).
EmpiricalMeasure estimate_nu(const OperatorSpec& op, const CylinderDomain& dom,
                             std::span<const double> y, double t,
                             const SimConfig& cfg, std::size_t bins,
                             double start_x = 0.0);

struct ComparabilityResult
{
    double h = 0.0;
    std::size_t bins_used = 0;
    std::size_t bins_excluded = 0;
};

inline constexpr std::uint64_t default_mass_floor = 20;

/*!
 * Empirical two-sided comparability constant between nu_t^{y1} and nu_t^{y2}.
 *
 * Both histograms share seeds. The minimum of min(p/q, q/p) is taken over
 * the interior bins and the exit shell whose counts reach `mass_floor` in
 * both measures.
 */
ComparabilityResult comparability_constant(const OperatorSpec& op,
                                           const CylinderDomain& dom,
                                           std::span<const double> y1,
                                           std::span<const double> y2, double t,
                                           const SimConfig& cfg, std::size_t bins,
                                           std::uint64_t mass_floor = default_mass_floor);

} // namespace harnack
