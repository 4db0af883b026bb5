#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "harnack/feynman_kac.hpp"
#include "harnack/field.hpp"
#include "harnack/operator.hpp"
#include "harnack/sde.hpp"
#include "harnack/solutions.hpp"

namespace harnack {

/// [x_lo, x_hi] x closed ball of `radius`; extrema include boundary nodes.
struct Subcylinder
{
    double x_lo = 0.0;
    double x_hi = 1.0;
    double radius = 1.0;
};

/// Lattice spacing for evaluating analytic solutions on a subcylinder.
struct GridSpec
{
    double hx = 0.05;
    double hy = 0.05;
};

struct HarnackReport
{
    std::string solution;
    double sup = 0.0;
    double inf = 0.0;
    double ratio = 0.0;
    std::vector<double> argmax;
    std::vector<double> argmin;
    Subcylinder sub;
};

/*!
 * Exact grid extrema of a positive function on the subcylinder lattice.
 *
 * Ties go to the first node in lexicographic (x, y1, ...) order. Throws
 * PositivityError at the first nonpositive node.
 */
HarnackReport sup_inf_ratio(const PointFunction& u, std::size_t dim,
                            const Subcylinder& sub, const GridSpec& grid,
                            const std::string& id = "");
HarnackReport sup_inf_ratio(const AnalyticSolution& u, const Subcylinder& sub,
                            const GridSpec& grid);
/// Uses the field's own nodes that fall inside the subcylinder.
HarnackReport sup_inf_ratio(const ScalarField& u, const Subcylinder& sub,
                            const std::string& id = "");

struct FamilyScan
{
    std::vector<HarnackReport> reports;
    double max_ratio = 0.0;
    std::size_t argmax = 0;
};

FamilyScan scan_family(const std::vector<AnalyticSolution>& family,
                       const Subcylinder& sub, const GridSpec& grid);
FamilyScan scan_family(const std::vector<ScalarField>& family,
                       const std::vector<std::string>& ids, const Subcylinder& sub);

/// Domain with the subcylinder as inner cylinder, used as a validity region.
CylinderDomain validity_domain(const Subcylinder& sub);

/// Analytic members of the shipped family for drift beta = y1 (N = 2).
std::vector<AnalyticSolution> shipped_analytic_family(const Subcylinder& sub);

/*!
 * Positive boundary datum number `index` of the random family:
 * exp(c1 sin(w1 x + p1) + c2 cos(w2 y1 + p2)) with c in [0, 1],
 * w in [0.5, 2], p in [0, 2 pi), drawn from (seed, index).
 */
PointFunction random_positive_data(std::uint64_t seed, std::size_t index);

/*!
 * `count` Feynman-Kac fields from random positive boundary data, sampled on
 * a grid over the subcylinder box. Field k runs with master seed
 * splitmix64(cfg.master_seed + k).
 */
std::vector<ScalarField> manufactured_family(const OperatorSpec& op,
                                             const CylinderDomain& dom,
                                             const Subcylinder& sub, std::size_t count,
                                             double t_solve, const SimConfig& cfg,
                                             const GridSpec& field_grid);

enum class Verdict
{
    Divergent,
    Bounded,
    NoVerdict,
};

const char* to_string(Verdict v);

struct CounterexampleScan
{
    std::vector<double> lambdas;
    std::vector<HarnackReport> reports;
    std::vector<double> closed_form;
    Verdict verdict = Verdict::NoVerdict;
};

/*!
 * Ratios of the beta = 1 family e^{-lambda x} cosh(sqrt(lambda) y).
 *
 * Divergent iff the ratios increase strictly and the last exceeds ten
 * times the first; a single lambda gives no verdict.
 */
CounterexampleScan counterexample_scan(const std::vector<double>& lambdas,
                                       const Subcylinder& sub, const GridSpec& grid);

struct RegionCheck
{
    double ratio = 0.0;
    double sup_on_regions = 0.0;
    double inf_on_inner_ball = 0.0;
    std::vector<double> argmax;
    std::vector<double> argmin;
    std::size_t plus_points = 0;
    std::size_t minus_points = 0;
    double cap = 0.0;
    bool within_cap = false;
};

/*!
 * Ratio of sup over [a', b'] x A_d to inf over [a', b'] x B_R'.
 *
 * Throws std::domain_error when A_d^+ or A_d^- is empty.
 */
RegionCheck region_inequality_check(const PointFunction& u, const OperatorSpec& op,
                                    const CylinderDomain& dom, double d,
                                    const GridSpec& grid, double cap);

/*!
 * v(x, y) = integral_{-z}^{z} u(x + s, y) ds by the trapezoid rule.
 *
 * The result lives on the x-nodes whose window fits in the input grid;
 * window ends between nodes are linearly interpolated.
 */
ScalarField window_average_x(const ScalarField& u, double z);

} // namespace harnack
