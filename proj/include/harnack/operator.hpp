#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "harnack/expr.hpp"
#include "harnack/field.hpp"

namespace harnack {

/*!
 * Cylinder (a, b) x B_R with the inner cylinder [a', b'] x B_R'.
 *
 * Defaults are the normalized geometry a = -5, a' = 0, b' = 1, b = 6,
 * D = B_3(0), D' = B_1(0).
 */
struct CylinderDomain
{
    double x_lo = -5.0;
    double x_hi = 6.0;
    double x_lo_inner = 0.0;
    double x_hi_inner = 1.0;
    double outer_radius = 3.0;
    double inner_radius = 1.0;

    /// Throws std::invalid_argument unless a < a' < b' < b and 0 < R' < R.
    void validate() const;
};

/*!
 * The operator Delta_y + beta(y) d/dx + gamma(x, y) in N dimensions.
 *
 * beta is an expression over y1..y{N-1}; gamma over x, y1..y{N-1}. The sup
 * norms are grid maxima over the closed outer cylinder times a 1.05 safety
 * factor; the raw grid maxima are kept as well.
 */
struct OperatorSpec
{
    Expr beta;
    Expr gamma;
    std::size_t dim = 2;
    double beta_sup = 0.0;
    double gamma_sup = 0.0;
    double beta_grid_max = 0.0;
    double gamma_grid_max = 0.0;

    std::size_t y_dim() const { return dim - 1; }
};

inline constexpr double sup_safety_factor = 1.05;

/// Parse beta and gamma and estimate their sup norms on `domain`.
OperatorSpec make_operator(std::string_view beta, std::string_view gamma,
                           std::size_t dim, const CylinderDomain& domain,
                           double grid_step = 0.05);

/// Symmetric lattice points k * step (k integer) in a y-ball. The open ball
/// excludes points on the sphere.
std::vector<std::vector<double>>
ball_lattice(std::size_t y_dim, double radius, double step, bool closed);

struct HormanderReport
{
    int r = 0;
    bool sign_change_ok = false;
    std::vector<double> witness_minus; // argmin of beta
    std::vector<double> witness_plus;  // argmax of beta
    double beta_min = 0.0;
    double beta_max = 0.0;
    double min_derivative_mass = 0.0;
    std::vector<double> min_mass_location;
    double tolerance = 1e-12;
    double grid_step = 0.0;
    std::size_t grid_points = 0;
    /// Smallest order <= 4 at which the derivative mass stays positive.
    std::optional<int> smallest_passing_r;
    std::string error;
    std::vector<double> error_location;
    bool pass = false;
};

inline constexpr int max_hormander_order = 4;

/*!
 * Check sign change of beta and positivity of sum_{|zeta| <= r} |D^zeta beta|
 * on the lattice of the closed outer ball.
 *
 * All derivatives are symbolic. A domain error at a lattice point produces
 * a failing report that names the point.
 */
HormanderReport check_hypothesis(const OperatorSpec& op, const CylinderDomain& dom,
                                 int r, double grid_step);

std::string to_json(const HormanderReport& report);

struct RegionSet
{
    double level = 0.0;
    std::vector<std::vector<double>> plus_points;
    std::vector<std::vector<double>> minus_points;
    std::size_t neither_count = 0;
    std::vector<std::string> warnings;

    bool both_nonempty() const
    {
        return !plus_points.empty() && !minus_points.empty();
    }
};

/// Split the open inner-ball lattice into {beta > d}, {-beta > d} and the rest.
RegionSet classify_regions(const OperatorSpec& op, const CylinderDomain& dom,
                           double d, double grid_step);

/*!
 * Discrete residual Delta_y u + beta u_x + gamma u with central differences.
 *
 * Boundary nodes of the input grid are NaN in the result.
 */
ScalarField residual(const ScalarField& u, const OperatorSpec& op);

} // namespace harnack
