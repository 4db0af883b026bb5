#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "harnack/field.hpp"
#include "harnack/operator.hpp"

namespace harnack {

/// A candidate solution that is not positive where it must be.
class PositivityError : public std::runtime_error
{
  public:
    PositivityError(const std::string& what, std::vector<double> location);
    const std::vector<double>& location() const noexcept { return location_; }

  private:
    std::vector<double> location_;
};

/*!
 * Closed-form or ODE-backed positive solution of
 * Delta_y u + beta(y) u_x + gamma u = 0 together with its coefficients.
 */
struct AnalyticSolution
{
    std::string id;
    std::string beta;
    std::string gamma;
    std::size_t dim = 2;
    PointFunction u;
    CylinderDomain validity;
    /// Positivity certificate: minimum over the verification lattice.
    double min_value = 0.0;
    std::vector<double> min_location;
    /// Step-halving error estimate for ODE-backed solutions, else 0.
    double error_estimate = 0.0;

    double operator()(std::span<const double> p) const { return u(p); }
    OperatorSpec make_operator(const CylinderDomain& dom) const;
};

/// u = x - y^3/6 + C for beta = y, gamma = 0, N = 2; positive on `validity`.
AnalyticSolution kolmogorov_poly(double c, const CylinderDomain& validity = {});

/*!
 * u = e^{lambda x} phi(y) with phi'' = -(lambda beta + gamma) phi,
 * phi(y0) = 1, phi'(y0) = 0, integrated by classical RK4 across the outer
 * interval. Rejects phi with a zero on the inner interval.
 */
AnalyticSolution separable(double lambda, const OperatorSpec& op, double y0,
                           const CylinderDomain& dom, double ode_step = 1e-3);

/// u = e^{-lambda x} cosh(sqrt(lambda) y) for beta = 1, gamma = 0, N = 2.
AnalyticSolution counterexample_family(double lambda,
                                       const CylinderDomain& validity = {});

AnalyticSolution constant_solution(double c, std::size_t dim = 2,
                                   const CylinderDomain& validity = {});

/// Closed-form sup/inf ratio of counterexample_family over [0,1] x [-1,1].
double counterexample_ratio(double lambda);

/*!
 * Build a catalog entry from its name: kolmogorov(C), separable(lambda,gamma),
 * counterexample(lambda), constant(c). `beta` supplies the drift for
 * separable.
 */
AnalyticSolution catalog_solution(std::string_view name, std::string_view beta,
                                  const CylinderDomain& dom);

} // namespace harnack
