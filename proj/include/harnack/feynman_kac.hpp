#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "harnack/field.hpp"
#include "harnack/operator.hpp"
#include "harnack/sde.hpp"

namespace harnack {

struct FKEstimate
{
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double horizon = 0.0;
};

/// Mean and standard error of exp(int gamma) * u_data(stopped state).
FKEstimate evaluate(const OperatorSpec& op, const CylinderDomain& dom,
                    const PointFunction& u_data, std::span<const double> start,
                    double t, const SimConfig& cfg, std::uint64_t substream = 0);

struct SandwichVerdict
{
    bool pass = false;
    double u_start = 0.0;
    double expectation = 0.0; // unweighted mean of u at stopped states
    double std_error = 0.0;
    double lower = 0.0; // e^{-t} (E - k se)
    double upper = 0.0; // e^{t} (E + k se)
    double horizon = 0.0;
};

/// Default horizon 1 / |beta|_inf.
double default_sandwich_horizon(const OperatorSpec& op);

/*!
 * Test e^{-t} E u(X_{t^tau}, Y_{t^tau}) <= u(x, y) <= e^{t} E u(...).
 *
 * Requires |gamma|_inf <= 1 (grid maximum). u is interpolated multilinearly
 * at the start and at every stopped state.
 */
SandwichVerdict sandwich_check(const OperatorSpec& op, const CylinderDomain& dom,
                               const ScalarField& u, std::span<const double> start,
                               double t, const SimConfig& cfg, double k_sigma = 3.0);

struct ManufacturedField
{
    ScalarField value;
    ScalarField std_error;
};

/*!
 * Feynman-Kac field u(node) = E[exp(int gamma) g(stopped state)].
 *
 * Paths that have not left the ball by t_solve are scored with g at their
 * horizon state. Nodes outside the open outer ball take g(node). All nodes
 * sharing a y-coordinate use the same substream (1 + flat y-index), so the
 * field is exactly consistent under x-shifts of g.
 */
ManufacturedField make_solution(const OperatorSpec& op, const CylinderDomain& dom,
                                const PointFunction& g, double t_solve,
                                const SimConfig& cfg, std::vector<Axis> grid);

} // namespace harnack
